//! Per-segment device energy for one frame.
//!
//! Each segment is charged at a constant power for its latency. Segments that
//! run on the device use the mean-power regression; segments where the device
//! waits on the network or the edge use the wait power. Thermal loss is a fixed
//! fraction of the segment subtotal and base energy is base power over the
//! end-to-end latency.

use serde::Serialize;

use crate::latency::LatencyBreakdown;
use crate::regression::{Clamped, CoefficientSet};
use crate::scenario::ScenarioSpec;
use crate::segment::{Segment, Segments};
use crate::warning::Warning;

/// `P · L`, joules.
pub fn segment_energy(power: f64, latency: f64) -> f64 {
    power * latency
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub frame: usize,
    /// Gated per-segment energy, J.
    pub segments: Segments,
    /// Power charged to each segment, W.
    pub powers: Segments,
    pub thermal: f64,
    pub base: f64,
    pub total: f64,
    pub local: bool,
    pub include_coop: bool,
    pub warnings: Vec<Warning>,
}

impl EnergyBreakdown {
    pub fn get(&self, seg: Segment) -> f64 {
        self.segments[seg]
    }

    pub fn subtotal(&self) -> f64 {
        self.segments.gated_sum(self.local, self.include_coop)
    }

    pub fn recomputed_total(&self) -> f64 {
        self.subtotal() + self.thermal + self.base
    }
}

/// Power used for each segment of `spec`.
pub fn segment_powers(spec: &ScenarioSpec, active_power: f64) -> Segments {
    let wait = spec.power.resolved_wait_power();
    let mut powers = Segments::default();
    for seg in Segment::ALL {
        powers[seg] = match spec.power.overrides.get(&seg) {
            Some(&p) => p,
            None if seg.is_device_idle() => wait,
            None => active_power,
        };
    }
    powers
}

pub fn compose_frame_energy(spec: &ScenarioSpec, latency: &LatencyBreakdown) -> EnergyBreakdown {
    compose_frame_energy_with(spec, latency, &CoefficientSet::paper())
}

pub fn compose_frame_energy_with(
    spec: &ScenarioSpec,
    latency: &LatencyBreakdown,
    coeffs: &CoefficientSet,
) -> EnergyBreakdown {
    let power = coeffs.mean_power(&spec.device.allocation, spec.power.base_power);
    compose_with_power(spec, latency, power)
}

pub fn compose_with_power(spec: &ScenarioSpec, latency: &LatencyBreakdown, power: Clamped) -> EnergyBreakdown {
    let mut warnings = Vec::new();
    if power.clamped {
        warnings.push(Warning::PowerClamped { raw: power.raw });
    }
    let powers = segment_powers(spec, power.value);
    let mut segments = Segments::default();
    for seg in Segment::ALL {
        let gate = seg.gate(latency.local, latency.include_coop);
        segments[seg] = gate * segment_energy(powers[seg], latency.get(seg));
    }
    let subtotal = segments.gated_sum(latency.local, latency.include_coop);
    let thermal = spec.power.thermal_fraction * subtotal;
    let base = segment_energy(spec.power.base_power, latency.total);
    EnergyBreakdown {
        frame: latency.frame,
        segments,
        powers,
        thermal,
        base,
        total: subtotal + thermal + base,
        local: latency.local,
        include_coop: latency.include_coop,
        warnings,
    }
}
