//! Whole-frame evaluation and analytic-versus-simulated comparisons.

use serde::Serialize;

use crate::aoi::{evaluate_frame_aoi, mean_sojourn, AoiReport};
use crate::energy::{compose_with_power, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::latency::{compose_resolved, LatencyBreakdown, ResolvedDevice};
use crate::regression::CoefficientSet;
use crate::scenario::{validate_scenario_with, BufferConfig, ScenarioSpec};
use crate::simoracle::{AoiSimResult, Mm1Stats};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameResult {
    pub latency: LatencyBreakdown,
    pub energy: EnergyBreakdown,
    pub aoi: AoiReport,
}

/// Evaluates frames in `frames` after checking the scenario has no errors.
pub fn evaluate_frames(
    spec: &ScenarioSpec,
    coeffs: &CoefficientSet,
    frames: std::ops::Range<usize>,
) -> Result<Vec<FrameResult>> {
    let report = validate_scenario_with(spec, coeffs);
    let errors = report.errors().count();
    if errors > 0 {
        return Err(Error::InvalidScenario(errors));
    }
    let device = ResolvedDevice::resolve(spec, coeffs);
    let power = coeffs.mean_power(&spec.device.allocation, spec.power.base_power);
    frames
        .map(|q| {
            let latency = compose_resolved(spec, q, coeffs, &device)?;
            let energy = compose_with_power(spec, &latency, power);
            let aoi = evaluate_frame_aoi(spec, q, latency.total)?;
            Ok(FrameResult { latency, energy, aoi })
        })
        .collect()
}

/// `(simulated − analytic) / analytic`
pub fn relative_error(analytic: f64, simulated: f64) -> f64 {
    (simulated - analytic) / analytic
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub quantity: String,
    pub analytic: f64,
    pub simulated: f64,
    pub relative_error: f64,
    /// Largest per-sample absolute deviation, where samples exist.
    pub max_abs_deviation: Option<f64>,
}

pub fn compare_mm1(buffer: &BufferConfig, stats: &Mm1Stats) -> Result<Comparison> {
    let analytic = mean_sojourn(buffer)?;
    Ok(Comparison {
        quantity: "mean_sojourn".into(),
        analytic,
        simulated: stats.mean_sojourn,
        relative_error: relative_error(analytic, stats.mean_sojourn),
        max_abs_deviation: None,
    })
}

/// Per-sensor comparison of raw analytic samples against simulated ages.
pub fn compare_aoi(analytic: &[Vec<f64>], simulated: &AoiSimResult, ids: &[String]) -> Vec<Comparison> {
    analytic
        .iter()
        .zip(&simulated.sensors)
        .zip(ids)
        .map(|((a, s), id)| {
            let mean_a = a.iter().sum::<f64>() / a.len().max(1) as f64;
            let mean_s = s.mean_age.unwrap_or(f64::NAN);
            let max_dev = a
                .iter()
                .zip(&s.samples)
                .map(|(x, y)| y.map_or(f64::INFINITY, |y| (x - y).abs()))
                .fold(0.0, f64::max);
            Comparison {
                quantity: format!("mean_age[{id}]"),
                analytic: mean_a,
                simulated: mean_s,
                relative_error: relative_error(mean_a, mean_s),
                max_abs_deviation: Some(max_dev),
            }
        })
        .collect()
}
