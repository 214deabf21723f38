//! Age-of-Information and Relevance-of-Information for external sensors.
//!
//! The n-th packet a sensor generates (at `n / f_t`) serves the n-th request
//! of the device (at `n / f_req`), with request ticks restarting every frame.
//! A sample is that packet's generation time plus propagation and buffering,
//! minus the request time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{BufferConfig, ScenarioSpec, SensorProfile};
use crate::warning::Warning;

/// M/M/1 mean time in system, `1 / (μ − λ)`.
pub fn mean_sojourn(buffer: &BufferConfig) -> Result<f64> {
    if !(buffer.service_rate > buffer.arrival_rate) {
        return Err(Error::UnstableQueue {
            buffer: "buffer".into(),
            arrival_rate: buffer.arrival_rate,
            service_rate: buffer.service_rate,
        });
    }
    Ok(1.0 / (buffer.service_rate - buffer.arrival_rate))
}

/// One raw sample: generation + propagation + sojourn − request.
///
/// The simulator performs the same operations in the same order, so the two
/// agree bit for bit in fixed-sojourn mode.
pub fn age_sample(generated_at: f64, propagation: f64, sojourn: f64, requested_at: f64) -> f64 {
    generated_at + propagation + sojourn - requested_at
}

/// Raw (unclamped) samples for updates `1..=updates`, one distance per update.
pub fn aoi_samples(
    gen_frequency: f64,
    distances: &[f64],
    request_frequency: f64,
    sojourn: f64,
    propagation_speed: f64,
) -> Vec<f64> {
    distances
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let n = (i + 1) as f64;
            age_sample(n / gen_frequency, d / propagation_speed, sojourn, n / request_frequency)
        })
        .collect()
}

/// Samples for `sensor` during `frame`.
pub fn sensor_samples(
    sensor: &SensorProfile,
    frame: usize,
    updates: usize,
    request_frequency: f64,
    sojourn: f64,
    propagation_speed: f64,
) -> Vec<f64> {
    aoi_samples(
        sensor.gen_frequency,
        &sensor.distances_for_frame(frame, updates),
        request_frequency,
        sojourn,
        propagation_speed,
    )
}

pub fn average_aoi(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyUpdates);
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Relevance {
    /// `1 / A`, Hz.
    pub processed_frequency: f64,
    /// `N / L_tot`, Hz.
    pub required_frequency: f64,
    pub roi: f64,
}

impl Relevance {
    pub fn is_fresh(&self) -> bool {
        self.roi >= 1.0
    }
}

/// Relevance-of-Information from average age `A`, update count `N` and
/// end-to-end latency `L_tot`.
pub fn roi(average_age: f64, updates: usize, end_to_end: f64) -> Result<Relevance> {
    if !(average_age > 0.0) {
        return Err(Error::DegenerateAoi(average_age));
    }
    let processed_frequency = 1.0 / average_age;
    let required_frequency = updates as f64 / end_to_end;
    Ok(Relevance {
        processed_frequency,
        required_frequency,
        // equals (L_tot / N) / A, written so that A·N = L_tot gives exactly 1
        roi: end_to_end / (average_age * updates as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorAoi {
    pub id: String,
    /// Samples as computed, possibly negative.
    pub raw_samples: Vec<f64>,
    /// Reported samples, negative ages clamped to zero.
    pub samples: Vec<f64>,
    /// True where a sample was clamped.
    pub clamped: Vec<bool>,
    pub average: f64,
    /// `None` when the average age is not positive.
    pub relevance: Option<Relevance>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoiReport {
    pub frame: usize,
    pub updates: usize,
    /// Request tick frequency used for the samples, Hz.
    pub request_frequency: f64,
    pub sojourn: f64,
    pub sensors: Vec<SensorAoi>,
    pub warnings: Vec<Warning>,
}

/// AoI for every sensor during `frame`, given that frame's end-to-end latency.
pub fn evaluate_frame_aoi(spec: &ScenarioSpec, frame: usize, end_to_end: f64) -> Result<AoiReport> {
    let updates = spec.frames.updates_per_frame;
    if updates == 0 {
        return Err(Error::EmptyUpdates);
    }
    let external = spec.buffer.external_resolved(&spec.sensors);
    let sojourn = mean_sojourn(&external).map_err(|e| match e {
        Error::UnstableQueue { arrival_rate, service_rate, .. } => Error::UnstableQueue {
            buffer: "external".into(),
            arrival_rate,
            service_rate,
        },
        other => other,
    })?;
    let request_frequency = spec
        .frames
        .request_frequency
        .unwrap_or(updates as f64 / end_to_end);
    let c = spec.network.propagation_speed;

    let mut warnings = Vec::new();
    let mut sensors = Vec::with_capacity(spec.sensors.len());
    for (m, sensor) in spec.sensors.iter().enumerate() {
        let id = sensor.label(m);
        let raw_samples = sensor_samples(sensor, frame, updates, request_frequency, sojourn, c);
        let clamped: Vec<bool> = raw_samples.iter().map(|t| *t < 0.0).collect();
        let samples: Vec<f64> = raw_samples.iter().map(|t| t.max(0.0)).collect();
        for (n, raw) in raw_samples.iter().enumerate().filter(|(_, t)| **t < 0.0) {
            warnings.push(Warning::NegativeAge { sensor: id.clone(), update: n + 1, raw: *raw });
        }
        let average = average_aoi(&samples)?;
        let relevance = match roi(average, updates, end_to_end) {
            Ok(r) => Some(r),
            Err(_) => {
                warnings.push(Warning::DegenerateAoi { sensor: id.clone(), average });
                None
            }
        };
        sensors.push(SensorAoi { id, raw_samples, samples, clamped, average, relevance });
    }
    Ok(AoiReport { frame, updates, request_frequency, sojourn, sensors, warnings })
}
