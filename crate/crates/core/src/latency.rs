//! Per-segment latency models and end-to-end composition for one frame.
//!
//! Segment functions take already-resolved scalars (compute, bandwidth,
//! complexity) so they can be checked in isolation. [`compose_frame_latency`]
//! resolves those scalars from a [`ScenarioSpec`] and applies the local/remote
//! gate. Result delivery is counted once, through the transmission segment; the
//! rendering segment inside the total carries only its compute and buffering
//! terms, while [`rendering_latency`] reports the full rendering quantity with
//! its delivery term.

use serde::Serialize;

use crate::aoi::mean_sojourn;
use crate::error::{Error, Result};
use crate::regression::{Clamped, CoefficientSet};
use crate::scenario::{
    BufferConfig, EncoderConfig, FrameConfig, NetworkProfile, OffloadPlan, ScenarioSpec,
    SensorProfile, VolumetricConfig,
};
use crate::segment::{Segment, Segments};
use crate::warning::Warning;

/// Encoding regression output is in milliseconds of work per compute unit.
const MS_PER_S: f64 = 1000.0;

const BITS_PER_BYTE: f64 = 8.0;

/// `1/fps + s/c + δ/m`
pub fn frame_generation(frames: &FrameConfig, client_compute: f64, client_bandwidth: f64) -> f64 {
    1.0 / frames.frame_rate
        + frames.frame_area / client_compute
        + frames.frame_bytes / client_bandwidth
}

pub fn volumetric_generation(vol: &VolumetricConfig, client_compute: f64, client_bandwidth: f64) -> f64 {
    vol.scene_area / client_compute + vol.scene_bytes / client_bandwidth
}

/// Slowest sensor's accumulated generation and propagation delay over
/// `updates` updates during `frame`. No sensors gives zero.
pub fn external_sensor_latency(
    sensors: &[SensorProfile],
    frame: usize,
    updates: usize,
    propagation_speed: f64,
) -> f64 {
    sensors
        .iter()
        .map(|s| {
            (1..=updates)
                .map(|n| 1.0 / s.gen_frequency + s.distance_at(frame, n) / propagation_speed)
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Sum of M/M/1 sojourn times over the named buffer classes.
pub fn buffering_delay(buffers: &[(&str, BufferConfig)]) -> Result<f64> {
    buffers.iter().try_fold(0.0, |acc, (name, buf)| {
        mean_sojourn(buf)
            .map(|t| acc + t)
            .map_err(|e| match e {
                Error::UnstableQueue { arrival_rate, service_rate, .. } => Error::UnstableQueue {
                    buffer: name.to_string(),
                    arrival_rate,
                    service_rate,
                },
                other => other,
            })
    })
}

/// Rendering compute and buffering, without result delivery.
pub fn rendering_compute(frames: &FrameConfig, client_compute: f64, client_bandwidth: f64, buffering: f64) -> f64 {
    frames.frame_area / client_compute + frames.frame_bytes / client_bandwidth + buffering
}

/// Full rendering latency including delivery of the inference result.
pub fn rendering_latency(
    frames: &FrameConfig,
    client_compute: f64,
    client_bandwidth: f64,
    buffering: f64,
    plan: &OffloadPlan,
    remote_result_latency: f64,
) -> f64 {
    let w = plan.local_weight();
    rendering_compute(frames, client_compute, client_bandwidth, buffering)
        + w * plan.local_result_latency
        + (1.0 - w) * remote_result_latency
}

pub fn frame_conversion(frames: &FrameConfig, client_compute: f64, client_bandwidth: f64) -> f64 {
    frames.frame_area / client_compute + frames.frame_bytes / client_bandwidth
}

/// Encoding latency in seconds from a raw regression value; negative raw
/// values contribute nothing.
pub fn encoding_latency_from_raw(
    raw: f64,
    frames: &FrameConfig,
    client_compute: f64,
    client_bandwidth: f64,
) -> Clamped {
    let work = raw.max(0.0) / client_compute / MS_PER_S;
    Clamped {
        value: work + frames.frame_bytes / client_bandwidth,
        raw,
        clamped: raw < 0.0,
    }
}

pub fn encoding_latency(
    enc: &EncoderConfig,
    frames: &FrameConfig,
    client_compute: f64,
    client_bandwidth: f64,
) -> Clamped {
    let raw = crate::regression::encoding_latency_raw(enc, frames);
    encoding_latency_from_raw(raw, frames, client_compute, client_bandwidth)
}

pub fn local_inference(
    frames: &FrameConfig,
    client_compute: f64,
    client_bandwidth: f64,
    cnn_complexity: f64,
    client_share: f64,
) -> f64 {
    client_share
        * (frames.converted_area / (client_compute * cnn_complexity)
            + frames.converted_bytes / client_bandwidth)
}

/// `L_en · c_client · γ / c_edge`
pub fn decoding_latency(encoding: f64, client_compute: f64, edge_compute: f64, discount: f64) -> f64 {
    encoding * client_compute * discount / edge_compute
}

/// One edge server with every scalar resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemoteEdge {
    pub task_share: f64,
    pub compute: f64,
    pub memory_bandwidth: f64,
    pub cnn_complexity: f64,
}

/// Latency of one edge's share of the inference task, decode included.
pub fn edge_inference(
    enc: &EncoderConfig,
    edge: &RemoteEdge,
    encoding: f64,
    client_compute: f64,
    discount: f64,
) -> f64 {
    let decode = decoding_latency(encoding, client_compute, edge.compute, discount);
    edge.task_share
        * (enc.output_area / (edge.compute * edge.cnn_complexity)
            + enc.output_bytes / edge.memory_bandwidth
            + decode)
}

/// Slowest edge among parallel servers.
pub fn remote_inference(
    enc: &EncoderConfig,
    edges: &[RemoteEdge],
    encoding: f64,
    client_compute: f64,
    discount: f64,
) -> Result<f64> {
    if edges.is_empty() {
        return Err(Error::NoEdgeConfigured);
    }
    Ok(edges
        .iter()
        .map(|e| edge_inference(enc, e, encoding, client_compute, discount))
        .fold(0.0, f64::max))
}

/// Serialization of `megabytes` over the wireless link plus propagation over `distance`.
pub fn transmission_latency(megabytes: f64, net: &NetworkProfile, distance: f64) -> f64 {
    megabytes * BITS_PER_BYTE / net.throughput + distance / net.propagation_speed
}

/// Uplink of the encoded frame, downlink of the result, and round-trip propagation.
pub fn offload_round_trip(uplink_mb: f64, downlink_mb: f64, net: &NetworkProfile, distance: f64) -> f64 {
    (uplink_mb + downlink_mb) * BITS_PER_BYTE / net.throughput
        + 2.0 * distance / net.propagation_speed
}

pub fn handoff_latency(net: &NetworkProfile) -> f64 {
    net.handoff_latency * net.handoff_probability
}

pub fn cooperation_latency(net: &NetworkProfile) -> f64 {
    transmission_latency(net.coop_bytes, net, net.coop_distance)
}

/// Per-segment latency of one frame, seconds.
///
/// `segments` holds gated contributions: segments switched off by the
/// local/remote flag, and cooperation when excluded, are zero there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencyBreakdown {
    pub frame: usize,
    pub segments: Segments,
    pub total: f64,
    pub local: bool,
    pub include_coop: bool,
    /// Cooperation latency whether or not it enters the total.
    pub cooperation_standalone: f64,
    /// Rendering latency including result delivery.
    pub rendering_full: f64,
    pub buffering: f64,
    pub client_compute: f64,
    pub warnings: Vec<Warning>,
}

impl LatencyBreakdown {
    pub fn get(&self, seg: Segment) -> f64 {
        self.segments[seg]
    }

    /// Gated end-to-end sum recomputed from the fields.
    pub fn recomputed_total(&self) -> f64 {
        self.segments.gated_sum(self.local, self.include_coop)
    }
}

/// Resolved per-scenario scalars shared by every frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedDevice {
    pub compute: Clamped,
    pub bandwidth: f64,
    pub local_complexity: f64,
    pub edges: Vec<RemoteEdge>,
}

impl ResolvedDevice {
    pub fn resolve(spec: &ScenarioSpec, coeffs: &CoefficientSet) -> Self {
        Self::with_compute(spec, coeffs, coeffs.compute_resource(&spec.device.allocation))
    }

    /// Uses `compute` as the device compute instead of the regression output.
    pub fn with_compute(spec: &ScenarioSpec, coeffs: &CoefficientSet, compute: Clamped) -> Self {
        let edges = spec
            .edges
            .iter()
            .map(|e| RemoteEdge {
                task_share: e.task_share,
                compute: e.resolved_compute(compute.value),
                memory_bandwidth: e.memory_bandwidth,
                cnn_complexity: coeffs.cnn_complexity(&e.cnn),
            })
            .collect();
        Self {
            compute,
            bandwidth: spec.device.memory_bandwidth,
            local_complexity: coeffs.cnn_complexity(&spec.device.cnn),
            edges,
        }
    }
}

/// End-to-end latency of frame `frame` with the built-in coefficients.
pub fn compose_frame_latency(spec: &ScenarioSpec, frame: usize) -> Result<LatencyBreakdown> {
    compose_frame_latency_with(spec, frame, &CoefficientSet::paper())
}

pub fn compose_frame_latency_with(
    spec: &ScenarioSpec,
    frame: usize,
    coeffs: &CoefficientSet,
) -> Result<LatencyBreakdown> {
    compose_resolved(spec, frame, coeffs, &ResolvedDevice::resolve(spec, coeffs))
}

pub fn compose_resolved(
    spec: &ScenarioSpec,
    frame: usize,
    coeffs: &CoefficientSet,
    device: &ResolvedDevice,
) -> Result<LatencyBreakdown> {
    let c = device.compute.value;
    let m = device.bandwidth;
    let frames = &spec.frames;
    let net = &spec.network;
    let plan = &spec.offload;
    let local = plan.is_local();
    let mut warnings = Vec::new();
    if device.compute.clamped {
        warnings.push(Warning::ComputeClamped { raw: device.compute.raw });
    }

    let buffering = buffering_delay(&spec.buffer.classes(&spec.sensors))?;

    let mut seg = Segments::default();
    seg[Segment::FrameGeneration] = frame_generation(frames, c, m);
    seg[Segment::Volumetric] = volumetric_generation(&spec.volumetric, c, m);
    seg[Segment::ExternalSensors] =
        external_sensor_latency(&spec.sensors, frame, frames.updates_per_frame, net.propagation_speed);
    seg[Segment::Rendering] = rendering_compute(frames, c, m, buffering);

    let mut remote_delivery = 0.0;
    if local {
        seg[Segment::Conversion] = frame_conversion(frames, c, m);
        seg[Segment::LocalInference] =
            local_inference(frames, c, m, device.local_complexity, plan.client_share);
    } else {
        let raw = coeffs.encoding_latency_raw(&spec.encoder, frames);
        let en = encoding_latency_from_raw(raw, frames, c, m);
        if en.clamped {
            warnings.push(Warning::EncodingClamped { raw });
        }
        seg[Segment::Encoding] = en.value;
        seg[Segment::RemoteInference] =
            remote_inference(&spec.encoder, &device.edges, en.value, c, plan.decode_discount)?;
        remote_delivery = spec
            .edges
            .iter()
            .filter(|e| e.task_share > 0.0)
            .map(|e| offload_round_trip(spec.encoder.output_bytes, plan.result_bytes, net, e.distance))
            .fold(0.0, f64::max);
        seg[Segment::Transmission] = remote_delivery;
        seg[Segment::Handoff] = handoff_latency(net);
    }

    let cooperation = cooperation_latency(net);
    if plan.include_coop {
        seg[Segment::Cooperation] = cooperation;
    }

    let total = seg.gated_sum(local, plan.include_coop);
    Ok(LatencyBreakdown {
        frame,
        segments: seg,
        total,
        local,
        include_coop: plan.include_coop,
        cooperation_standalone: cooperation,
        rendering_full: rendering_latency(frames, c, m, buffering, plan, remote_delivery),
        buffering,
        client_compute: c,
        warnings,
    })
}
