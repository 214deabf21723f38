//! Scenario description types and constraint validation.
//!
//! Unit conventions used throughout the crate:
//!
//! | quantity            | unit                                  |
//! |---------------------|---------------------------------------|
//! | frame / scene area  | Mpixel (10^6 pixels)                  |
//! | data size           | MB (10^6 bytes)                       |
//! | memory bandwidth    | MB/s                                  |
//! | wireless throughput | Mbps (10^6 bit/s, 1 MB = 8 Mb)        |
//! | compute             | model compute units (regression output) |
//! | clocks              | GHz                                   |
//! | latency             | seconds internally, ms in reports     |
//! | power / energy      | W / J internally, mJ in reports       |

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::regression::CoefficientSet;
use crate::segment::Segment;

/// Speed of light in vacuum, used when a scenario does not set a propagation speed.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Ratio between edge and device compute when an edge server does not set its own.
pub const EDGE_COMPUTE_RATIO: f64 = 11.76;

/// Decoding delay as a fraction of encoding delay on the same hardware.
pub const DEFAULT_DECODE_DISCOUNT: f64 = 1.0 / 3.0;

/// Result payload returned by an edge server, MB.
pub const DEFAULT_RESULT_BYTES: f64 = 0.01;

pub const DEFAULT_THERMAL_FRACTION: f64 = 0.05;

/// Display allowance added to base power while the device waits on the network, W.
pub const WAIT_POWER_ALLOWANCE: f64 = 0.5;

/// Absolute tolerance for the task-share sum identity.
pub const SHARE_SUM_TOLERANCE: f64 = 1e-9;

/// Margin (GHz) around the roots of a clock regression inside which a warning is raised.
pub const REGRESSION_ROOT_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeAllocation {
    /// CPU clock, GHz.
    pub cpu_clock: f64,
    /// GPU clock, GHz.
    pub gpu_clock: f64,
    /// CPU utilization share; the GPU receives the remainder.
    pub cpu_share: f64,
}

impl ComputeAllocation {
    pub fn gpu_share(&self) -> f64 {
        1.0 - self.cpu_share
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnnProfile {
    /// Layer count.
    #[serde(default)]
    pub depth: f64,
    /// Storage size, MB.
    pub size: f64,
    /// Depth scaling factor for compound-scaled networks.
    #[serde(default)]
    pub depth_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceProfile {
    pub allocation: ComputeAllocation,
    /// MB/s.
    pub memory_bandwidth: f64,
    /// Lightweight on-device network used for local inference.
    pub cnn: CnnProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeProfile {
    /// Allocated compute; defaults to `EDGE_COMPUTE_RATIO` times the device compute.
    #[serde(default)]
    pub compute: Option<f64>,
    /// MB/s.
    pub memory_bandwidth: f64,
    pub cnn: CnnProfile,
    /// Share of the inference task assigned to this server.
    pub task_share: f64,
    /// Distance to the device, m.
    #[serde(default)]
    pub distance: f64,
}

impl EdgeProfile {
    pub fn resolved_compute(&self, client_compute: f64) -> f64 {
        self.compute
            .unwrap_or(EDGE_COMPUTE_RATIO * client_compute)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    /// frames/s
    pub frame_rate: f64,
    /// Captured frame size, Mpixel.
    pub frame_area: f64,
    /// Captured frame data, MB.
    pub frame_bytes: f64,
    /// Converted frame size fed to local inference, Mpixel.
    pub converted_area: f64,
    /// Converted frame data, MB.
    pub converted_bytes: f64,
    /// Number of frames evaluated by default.
    pub frame_count: usize,
    /// Sensor information updates required during one frame.
    #[serde(default = "default_updates")]
    pub updates_per_frame: usize,
    /// Request tick frequency for AoI; defaults to updates / end-to-end latency.
    #[serde(default)]
    pub request_frequency: Option<f64>,
}

fn default_updates() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderConfig {
    /// I-frame interval, frames.
    pub i_interval: f64,
    /// B-frame interval, frames.
    pub b_interval: f64,
    /// Mbps.
    pub bitrate: f64,
    pub quantization: f64,
    /// Encoded frame size, Mpixel.
    pub output_area: f64,
    /// Encoded frame data, MB.
    pub output_bytes: f64,
    /// Multiplier applied to the frame area before it enters the encoding regression.
    #[serde(default = "one")]
    pub unit_scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorProfile {
    #[serde(default)]
    pub id: Option<String>,
    /// Information generation frequency, Hz.
    pub gen_frequency: f64,
    /// Constant distance to the device, m.
    #[serde(default)]
    pub distance: f64,
    /// Per-update distance series, m; overrides `distance`.
    #[serde(default)]
    pub distances: Option<Vec<f64>>,
    /// Per-frame, per-update distance table, m; overrides `distances`.
    /// Frames past the end reuse the last row.
    #[serde(default)]
    pub trajectory: Option<Vec<Vec<f64>>>,
    /// Contribution to the external buffer arrival rate, 1/s; defaults to `gen_frequency`.
    #[serde(default)]
    pub packet_arrival_rate: Option<f64>,
}

impl SensorProfile {
    pub fn label(&self, index: usize) -> String {
        self.id.clone().unwrap_or_else(|| format!("s{index}"))
    }

    pub fn arrival_rate(&self) -> f64 {
        self.packet_arrival_rate.unwrap_or(self.gen_frequency)
    }

    /// Distance at 1-based update `update` during frame `frame`.
    pub fn distance_at(&self, frame: usize, update: usize) -> f64 {
        let idx = update.saturating_sub(1);
        if let Some(table) = self.trajectory.as_ref().filter(|t| !t.is_empty()) {
            let row = &table[frame.min(table.len() - 1)];
            if let Some(d) = row.get(idx.min(row.len().saturating_sub(1))) {
                return *d;
            }
        }
        if let Some(series) = self.distances.as_ref().filter(|s| !s.is_empty()) {
            return series[idx.min(series.len() - 1)];
        }
        self.distance
    }

    /// Distances for updates `1..=updates` during `frame`.
    pub fn distances_for_frame(&self, frame: usize, updates: usize) -> Vec<f64> {
        (1..=updates).map(|n| self.distance_at(frame, n)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferConfig {
    /// λ, 1/s.
    pub arrival_rate: f64,
    /// μ, 1/s.
    pub service_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalBufferConfig {
    /// Defaults to the sum of the sensors' packet arrival rates.
    #[serde(default)]
    pub arrival_rate: Option<f64>,
    pub service_rate: f64,
}

/// Input buffer classes feeding the renderer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferSet {
    pub frame: BufferConfig,
    pub volumetric: BufferConfig,
    pub external: ExternalBufferConfig,
}

impl BufferSet {
    pub fn external_resolved(&self, sensors: &[SensorProfile]) -> BufferConfig {
        let arrival_rate = self
            .external
            .arrival_rate
            .unwrap_or_else(|| sensors.iter().map(SensorProfile::arrival_rate).sum());
        BufferConfig {
            arrival_rate,
            service_rate: self.external.service_rate,
        }
    }

    /// Named buffer classes in (frame, volumetric, external) order.
    pub fn classes(&self, sensors: &[SensorProfile]) -> [(&'static str, BufferConfig); 3] {
        [
            ("frame", self.frame),
            ("volumetric", self.volumetric),
            ("external", self.external_resolved(sensors)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffloadPlan {
    /// 1 for on-device inference, 0 for remote inference.
    pub local: f64,
    /// Share of the inference task kept on the device.
    pub client_share: f64,
    /// Total inference task per frame; defaults to client share plus all edge shares.
    #[serde(default)]
    pub task_total: Option<f64>,
    #[serde(default)]
    pub include_coop: bool,
    /// Delivery latency of local inference results to the renderer, s.
    #[serde(default)]
    pub local_result_latency: f64,
    /// Result payload returned by the edge, MB.
    #[serde(default = "default_result_bytes")]
    pub result_bytes: f64,
    #[serde(default = "default_decode_discount")]
    pub decode_discount: f64,
}

fn default_result_bytes() -> f64 {
    DEFAULT_RESULT_BYTES
}

fn default_decode_discount() -> f64 {
    DEFAULT_DECODE_DISCOUNT
}

impl OffloadPlan {
    pub fn is_local(&self) -> bool {
        self.local == 1.0
    }

    pub fn local_weight(&self) -> f64 {
        if self.is_local() {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkProfile {
    /// Mbps.
    pub throughput: f64,
    /// m/s.
    #[serde(default = "default_propagation_speed")]
    pub propagation_speed: f64,
    /// Latency of one handoff, s.
    #[serde(default)]
    pub handoff_latency: f64,
    #[serde(default)]
    pub handoff_probability: f64,
    /// m.
    #[serde(default)]
    pub coop_distance: f64,
    /// MB.
    #[serde(default)]
    pub coop_bytes: f64,
}

fn default_propagation_speed() -> f64 {
    SPEED_OF_LIGHT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumetricConfig {
    /// Mpixel.
    pub scene_area: f64,
    /// MB.
    pub scene_bytes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerConfig {
    /// W.
    #[serde(default)]
    pub base_power: f64,
    /// Device power while waiting on remote work; defaults to base power plus a display allowance.
    #[serde(default)]
    pub wait_power: Option<f64>,
    #[serde(default = "default_thermal_fraction")]
    pub thermal_fraction: f64,
    /// Fixed power per segment, W, replacing the regression or wait power.
    #[serde(default)]
    pub overrides: BTreeMap<Segment, f64>,
}

fn default_thermal_fraction() -> f64 {
    DEFAULT_THERMAL_FRACTION
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            base_power: 0.0,
            wait_power: None,
            thermal_fraction: DEFAULT_THERMAL_FRACTION,
            overrides: BTreeMap::new(),
        }
    }
}

impl PowerConfig {
    pub fn resolved_wait_power(&self) -> f64 {
        self.wait_power
            .unwrap_or(self.base_power + WAIT_POWER_ALLOWANCE)
    }
}

/// Full declarative description of one XR scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub device: DeviceProfile,
    #[serde(default)]
    pub edges: Vec<EdgeProfile>,
    pub network: NetworkProfile,
    #[serde(default)]
    pub sensors: Vec<SensorProfile>,
    pub encoder: EncoderConfig,
    pub frames: FrameConfig,
    pub volumetric: VolumetricConfig,
    pub buffer: BufferSet,
    pub offload: OffloadPlan,
    #[serde(default)]
    pub power: PowerConfig,
}

impl ScenarioSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        Ok(serde_json::from_value(value)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn edge_shares(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.task_share).collect()
    }

    pub fn task_total(&self) -> f64 {
        self.offload
            .task_total
            .unwrap_or_else(|| self.offload.client_share + self.edge_shares().iter().sum::<f64>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Warn,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warn => f.write_str("WARN"),
            Severity::Error => f.write_str("ERROR"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    /// Dotted path of the offending field.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.severity, self.path, self.message)
    }
}

/// Ordered list of constraint violations; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warn)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            severity: Severity::Warn,
            path: path.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, value: f64) {
        if !(value > 0.0 && value.is_finite()) {
            self.error(path, format!("{} must be positive, got {value}", leaf(path)));
        }
    }

    fn non_negative(&mut self, path: &str, value: f64) {
        if !(value >= 0.0 && value.is_finite()) {
            self.error(path, format!("{} must be non-negative, got {value}", leaf(path)));
        }
    }

    fn unit_interval(&mut self, path: &str, value: f64) {
        if !(0.0..=1.0).contains(&value) {
            self.error(path, format!("{} out of [0,1]: {value}", leaf(path)));
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "{issue}")?;
        }
        Ok(())
    }
}

fn leaf(path: &str) -> &str {
    path.rsplit('.').next().unwrap_or(path)
}

/// Validates against the built-in coefficient set.
pub fn validate_scenario(spec: &ScenarioSpec) -> ValidationReport {
    validate_scenario_with(spec, &CoefficientSet::paper())
}

/// Checks every physical and model constraint; never fails.
pub fn validate_scenario_with(spec: &ScenarioSpec, coeffs: &CoefficientSet) -> ValidationReport {
    let mut r = ValidationReport::default();

    let alloc = &spec.device.allocation;
    r.unit_interval("device.allocation.cpu_share", alloc.cpu_share);
    r.positive("device.allocation.cpu_clock", alloc.cpu_clock);
    r.positive("device.allocation.gpu_clock", alloc.gpu_clock);
    r.positive("device.memory_bandwidth", spec.device.memory_bandwidth);
    check_cnn(&mut r, "device.cnn", &spec.device.cnn);

    let frames = &spec.frames;
    r.positive("frames.frame_rate", frames.frame_rate);
    r.positive("frames.frame_area", frames.frame_area);
    r.positive("frames.frame_bytes", frames.frame_bytes);
    r.positive("frames.converted_area", frames.converted_area);
    r.positive("frames.converted_bytes", frames.converted_bytes);
    if frames.frame_count < 1 {
        r.error("frames.frame_count", "frame_count must be at least 1");
    }
    if frames.updates_per_frame < 1 {
        r.error("frames.updates_per_frame", "updates_per_frame must be at least 1");
    }
    if let Some(freq) = frames.request_frequency {
        r.positive("frames.request_frequency", freq);
    }

    let enc = &spec.encoder;
    for (name, value) in [
        ("i_interval", enc.i_interval),
        ("b_interval", enc.b_interval),
        ("bitrate", enc.bitrate),
        ("quantization", enc.quantization),
        ("unit_scale", enc.unit_scale),
    ] {
        r.non_negative(&format!("encoder.{name}"), value);
    }
    r.positive("encoder.output_area", enc.output_area);
    r.positive("encoder.output_bytes", enc.output_bytes);
    if enc.output_bytes > frames.frame_bytes {
        r.error(
            "encoder.output_bytes",
            format!(
                "encoded frame ({} MB) larger than captured frame ({} MB)",
                enc.output_bytes, frames.frame_bytes
            ),
        );
    }

    r.positive("volumetric.scene_area", spec.volumetric.scene_area);
    r.positive("volumetric.scene_bytes", spec.volumetric.scene_bytes);

    let net = &spec.network;
    r.positive("network.throughput", net.throughput);
    r.positive("network.propagation_speed", net.propagation_speed);
    r.non_negative("network.handoff_latency", net.handoff_latency);
    r.unit_interval("network.handoff_probability", net.handoff_probability);
    r.non_negative("network.coop_distance", net.coop_distance);
    r.non_negative("network.coop_bytes", net.coop_bytes);

    for (i, edge) in spec.edges.iter().enumerate() {
        let p = format!("edges.{i}");
        if let Some(c) = edge.compute {
            r.positive(&format!("{p}.compute"), c);
        }
        r.positive(&format!("{p}.memory_bandwidth"), edge.memory_bandwidth);
        r.unit_interval(&format!("{p}.task_share"), edge.task_share);
        r.non_negative(&format!("{p}.distance"), edge.distance);
        check_cnn(&mut r, &format!("{p}.cnn"), &edge.cnn);
    }

    let updates = frames.updates_per_frame;
    for (i, sensor) in spec.sensors.iter().enumerate() {
        let p = format!("sensors.{i}");
        r.positive(&format!("{p}.gen_frequency"), sensor.gen_frequency);
        r.non_negative(&format!("{p}.distance"), sensor.distance);
        if let Some(rate) = sensor.packet_arrival_rate {
            r.non_negative(&format!("{p}.packet_arrival_rate"), rate);
        }
        if let Some(series) = &sensor.distances {
            check_series(&mut r, &format!("{p}.distances"), series, updates);
        }
        if let Some(table) = &sensor.trajectory {
            if table.is_empty() {
                r.error(format!("{p}.trajectory"), "trajectory table is empty");
            }
            for (q, row) in table.iter().enumerate() {
                check_series(&mut r, &format!("{p}.trajectory.{q}"), row, updates);
            }
        }
    }

    for (name, buf) in spec.buffer.classes(&spec.sensors) {
        let p = format!("buffer.{name}");
        if !(buf.arrival_rate > 0.0) {
            r.error(
                format!("{p}.arrival_rate"),
                format!("arrival rate must be positive, got {}", buf.arrival_rate),
            );
        }
        if !(buf.service_rate > buf.arrival_rate) {
            r.error(
                p,
                format!(
                    "unstable queue: service rate {} must exceed arrival rate {}",
                    buf.service_rate, buf.arrival_rate
                ),
            );
        }
    }

    let plan = &spec.offload;
    if plan.local != 0.0 && plan.local != 1.0 {
        r.error("offload.local", format!("local flag must be 0 or 1, got {}", plan.local));
    }
    r.unit_interval("offload.client_share", plan.client_share);
    r.non_negative("offload.local_result_latency", plan.local_result_latency);
    r.non_negative("offload.result_bytes", plan.result_bytes);
    r.non_negative("offload.decode_discount", plan.decode_discount);
    let total = spec.task_total();
    r.positive("offload.task_total", total);
    let share_sum = plan.client_share + spec.edge_shares().iter().sum::<f64>();
    if (share_sum - total).abs() > SHARE_SUM_TOLERANCE {
        r.error(
            "offload.task_total",
            format!("task shares sum to {share_sum} but task_total is {total}"),
        );
    }
    if plan.local == 0.0 && spec.edges.is_empty() {
        r.error("edges", "remote inference requested but no edge server is configured");
    }

    let power = &spec.power;
    r.non_negative("power.base_power", power.base_power);
    if let Some(w) = power.wait_power {
        r.non_negative("power.wait_power", w);
    }
    if !(0.0..1.0).contains(&power.thermal_fraction) {
        r.error(
            "power.thermal_fraction",
            format!("thermal_fraction out of [0,1): {}", power.thermal_fraction),
        );
    }
    for (seg, w) in &power.overrides {
        r.non_negative(&format!("power.overrides.{seg}"), *w);
    }

    regression_domain_warnings(&mut r, spec, coeffs);
    r
}

fn check_cnn(r: &mut ValidationReport, path: &str, cnn: &CnnProfile) {
    r.non_negative(&format!("{path}.depth"), cnn.depth);
    r.positive(&format!("{path}.size"), cnn.size);
    r.non_negative(&format!("{path}.depth_scale"), cnn.depth_scale);
    if cnn.depth > 0.0 && cnn.depth_scale > 0.0 {
        r.warn(
            path,
            "both depth and depth_scale set; networks are normally described by one of them",
        );
    }
}

fn check_series(r: &mut ValidationReport, path: &str, series: &[f64], updates: usize) {
    if series.len() < updates {
        r.error(
            path,
            format!("{} distances for {updates} updates per frame", series.len()),
        );
    }
    if series.iter().any(|d| !(*d >= 0.0)) {
        r.error(path, "distances must be non-negative");
    }
}

fn regression_domain_warnings(r: &mut ValidationReport, spec: &ScenarioSpec, coeffs: &CoefficientSet) {
    let alloc = &spec.device.allocation;
    if alloc.cpu_share < 1.0 && near_nonpositive(&coeffs.compute_gpu, alloc.gpu_clock) {
        r.warn(
            "device.allocation.gpu_clock",
            format!("gpu compute regression near non-positive region at {} GHz", alloc.gpu_clock),
        );
    }
    if alloc.cpu_share > 0.0 && near_nonpositive(&coeffs.compute_cpu, alloc.cpu_clock) {
        r.warn(
            "device.allocation.cpu_clock",
            format!("cpu compute regression near non-positive region at {} GHz", alloc.cpu_clock),
        );
    }
    if (0.0..=1.0).contains(&alloc.cpu_share) {
        let compute = coeffs.compute_resource(alloc);
        if compute.clamped {
            r.warn(
                "device.allocation",
                format!("compute regression is {} (non-positive); clamped", compute.raw),
            );
        }
        let power = coeffs.mean_power(alloc, spec.power.base_power);
        if power.clamped {
            r.warn(
                "device.allocation",
                format!("mean power regression is {} W (negative); clamped to base power", power.raw),
            );
        }
    }
    let raw = coeffs.encoding_latency_raw(&spec.encoder, &spec.frames);
    if raw < 0.0 {
        r.warn("encoder", format!("encoding regression is {raw} (negative); clamped to 0"));
    }
}

/// True when `clock` lies within `REGRESSION_ROOT_MARGIN` of the non-positive
/// interval of a quadratic clock regression over features `[f, f^2]`.
fn near_nonpositive(model: &crate::regression::LinearModel, clock: f64) -> bool {
    let Some((lo, hi)) = model.quadratic_nonpositive_interval() else {
        return model.predict(&[clock, clock * clock]) <= 0.0;
    };
    clock >= lo - REGRESSION_ROOT_MARGIN && clock <= hi + REGRESSION_ROOT_MARGIN
}
