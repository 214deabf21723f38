#![allow(dead_code)]

use proptest::prelude::*;
use xrpm::scenario::{CnnProfile, EdgeProfile, ScenarioSpec};

pub fn remote_scenario() -> ScenarioSpec {
    ScenarioSpec::from_json_str(include_str!("../../../../scenarios/remote.json")).unwrap()
}

pub fn local_scenario() -> ScenarioSpec {
    ScenarioSpec::from_json_str(include_str!("../../../../scenarios/local.json")).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Knobs varied by the randomized suites. Clock ranges keep both compute
/// regressions positive so nothing is clamped.
#[derive(Debug, Clone)]
pub struct Knobs {
    pub cpu_clock: f64,
    pub gpu_clock: f64,
    pub cpu_share: f64,
    pub bandwidth: f64,
    pub throughput: f64,
    pub frame_bytes: f64,
    pub edge_distance: f64,
    pub edge_share: f64,
    pub include_coop: bool,
    pub base_power: f64,
}

pub fn knobs() -> impl Strategy<Value = Knobs> {
    (
        1.0..3.0f64,
        prop_oneof![0.2..0.6f64, 0.8..1.5f64],
        0.0..=1.0f64,
        1e3..1e5f64,
        10.0..1e3f64,
        0.5..20.0f64,
        0.0..2e3f64,
        0.05..1.0f64,
        any::<bool>(),
        0.0..3.0f64,
    )
        .prop_map(|t| Knobs {
            cpu_clock: t.0,
            gpu_clock: t.1,
            cpu_share: t.2,
            bandwidth: t.3,
            throughput: t.4,
            frame_bytes: t.5,
            edge_distance: t.6,
            edge_share: t.7,
            include_coop: t.8,
            base_power: t.9,
        })
}

pub fn edge(share: f64, distance: f64) -> EdgeProfile {
    EdgeProfile {
        compute: None,
        memory_bandwidth: 51200.0,
        cnn: CnnProfile { depth: 106.0, size: 210.0, depth_scale: 0.0 },
        task_share: share,
        distance,
    }
}

/// Scenario built from `k`, with inference local when `local` is set.
pub fn scenario(k: &Knobs, local: bool) -> ScenarioSpec {
    let mut s = remote_scenario();
    s.device.allocation.cpu_clock = k.cpu_clock;
    s.device.allocation.gpu_clock = k.gpu_clock;
    s.device.allocation.cpu_share = k.cpu_share;
    s.device.memory_bandwidth = k.bandwidth;
    s.network.throughput = k.throughput;
    s.frames.frame_bytes = k.frame_bytes;
    s.offload.include_coop = k.include_coop;
    s.power.base_power = k.base_power;
    if local {
        s.edges.clear();
        s.offload.local = 1.0;
        s.offload.client_share = 1.0;
    } else {
        s.edges = vec![edge(k.edge_share, k.edge_distance), edge(1.0 - k.edge_share, 2.0 * k.edge_distance)];
        s.offload.local = 0.0;
        s.offload.client_share = 0.0;
    }
    s
}
