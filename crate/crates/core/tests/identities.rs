mod common;

use common::{knobs, rel_close, scenario};
use proptest::prelude::*;
use xrpm::energy::{compose_frame_energy, compose_with_power};
use xrpm::latency::{compose_frame_latency, decoding_latency};
use xrpm::regression::Clamped;
use xrpm::Segment;

const TOL: f64 = 1e-12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn decoding_identity(en in 1e-4..1.0f64, c in 0.1..50.0f64, ratio in 1.0..40.0f64, gamma in 0.05..1.0f64) {
        let c_edge = ratio * c;
        let dec = decoding_latency(en, c, c_edge, gamma);
        prop_assert!(rel_close(dec * c_edge, en * c * gamma, TOL));
    }

    #[test]
    fn breakdowns_resum_to_totals(k in knobs(), local in any::<bool>()) {
        let spec = scenario(&k, local);
        let lat = compose_frame_latency(&spec, 0).unwrap();
        let en = compose_frame_energy(&spec, &lat);
        let lat_sum: f64 = lat.segments.iter().map(|(_, v)| v).sum();
        prop_assert!(rel_close(lat.total, lat_sum, TOL));
        prop_assert!(rel_close(lat.total, lat.recomputed_total(), TOL));
        let en_sum: f64 = en.segments.iter().map(|(_, v)| v).sum::<f64>() + en.thermal + en.base;
        prop_assert!(rel_close(en.total, en_sum, TOL));
        prop_assert!(rel_close(en.total, en.recomputed_total(), TOL));
    }

    #[test]
    fn constant_power_identity(k in knobs(), local in any::<bool>(), p in 0.5..10.0f64) {
        let mut spec = scenario(&k, local);
        spec.power.thermal_fraction = 0.0;
        spec.power.base_power = 0.0;
        spec.power.wait_power = Some(p);
        let lat = compose_frame_latency(&spec, 0).unwrap();
        let en = compose_with_power(&spec, &lat, Clamped { value: p, raw: p, clamped: false });
        prop_assert!(rel_close(en.total, p * lat.total, TOL));
    }

    #[test]
    fn idle_segments_use_wait_power(k in knobs()) {
        let spec = scenario(&k, false);
        let lat = compose_frame_latency(&spec, 0).unwrap();
        let en = compose_frame_energy(&spec, &lat);
        let wait = spec.power.resolved_wait_power();
        for seg in [Segment::RemoteInference, Segment::Transmission, Segment::Handoff] {
            prop_assert!(rel_close(en.get(seg), wait * lat.get(seg), TOL));
        }
    }
}

#[test]
fn energy_is_linear_in_thermal_fraction() {
    let k = common::Knobs {
        cpu_clock: 2.0,
        gpu_clock: 1.0,
        cpu_share: 0.5,
        bandwidth: 2e4,
        throughput: 100.0,
        frame_bytes: 5.0,
        edge_distance: 100.0,
        edge_share: 0.5,
        include_coop: false,
        base_power: 1.0,
    };
    let mut spec = scenario(&k, false);
    spec.power.thermal_fraction = 0.0;
    let lat = compose_frame_latency(&spec, 0).unwrap();
    let e0 = compose_frame_energy(&spec, &lat);
    spec.power.thermal_fraction = 0.1;
    let e1 = compose_frame_energy(&spec, &lat);
    assert!(rel_close(e1.total - e0.total, 0.1 * e0.subtotal(), TOL));
}
