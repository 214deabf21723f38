mod common;

use common::{edge, knobs, rel_close, scenario};
use proptest::prelude::*;
use xrpm::latency::{compose_frame_latency, remote_inference, RemoteEdge};
use xrpm::scenario::EncoderConfig;
use xrpm::Segment;

fn encoder() -> EncoderConfig {
    common::remote_scenario().encoder
}

fn remote_edge() -> impl Strategy<Value = RemoteEdge> {
    (0.0..1.0f64, 1.0..500.0f64, 1e3..1e5f64, 2.5..4.0f64).prop_map(|(w, c, m, cnn)| RemoteEdge {
        task_share: w,
        compute: c,
        memory_bandwidth: m,
        cnn_complexity: cnn,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn idle_edge_changes_nothing(edges in prop::collection::vec(remote_edge(), 1..4), idle in remote_edge(),
                                 en in 1e-3..0.5f64, c in 1.0..40.0f64, at in 0usize..4) {
        let enc = encoder();
        let base = remote_inference(&enc, &edges, en, c, 1.0 / 3.0).unwrap();
        let mut with_idle = edges.clone();
        with_idle.insert(at.min(edges.len()), RemoteEdge { task_share: 0.0, ..idle });
        prop_assert_eq!(remote_inference(&enc, &with_idle, en, c, 1.0 / 3.0).unwrap(), base);
    }

    #[test]
    fn identical_edges_are_interchangeable(e in remote_edge(), a in 0.0..1.0f64, en in 1e-3..0.5f64, c in 1.0..40.0f64) {
        let enc = encoder();
        let first = RemoteEdge { task_share: a, ..e };
        let second = RemoteEdge { task_share: 1.0 - a, ..e };
        let forward = remote_inference(&enc, &[first, second], en, c, 1.0 / 3.0).unwrap();
        let backward = remote_inference(&enc, &[second, first], en, c, 1.0 / 3.0).unwrap();
        prop_assert_eq!(forward, backward);

        // an even split over two identical servers costs the same as one server at half load
        let half = RemoteEdge { task_share: 0.5, ..e };
        let split = remote_inference(&enc, &[half, half], en, c, 1.0 / 3.0).unwrap();
        let single = remote_inference(&enc, &[half], en, c, 1.0 / 3.0).unwrap();
        prop_assert!(rel_close(split, single, 1e-12));
    }

    #[test]
    fn idle_edge_in_scenario_leaves_total_unchanged(k in knobs(), far in 0.0..1e4f64) {
        let spec = scenario(&k, false);
        let mut padded = spec.clone();
        padded.edges.push(edge(0.0, far));
        let a = compose_frame_latency(&spec, 0).unwrap();
        let b = compose_frame_latency(&padded, 0).unwrap();
        prop_assert_eq!(a.total, b.total);
        prop_assert_eq!(a.get(Segment::Transmission), b.get(Segment::Transmission));
    }

    #[test]
    fn more_load_on_an_edge_never_helps(e in remote_edge(), a in 0.0..1.0f64, d in 0.0..0.5f64,
                                        en in 1e-3..0.5f64, c in 1.0..40.0f64) {
        let enc = encoder();
        let low = remote_inference(&enc, &[RemoteEdge { task_share: a * (1.0 - d), ..e }], en, c, 1.0 / 3.0).unwrap();
        let high = remote_inference(&enc, &[RemoteEdge { task_share: a, ..e }], en, c, 1.0 / 3.0).unwrap();
        prop_assert!(low <= high);
    }
}

#[test]
fn no_edges_is_an_error() {
    assert!(remote_inference(&encoder(), &[], 0.01, 10.0, 1.0 / 3.0).is_err());
}
