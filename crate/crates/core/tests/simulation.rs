use xrpm::aoi::mean_sojourn;
use xrpm::scenario::BufferConfig;
use xrpm::simoracle::{simulate_aoi, simulate_mm1, AgePolicy, AoiSimConfig, Mm1Config, SimSensor, SojournMode};

fn mm1(customers: usize, seed: u64) -> f64 {
    simulate_mm1(&Mm1Config {
        arrival_rate: 50.0,
        service_rate: 100.0,
        customers,
        seed,
        warmup: 0,
        record_events: false,
    })
    .mean_sojourn
}

#[test]
fn mm1_sojourn_converges_to_analytic_mean() {
    let target = mean_sojourn(&BufferConfig { arrival_rate: 50.0, service_rate: 100.0 }).unwrap();
    let err = |n, seed| (mm1(n, seed) - target).abs() / target;
    assert!(err(1_000_000, 42) < 0.02);
    // the long run is at least as close, averaged over a few seeds
    let short: f64 = (1..=4).map(|s| err(10_000, s)).sum::<f64>() / 4.0;
    let long: f64 = (1..=4).map(|s| err(1_000_000, s)).sum::<f64>() / 4.0;
    assert!(long < short, "short {short}, long {long}");
}

#[test]
fn same_seed_same_result() {
    assert_eq!(mm1(5_000, 9), mm1(5_000, 9));
    assert_ne!(mm1(5_000, 9), mm1(5_000, 10));
}

#[test]
fn stochastic_sojourn_mean_matches_queue_law() {
    let cfg = AoiSimConfig {
        sensors: vec![SimSensor { id: "s".into(), gen_frequency: 100.0, distances: vec![0.0] }],
        request_frequency: 100.0,
        updates: 100_000,
        propagation_speed: 299_792_458.0,
        sojourn: SojournMode::Stochastic { arrival_rate: 300.0, service_rate: 800.0 },
        policy: AgePolicy::PaperMapping,
        seed: 5,
        record_events: false,
    };
    let sim = simulate_aoi(&cfg);
    let target = 1.0 / 500.0;
    assert!((sim.mean_sojourn - target).abs() / target < 0.02, "{}", sim.mean_sojourn);
}

#[test]
fn freshest_policy_never_reports_older_information() {
    let base = AoiSimConfig {
        sensors: vec![SimSensor { id: "s".into(), gen_frequency: 300.0, distances: vec![10.0] }],
        request_frequency: 100.0,
        updates: 50,
        propagation_speed: 299_792_458.0,
        sojourn: SojournMode::Fixed { sojourn: 0.002 },
        policy: AgePolicy::FreshestAvailable,
        seed: 1,
        record_events: false,
    };
    let sim = simulate_aoi(&base);
    for age in sim.sensors[0].samples.iter().flatten() {
        assert!(*age >= 0.0 && *age <= 1.0 / 300.0 + 0.002 + 1e-9, "{age}");
    }
}
