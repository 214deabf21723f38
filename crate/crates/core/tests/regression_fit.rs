mod common;

use common::rel_close;
use proptest::prelude::*;
use xrpm::regression::{
    fit_design, fit_linear_model, fit_slot, mean_power, ModelSlot, ObservationTable,
};
use xrpm::scenario::{CnnProfile, ComputeAllocation};
use xrpm::{CoefficientSet, Error};

/// Noiseless observations of `slot` under the built-in coefficients.
fn synthetic(slot: ModelSlot, rows: usize) -> ObservationTable {
    let paper = CoefficientSet::paper();
    let model = paper.slot(slot);
    let raw_cols = slot.raw_columns();
    let mut columns: Vec<String> = raw_cols.iter().map(|c| c.to_string()).collect();
    columns.push("y".into());
    let data = (0..rows)
        .map(|i| {
            // distinct, well spread values per column
            let raw: Vec<f64> = (0..raw_cols.len())
                .map(|j| 0.5 + ((i * (2 * j + 3) + j * 7) % 37) as f64 * 0.13 + (i as f64 * 0.017).sin())
                .collect();
            let y = model.predict(&slot.features(&raw));
            raw.into_iter().chain([y]).collect()
        })
        .collect();
    ObservationTable::new(columns, data)
}

#[test]
fn recovers_every_built_in_model() {
    let paper = CoefficientSet::paper();
    for slot in ModelSlot::ALL {
        let fitted = fit_slot(&synthetic(slot, 60), slot, "y").unwrap();
        let truth = paper.slot(slot);
        assert!(rel_close(fitted.intercept, truth.intercept, 1e-6), "{slot}: {fitted}");
        for (a, b) in fitted.coefficients.iter().zip(&truth.coefficients) {
            assert!(rel_close(*a, *b, 1e-6), "{slot}: {fitted}");
        }
        assert!((fitted.r_squared.unwrap() - 1.0).abs() < 1e-9, "{slot}");
    }
}

#[test]
fn fitted_coefficients_are_a_local_optimum_of_r_squared() {
    let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 * 0.1, ((i * 7) % 11) as f64]).collect();
    let y: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, r)| 1.0 + 2.0 * r[0] - 0.5 * r[1] + ((i * 13) % 5) as f64 * 0.1)
        .collect();
    let names = vec!["a".to_string(), "b".to_string()];
    let fit = fit_design(&x, &y, names).unwrap();
    let sse = |b0: f64, b: &[f64]| -> f64 {
        x.iter().zip(&y).map(|(r, t)| (t - b0 - b[0] * r[0] - b[1] * r[1]).powi(2)).sum()
    };
    let best = sse(fit.intercept, &fit.coefficients);
    for k in 0..3 {
        for h in [1e-4, -1e-4] {
            let mut b0 = fit.intercept;
            let mut b = fit.coefficients.clone();
            if k == 0 {
                b0 += h;
            } else {
                b[k - 1] += h;
            }
            assert!(sse(b0, &b) >= best);
        }
    }
    assert!(fit.r_squared.unwrap() < 1.0 && fit.r_squared.unwrap() > 0.9);
}

#[test]
fn collinear_columns_are_rejected() {
    let table = ObservationTable::new(
        vec!["a".into(), "b".into(), "y".into()],
        (0..6).map(|i| vec![i as f64, 2.0 * i as f64, 3.0 * i as f64 + 1.0]).collect(),
    );
    assert!(matches!(fit_linear_model(&table, "y"), Err(Error::RankDeficient { .. })));
}

#[test]
fn too_few_rows_are_rejected() {
    let table = ObservationTable::new(vec!["a".into(), "y".into()], vec![vec![1.0, 2.0]]);
    assert!(matches!(fit_linear_model(&table, "y"), Err(Error::InsufficientData { .. })));
    assert!(matches!(fit_linear_model(&table, "z"), Err(Error::UnknownColumn(_))));
}

#[test]
fn csv_round_trip_through_registry() {
    let dir = tempfile::tempdir().unwrap();
    let table = synthetic(ModelSlot::ComputeCpu, 12);
    let mut text = table.columns.join(",") + "\n";
    for row in &table.rows {
        text += &row.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
        text += "\n";
    }
    let parsed = ObservationTable::from_csv_reader(text.as_bytes()).unwrap();
    let model = fit_slot(&parsed, ModelSlot::ComputeCpu, "y").unwrap();
    let set = CoefficientSet::paper().with_model("refit", ModelSlot::ComputeCpu, model);
    set.save(dir.path()).unwrap();
    let loaded = CoefficientSet::resolve("refit", dir.path()).unwrap();
    assert_eq!(loaded, set);
    loaded.check().unwrap();
}

proptest! {
    #[test]
    fn power_and_compute_are_affine_in_cpu_share(fc in 1.0..3.0f64, fg in 0.1..2.0f64, w in 0.0..=1.0f64) {
        let paper = CoefficientSet::paper();
        let at = |share| ComputeAllocation { cpu_clock: fc, gpu_clock: fg, cpu_share: share };
        let expect_c = w * paper.compute_resource(&at(1.0)).raw + (1.0 - w) * paper.compute_resource(&at(0.0)).raw;
        prop_assert!((paper.compute_resource(&at(w)).raw - expect_c).abs() < 1e-9);
        let expect_p = w * paper.mean_power_raw(&at(1.0)) + (1.0 - w) * paper.mean_power_raw(&at(0.0));
        prop_assert!((paper.mean_power_raw(&at(w)) - expect_p).abs() < 1e-9);
    }

    #[test]
    fn cnn_complexity_grows_with_each_input(d in 0.0..500.0f64, s in 0.0..500.0f64, k in 0.0..10.0f64, step in 0.1..50.0f64) {
        let c = |d, s, k| xrpm::regression::cnn_complexity(&CnnProfile { depth: d, size: s, depth_scale: k });
        let base = c(d, s, k);
        prop_assert!(c(d + step, s, k) > base);
        prop_assert!(c(d, s + step, k) > base);
        prop_assert!(c(d, s, k + step) > base);
    }

    #[test]
    fn power_never_drops_below_base(fc in 0.0..4.0f64, fg in 0.0..2.0f64, w in 0.0..=1.0f64, base in 0.0..5.0f64) {
        let p = mean_power(&ComputeAllocation { cpu_clock: fc, gpu_clock: fg, cpu_share: w }, base);
        prop_assert!(p.value >= 0.0);
        prop_assert_eq!(p.clamped, p.raw < 0.0);
        if p.clamped {
            prop_assert_eq!(p.value, base);
        }
    }
}
