use std::fmt::Write as _;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use xrpm::aoi::{mean_sojourn, sensor_samples};
use xrpm::energy::compose_with_power;
use xrpm::evaluate::{compare_aoi, compare_mm1, evaluate_frames, relative_error, Comparison, FrameResult};
use xrpm::latency::{compose_resolved, ResolvedDevice};
use xrpm::regression::{fit_linear_model, fit_slot, ModelSlot, ObservationTable};
use xrpm::scenario::{validate_scenario_with, BufferConfig, ScenarioSpec};
use xrpm::segment::Segment;
use xrpm::simoracle::{
    simulate_aoi, simulate_mm1, AgePolicy, AoiSimConfig, Mm1Config, Mm1Stats, SimSensor, SojournMode,
};
use xrpm::warning;
use xrpm::{CoefficientSet, LinearModel};

use crate::output::{self, csv_num, report_num, Csv};
use crate::sweep::{parse_range, parse_values, set_path, SweepSpec};
use crate::{BufferClass, CliError, Common, Policy, SimMode};

const DEFAULT_MM1_CUSTOMERS: usize = 100_000;

fn load_scenario(path: &Path) -> Result<ScenarioSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ScenarioSpec::from_json_str(&text).map_err(|e| CliError::io(path, e))
}

fn load_coefficients(common: &Common) -> Result<CoefficientSet, CliError> {
    let set = CoefficientSet::resolve(&common.coefficients, &common.registry)
        .map_err(|e| CliError::Input(e.to_string()))?;
    set.check().map_err(|e| CliError::Model(format!("coefficient set `{}`: {e}", set.name)))?;
    Ok(set)
}

fn prepare_out(common: &Common) -> Result<PathBuf, CliError> {
    let dir = common.out_dir();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Prints every issue and fails with a model error if any is an error.
fn require_valid(spec: &ScenarioSpec, coeffs: &CoefficientSet) -> Result<(), CliError> {
    let report = validate_scenario_with(spec, coeffs);
    for issue in &report.issues {
        eprintln!("{issue}");
    }
    let errors = report.errors().count();
    if errors > 0 {
        return Err(CliError::Model(format!("scenario has {errors} validation error(s)")));
    }
    Ok(())
}

pub fn validate(scenario: &Path, common: &Common) -> Result<(), CliError> {
    let spec = load_scenario(scenario)?;
    let coeffs = load_coefficients(common)?;
    let report = validate_scenario_with(&spec, &coeffs);
    print!("{report}");
    let errors = report.errors().count();
    if errors > 0 {
        return Err(CliError::Model(format!("scenario has {errors} validation error(s)")));
    }
    println!("ok ({} warning(s))", report.warnings().count());
    Ok(())
}

fn parse_frames(text: Option<&str>, frame_count: usize) -> Result<Range<usize>, CliError> {
    let Some(text) = text else {
        return Ok(0..frame_count);
    };
    let bad = || CliError::Input(format!("frame range `{text}` must look like a..b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a >= b {
        return Err(bad());
    }
    Ok(a..b)
}

pub fn evaluate(scenario: &Path, frames: Option<&str>, common: &Common) -> Result<(), CliError> {
    let spec = load_scenario(scenario)?;
    let coeffs = load_coefficients(common)?;
    let range = parse_frames(frames, spec.frames.frame_count)?;
    require_valid(&spec, &coeffs)?;
    let results = evaluate_frames(&spec, &coeffs, range)?;
    let out = prepare_out(common)?;

    let mut latency = Csv::create(&out, "latency.csv", &output::latency_header())?;
    let mut energy = Csv::create(&out, "energy.csv", &output::energy_header())?;
    let mut aoi = Csv::create(&out, "aoi.csv", &output::aoi_header())?;
    let mut aoi_summary = Csv::create(&out, "aoi_summary.csv", &output::aoi_summary_header())?;
    for r in &results {
        latency.row(&output::latency_row(&r.latency))?;
        energy.row(&output::energy_row(&r.energy))?;
        for row in output::aoi_rows(&r.aoi) {
            aoi.row(&row)?;
        }
        for row in output::aoi_summary_rows(&r.aoi) {
            aoi_summary.row(&row)?;
        }
    }
    latency.finish()?;
    energy.finish()?;
    aoi.finish()?;
    aoi_summary.finish()?;

    let summary = summary_text(&spec, &coeffs, &results);
    write_file(&out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn summary_text(spec: &ScenarioSpec, coeffs: &CoefficientSet, results: &[FrameResult]) -> String {
    let local = spec.offload.is_local();
    let mut s = String::new();
    let _ = writeln!(s, "coefficients: {}", coeffs.name);
    let _ = writeln!(s, "mode: {}", if local { "local" } else { "remote" });
    let included: Vec<&str> = Segment::ALL
        .iter()
        .filter(|seg| seg.gate(local, spec.offload.include_coop) != 0.0)
        .map(|seg| seg.short_name())
        .collect();
    let excluded: Vec<&str> = Segment::ALL
        .iter()
        .filter(|seg| seg.gate(local, spec.offload.include_coop) == 0.0)
        .map(|seg| seg.short_name())
        .collect();
    let _ = writeln!(s, "included segments: {}", included.join(","));
    let _ = writeln!(s, "excluded segments: {}", excluded.join(","));
    for r in results {
        let _ = writeln!(
            s,
            "frame {}: latency {} ms, energy {} mJ",
            r.latency.frame,
            report_num(r.latency.total * 1e3),
            report_num(r.energy.total * 1e3)
        );
        for sensor in &r.aoi.sensors {
            let roi = sensor.relevance.map_or("undefined".to_string(), |rel| report_num(rel.roi));
            let _ = writeln!(s, "  {}: aoi {} ms, roi {}", sensor.id, report_num(sensor.average * 1e3), roi);
        }
        let mut warnings = r.latency.warnings.clone();
        warnings.extend(r.energy.warnings.iter().cloned());
        warnings.extend(r.aoi.warnings.iter().cloned());
        if !warnings.is_empty() {
            let _ = writeln!(s, "  warnings: {}", warning::join(&warnings));
        }
    }
    if let (Some(first), Some(last)) = (results.first(), results.last()) {
        let n = results.len() as f64;
        let mean_l = results.iter().map(|r| r.latency.total).sum::<f64>() / n;
        let mean_e = results.iter().map(|r| r.energy.total).sum::<f64>() / n;
        let _ = writeln!(
            s,
            "frames {}..{}: mean latency {} ms, mean energy {} mJ",
            first.latency.frame,
            last.latency.frame + 1,
            report_num(mean_l * 1e3),
            report_num(mean_e * 1e3)
        );
    }
    s
}

fn sweep_header() -> Vec<String> {
    let mut h = vec!["value".to_string(), "c_client".to_string()];
    h.extend(Segment::ALL.iter().map(|s| format!("{}_ms", s.short_name())));
    h.extend(["total_ms", "energy_total_mj", "warnings"].map(String::from));
    h
}

fn sweep_point(doc: &serde_json::Value, sweep: &SweepSpec, value: f64, frame: usize, coeffs: &CoefficientSet) -> Result<Vec<String>, CliError> {
    let mut doc = doc.clone();
    set_path(&mut doc, &sweep.path, value)?;
    let spec = ScenarioSpec::from_json_value(doc)
        .map_err(|e| CliError::Input(format!("{} = {value}: {e}", sweep.path)))?;
    let report = validate_scenario_with(&spec, coeffs);
    if report.has_errors() {
        let msgs: Vec<String> = report.errors().map(ToString::to_string).collect();
        return Err(CliError::Model(format!("{} = {value}: {}", sweep.path, msgs.join("; "))));
    }
    let device = ResolvedDevice::resolve(&spec, coeffs);
    let power = coeffs.mean_power(&spec.device.allocation, spec.power.base_power);
    let latency = compose_resolved(&spec, frame, coeffs, &device)?;
    let energy = compose_with_power(&spec, &latency, power);

    let mut row = vec![csv_num(value), csv_num(device.compute.value)];
    row.extend(Segment::ALL.iter().map(|s| csv_num(latency.get(*s) * 1e3)));
    row.push(csv_num(latency.total * 1e3));
    row.push(csv_num(energy.total * 1e3));
    let mut warnings = latency.warnings.clone();
    warnings.extend(energy.warnings.iter().cloned());
    row.push(warning::join(&warnings));
    Ok(row)
}

pub fn sweep(
    scenario: &Path,
    param: &str,
    values: Option<&str>,
    range: Option<&str>,
    frame: usize,
    common: &Common,
) -> Result<(), CliError> {
    let points = match (values, range) {
        (Some(v), _) => parse_values(v)?,
        (None, Some(r)) => parse_range(r)?,
        (None, None) => Vec::new(),
    };
    let sweep = SweepSpec::new(param, points)?;
    let text = fs::read_to_string(scenario).map_err(|e| CliError::io(scenario, e))?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::io(scenario, e))?;
    let coeffs = load_coefficients(common)?;

    let rows: Vec<Result<Vec<String>, CliError>> = sweep
        .values
        .par_iter()
        .map(|v| sweep_point(&doc, &sweep, *v, frame, &coeffs))
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let out = prepare_out(common)?;
    let mut csv = Csv::create(&out, "sweep.csv", &sweep_header())?;
    for row in &rows {
        csv.row(row)?;
    }
    let path = csv.finish()?;
    println!("{} point(s) written to {}", rows.len(), path.display());
    Ok(())
}

pub struct SimulateArgs {
    pub mode: SimMode,
    pub seed: u64,
    pub horizon: Option<usize>,
    pub buffer: BufferClass,
    pub warmup: usize,
    pub policy: Policy,
    pub stochastic: bool,
    pub frame: usize,
    pub event_log: bool,
}

#[derive(Serialize)]
struct Mm1Report<'a> {
    buffer: &'a str,
    arrival_rate: f64,
    service_rate: f64,
    seed: u64,
    stats: &'a Mm1Stats,
}

pub fn simulate(scenario: &Path, args: &SimulateArgs, common: &Common) -> Result<(), CliError> {
    let spec = load_scenario(scenario)?;
    let coeffs = load_coefficients(common)?;
    match args.mode {
        SimMode::Mm1 => simulate_queue(&spec, args, common),
        SimMode::Aoi => simulate_ages(&spec, &coeffs, args, common),
    }
}

fn simulate_queue(spec: &ScenarioSpec, args: &SimulateArgs, common: &Common) -> Result<(), CliError> {
    let name = match args.buffer {
        BufferClass::Frame => "frame",
        BufferClass::Volumetric => "volumetric",
        BufferClass::External => "external",
    };
    let buffer: BufferConfig = spec
        .buffer
        .classes(&spec.sensors)
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, b)| b)
        .expect("every buffer class is present");
    // rejects μ ≤ λ before the simulator would run forever
    mean_sojourn(&buffer).map_err(|_| {
        CliError::from(xrpm::Error::UnstableQueue {
            buffer: name.into(),
            arrival_rate: buffer.arrival_rate,
            service_rate: buffer.service_rate,
        })
    })?;
    let customers = args.horizon.unwrap_or(DEFAULT_MM1_CUSTOMERS);
    if customers <= args.warmup {
        return Err(CliError::Input(format!("horizon {customers} must exceed warmup {}", args.warmup)));
    }
    let mut stats = simulate_mm1(&Mm1Config {
        arrival_rate: buffer.arrival_rate,
        service_rate: buffer.service_rate,
        customers,
        seed: args.seed,
        warmup: args.warmup,
        record_events: args.event_log,
    });
    let comparison = compare_mm1(&buffer, &stats)?;
    let timeline = stats.timeline.take();

    let out = prepare_out(common)?;
    let report = Mm1Report {
        buffer: name,
        arrival_rate: buffer.arrival_rate,
        service_rate: buffer.service_rate,
        seed: args.seed,
        stats: &stats,
    };
    write_json(&out.join("sim_stats.json"), &report)?;
    write_comparisons(&out, std::slice::from_ref(&comparison))?;
    if let Some(t) = timeline {
        write_events(&out, &t)?;
    }
    println!(
        "mean sojourn: analytic {} s, simulated {} s, relative error {}",
        report_num(comparison.analytic),
        report_num(comparison.simulated),
        report_num(comparison.relative_error)
    );
    Ok(())
}

fn simulate_ages(spec: &ScenarioSpec, coeffs: &CoefficientSet, args: &SimulateArgs, common: &Common) -> Result<(), CliError> {
    if spec.sensors.is_empty() {
        return Err(CliError::Input("scenario has no external sensors".into()));
    }
    require_valid(spec, coeffs)?;
    // the frame's own evaluation fixes the request frequency and mean sojourn
    let frame = evaluate_frames(spec, coeffs, args.frame..args.frame + 1)?
        .pop()
        .expect("one frame evaluated");
    let updates = args.horizon.unwrap_or(frame.aoi.updates);
    if updates == 0 {
        return Err(CliError::from(xrpm::Error::EmptyUpdates));
    }
    let f_req = frame.aoi.request_frequency;
    let sojourn = frame.aoi.sojourn;
    let c = spec.network.propagation_speed;
    let external = spec.buffer.external_resolved(&spec.sensors);

    let cfg = AoiSimConfig {
        sensors: spec
            .sensors
            .iter()
            .enumerate()
            .map(|(m, s)| SimSensor::from_profile(s, m, args.frame, updates))
            .collect(),
        request_frequency: f_req,
        updates,
        propagation_speed: c,
        sojourn: if args.stochastic {
            SojournMode::Stochastic { arrival_rate: external.arrival_rate, service_rate: external.service_rate }
        } else {
            SojournMode::Fixed { sojourn }
        },
        policy: match args.policy {
            Policy::PaperMapping => AgePolicy::PaperMapping,
            Policy::FreshestAvailable => AgePolicy::FreshestAvailable,
        },
        seed: args.seed,
        record_events: args.event_log,
    };
    let mut result = simulate_aoi(&cfg);
    let timeline = result.timeline.take();

    let analytic: Vec<Vec<f64>> = spec
        .sensors
        .iter()
        .map(|s| sensor_samples(s, args.frame, updates, f_req, sojourn, c))
        .collect();
    let ids: Vec<String> = cfg.sensors.iter().map(|s| s.id.clone()).collect();
    let mut comparisons = vec![Comparison {
        quantity: "mean_sojourn".into(),
        analytic: sojourn,
        simulated: result.mean_sojourn,
        relative_error: relative_error(sojourn, result.mean_sojourn),
        max_abs_deviation: None,
    }];
    comparisons.extend(compare_aoi(&analytic, &result, &ids));

    let out = prepare_out(common)?;
    write_json(&out.join("sim_stats.json"), &serde_json::json!({
        "frame": args.frame,
        "updates": updates,
        "request_frequency": f_req,
        "seed": args.seed,
        "config": &cfg,
        "result": &result,
    }))?;
    write_comparisons(&out, &comparisons)?;
    if let Some(t) = timeline {
        write_events(&out, &t)?;
    }
    for c in &comparisons {
        println!(
            "{}: analytic {}, simulated {}, relative error {}",
            c.quantity,
            report_num(c.analytic),
            report_num(c.simulated),
            report_num(c.relative_error)
        );
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    write_file(path, &(text + "\n"))
}

fn write_comparisons(out: &Path, rows: &[Comparison]) -> Result<(), CliError> {
    let mut csv = Csv::create(out, "comparison.csv", &output::comparison_header())?;
    for c in rows {
        csv.row(&output::comparison_row(c))?;
    }
    csv.finish()?;
    Ok(())
}

fn write_events(out: &Path, timeline: &xrpm::simoracle::EventTimeline) -> Result<(), CliError> {
    let path = out.join("events.ndjson");
    let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    timeline
        .write_ndjson(std::io::BufWriter::new(file))
        .map_err(|e| CliError::io(&path, e))
}

#[derive(Serialize)]
struct FitReport<'a> {
    model: &'a str,
    target: &'a str,
    observations: usize,
    fit: &'a LinearModel,
}

pub fn fit(csv: &Path, model: &str, target: &str, register: Option<&str>, common: &Common) -> Result<(), CliError> {
    let table = ObservationTable::from_csv_path(csv).map_err(|e| CliError::io(csv, e))?;
    let slot = if model == "generic" {
        None
    } else {
        Some(model.parse::<ModelSlot>().map_err(|e| CliError::Input(e.to_string()))?)
    };
    let fitted = match slot {
        Some(slot) => fit_slot(&table, slot, target)?,
        None => fit_linear_model(&table, target)?,
    };

    println!("{model}: {} observation(s)", table.rows.len());
    println!("intercept = {}", csv_num(fitted.intercept));
    for (name, w) in fitted.feature_names.iter().zip(&fitted.coefficients) {
        println!("{name} = {}", csv_num(*w));
    }
    if let Some(r2) = fitted.r_squared {
        println!("r_squared = {}", csv_num(r2));
    }

    let out = prepare_out(common)?;
    write_json(
        &out.join(format!("fit_{model}.json")),
        &FitReport { model, target, observations: table.rows.len(), fit: &fitted },
    )?;

    if let Some(name) = register {
        let slot = slot.ok_or_else(|| {
            CliError::Input("--register needs a registry slot, not `generic`".into())
        })?;
        let base = load_coefficients(common)?;
        let set = base.with_model(name, slot, fitted);
        let path = set.save(&common.registry).map_err(|e| CliError::io(&common.registry, e))?;
        println!("registered `{name}` at {}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_ranges() {
        assert_eq!(parse_frames(None, 4).unwrap(), 0..4);
        assert_eq!(parse_frames(Some("1..3"), 4).unwrap(), 1..3);
        assert!(parse_frames(Some("3..3"), 4).is_err());
        assert!(parse_frames(Some("3"), 4).is_err());
    }
}
