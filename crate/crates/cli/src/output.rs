use std::fs;
use std::path::{Path, PathBuf};

use xrpm::aoi::AoiReport;
use xrpm::energy::EnergyBreakdown;
use xrpm::evaluate::Comparison;
use xrpm::latency::LatencyBreakdown;
use xrpm::segment::Segment;
use xrpm::warning;

use crate::CliError;

/// Significant digits in CSV cells.
pub const CSV_DIGITS: usize = 9;
/// Significant digits in human-readable reports.
pub const REPORT_DIGITS: usize = 4;

const MS: f64 = 1e3;
const MJ: f64 = 1e3;

/// Formats `x` with `digits` significant digits, switching to exponent
/// notation for very small or very large magnitudes.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // round first so the exponent reflects the printed mantissa
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if exp < -4 || exp >= digits as i32 {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub fn csv_num(x: f64) -> String {
    sig(x, CSV_DIGITS)
}

pub fn report_num(x: f64) -> String {
    sig(x, REPORT_DIGITS)
}

pub struct Csv {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Csv {
    pub fn create(dir: &Path, name: &str, header: &[String]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let mut writer = csv::Writer::from_path(&path).map_err(|e| CliError::io(&path, e))?;
        writer.write_record(header).map_err(|e| CliError::io(&path, e))?;
        Ok(Self { path, writer })
    }

    pub fn row(&mut self, cells: &[String]) -> Result<(), CliError> {
        self.writer.write_record(cells).map_err(|e| CliError::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

pub fn latency_header() -> Vec<String> {
    let mut h = vec!["q".to_string()];
    h.extend(Segment::ALL.iter().map(|s| format!("{s}_ms")));
    h.push("total_ms".into());
    h.push("warnings".into());
    h
}

pub fn latency_row(b: &LatencyBreakdown) -> Vec<String> {
    let mut r = vec![b.frame.to_string()];
    r.extend(Segment::ALL.iter().map(|&s| csv_num(b.get(s) * MS)));
    r.push(csv_num(b.total * MS));
    r.push(warning::join(&b.warnings));
    r
}

pub fn energy_header() -> Vec<String> {
    let mut h = vec!["q".to_string()];
    h.extend(Segment::ALL.iter().map(|s| format!("{s}_mj")));
    h.extend(["thermal_mj", "base_mj", "total_mj", "warnings"].map(String::from));
    h
}

pub fn energy_row(e: &EnergyBreakdown) -> Vec<String> {
    let mut r = vec![e.frame.to_string()];
    r.extend(Segment::ALL.iter().map(|&s| csv_num(e.get(s) * MJ)));
    r.push(csv_num(e.thermal * MJ));
    r.push(csv_num(e.base * MJ));
    r.push(csv_num(e.total * MJ));
    r.push(warning::join(&e.warnings));
    r
}

pub fn aoi_header() -> Vec<String> {
    ["q", "sensor", "n", "t_sample_ms", "flags"].map(String::from).to_vec()
}

pub fn aoi_rows(report: &AoiReport) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for s in &report.sensors {
        for (i, (t, clamped)) in s.samples.iter().zip(&s.clamped).enumerate() {
            rows.push(vec![
                report.frame.to_string(),
                s.id.clone(),
                (i + 1).to_string(),
                csv_num(t * MS),
                if *clamped {
                    format!("clamped(raw_ms={})", csv_num(s.raw_samples[i] * MS))
                } else {
                    String::new()
                },
            ]);
        }
    }
    rows
}

pub fn aoi_summary_header() -> Vec<String> {
    ["q", "sensor", "a_ms", "f_processed_hz", "f_req_hz", "roi", "fresh"]
        .map(String::from)
        .to_vec()
}

pub fn aoi_summary_rows(report: &AoiReport) -> Vec<Vec<String>> {
    report
        .sensors
        .iter()
        .map(|s| {
            let (f, req, roi, fresh) = match s.relevance {
                Some(r) => (
                    csv_num(r.processed_frequency),
                    csv_num(r.required_frequency),
                    csv_num(r.roi),
                    r.is_fresh().to_string(),
                ),
                None => ("NaN".into(), "NaN".into(), "NaN".into(), "false".into()),
            };
            vec![report.frame.to_string(), s.id.clone(), csv_num(s.average * MS), f, req, roi, fresh]
        })
        .collect()
}

pub fn comparison_header() -> Vec<String> {
    ["quantity", "analytic", "simulated", "rel_err", "max_abs_dev"]
        .map(String::from)
        .to_vec()
}

pub fn comparison_row(c: &Comparison) -> Vec<String> {
    vec![
        c.quantity.clone(),
        csv_num(c.analytic),
        csv_num(c.simulated),
        csv_num(c.relative_error),
        c.max_abs_deviation.map(csv_num).unwrap_or_default(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.0, 9), "0");
        assert_eq!(sig(133.63333333333, 9), "133.633333");
        assert_eq!(sig(0.1213, 4), "0.1213");
        assert_eq!(sig(3.435216, 4), "3.435");
        assert_eq!(sig(-2.5, 4), "-2.500");
        assert_eq!(sig(1.0e-7, 4), "1.000e-7");
        assert_eq!(sig(9.99996, 4), "10.00");
        assert_eq!(sig(123456.0, 4), "1.235e5");
        assert_eq!(sig(f64::NAN, 4), "NaN");
    }
}
