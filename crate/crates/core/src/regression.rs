//! Fitted multiple-linear-regression models and an ordinary least squares fitter.
//!
//! Four published models drive the analytic pipeline: allocated compute from
//! processor clocks and CPU/GPU split, mean device power from the same inputs,
//! encoding latency from encoder settings, and CNN complexity from depth and
//! size. Each is stored as one or two [`LinearModel`]s in a [`CoefficientSet`];
//! the built-in set is named `paper` and user refits can be saved next to it.

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{CnnProfile, ComputeAllocation, EncoderConfig, FrameConfig};

/// Floor returned by the compute regression when it extrapolates to a non-positive value.
pub const COMPUTE_FLOOR: f64 = 1e-3;

/// Relative pivot size below which a design column is treated as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Cholesky pivots that lose more than this fraction of a column's energy
/// send the solve to the pivoted QR path.
const CHOLESKY_PIVOT_TOLERANCE: f64 = 1e-8;

/// Name of the built-in coefficient set.
pub const PAPER_SET: &str = "paper";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub feature_names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
}

impl LinearModel {
    pub fn new(intercept: f64, terms: &[(&str, f64)], r_squared: Option<f64>) -> Self {
        Self {
            intercept,
            coefficients: terms.iter().map(|t| t.1).collect(),
            feature_names: terms.iter().map(|t| t.0.to_string()).collect(),
            r_squared,
        }
    }

    /// Evaluates the model; `features` must follow `feature_names` order.
    pub fn predict(&self, features: &[f64]) -> f64 {
        assert_eq!(
            features.len(),
            self.coefficients.len(),
            "feature vector length does not match model"
        );
        self.coefficients
            .iter()
            .zip(features)
            .fold(self.intercept, |acc, (w, x)| acc + w * x)
    }

    fn check_shape(&self, expected: usize, what: &str) -> Result<()> {
        if self.coefficients.len() != self.feature_names.len() {
            return Err(Error::Parse(format!(
                "{what}: {} coefficients but {} feature names",
                self.coefficients.len(),
                self.feature_names.len()
            )));
        }
        if self.coefficients.len() != expected {
            return Err(Error::Parse(format!(
                "{what}: expected {expected} features, found {}",
                self.coefficients.len()
            )));
        }
        if let Some(r2) = self.r_squared {
            if !(0.0..=1.0).contains(&r2) {
                return Err(Error::Parse(format!("{what}: r_squared {r2} outside [0,1]")));
            }
        }
        Ok(())
    }

    /// For a clock model over `[f, f^2]` with positive curvature, the closed
    /// interval on which it is non-positive.
    pub fn quadratic_nonpositive_interval(&self) -> Option<(f64, f64)> {
        if self.coefficients.len() != 2 {
            return None;
        }
        let (c, b, a) = (self.intercept, self.coefficients[0], self.coefficients[1]);
        if a <= 0.0 {
            return None;
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        Some(((-b - root) / (2.0 * a), (-b + root) / (2.0 * a)))
    }
}

impl fmt::Display for LinearModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.intercept)?;
        for (w, name) in self.coefficients.iter().zip(&self.feature_names) {
            if *w < 0.0 {
                write!(f, " - {}*{name}", -w)?;
            } else {
                write!(f, " + {w}*{name}")?;
            }
        }
        Ok(())
    }
}

/// A regression output together with its unclamped value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl Clamped {
    fn floor_if(raw: f64, out_of_domain: bool, floor: f64) -> Self {
        if out_of_domain {
            Self { value: floor, raw, clamped: true }
        } else {
            Self { value: raw, raw, clamped: false }
        }
    }
}

/// Registry slot of one fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSlot {
    ComputeCpu,
    ComputeGpu,
    PowerCpu,
    PowerGpu,
    Encoding,
    CnnComplexity,
}

impl ModelSlot {
    pub const ALL: [ModelSlot; 6] = [
        ModelSlot::ComputeCpu,
        ModelSlot::ComputeGpu,
        ModelSlot::PowerCpu,
        ModelSlot::PowerGpu,
        ModelSlot::Encoding,
        ModelSlot::CnnComplexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelSlot::ComputeCpu => "compute_cpu",
            ModelSlot::ComputeGpu => "compute_gpu",
            ModelSlot::PowerCpu => "power_cpu",
            ModelSlot::PowerGpu => "power_gpu",
            ModelSlot::Encoding => "encoding",
            ModelSlot::CnnComplexity => "cnn_complexity",
        }
    }

    /// Measurement columns a refit CSV must carry for this slot.
    pub fn raw_columns(self) -> &'static [&'static str] {
        match self {
            ModelSlot::ComputeCpu | ModelSlot::PowerCpu => &["f_c"],
            ModelSlot::ComputeGpu | ModelSlot::PowerGpu => &["f_g"],
            ModelSlot::Encoding => &["n_i", "n_b", "n_bitrate", "s_f1", "n_fps", "n_quant"],
            ModelSlot::CnnComplexity => &["d_cnn", "s_cnn", "d_scale"],
        }
    }

    pub fn feature_names(self) -> Vec<String> {
        match self {
            ModelSlot::ComputeCpu | ModelSlot::PowerCpu => vec!["f_c".into(), "f_c^2".into()],
            ModelSlot::ComputeGpu | ModelSlot::PowerGpu => vec!["f_g".into(), "f_g^2".into()],
            _ => self.raw_columns().iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Maps raw measurements (in `raw_columns` order) to model features.
    pub fn features(self, raw: &[f64]) -> Vec<f64> {
        match self {
            ModelSlot::ComputeCpu
            | ModelSlot::PowerCpu
            | ModelSlot::ComputeGpu
            | ModelSlot::PowerGpu => vec![raw[0], raw[0] * raw[0]],
            _ => raw.to_vec(),
        }
    }
}

impl fmt::Display for ModelSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelSlot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelSlot::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown model slot `{s}`")))
    }
}

/// Versioned set of every regression the pipeline evaluates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub name: String,
    pub version: u32,
    pub compute_cpu: LinearModel,
    pub compute_gpu: LinearModel,
    pub power_cpu: LinearModel,
    pub power_gpu: LinearModel,
    pub encoding: LinearModel,
    pub cnn_complexity: LinearModel,
}

fn paper_set() -> &'static CoefficientSet {
    static PAPER: OnceLock<CoefficientSet> = OnceLock::new();
    PAPER.get_or_init(|| CoefficientSet {
        name: PAPER_SET.to_string(),
        version: 1,
        compute_cpu: LinearModel::new(18.24, &[("f_c", -6.02), ("f_c^2", 1.84)], Some(0.87)),
        compute_gpu: LinearModel::new(193.67, &[("f_g", -558.29), ("f_g^2", 400.96)], Some(0.87)),
        power_cpu: LinearModel::new(-20.74, &[("f_c", 18.85), ("f_c^2", -3.64)], Some(0.863)),
        power_gpu: LinearModel::new(-62.197, &[("f_g", 187.48), ("f_g^2", -135.11)], Some(0.863)),
        encoding: LinearModel::new(
            -574.36,
            &[
                ("n_i", -7.71),
                ("n_b", 142.61),
                ("n_bitrate", 53.38),
                ("s_f1", 1.43),
                ("n_fps", 163.65),
                ("n_quant", 3.62),
            ],
            Some(0.79),
        ),
        cnn_complexity: LinearModel::new(
            2.45,
            &[("d_cnn", 0.0025), ("s_cnn", 0.03), ("d_scale", 0.0029)],
            Some(0.844),
        ),
    })
}

impl CoefficientSet {
    pub fn paper() -> Self {
        paper_set().clone()
    }

    pub fn slot(&self, slot: ModelSlot) -> &LinearModel {
        match slot {
            ModelSlot::ComputeCpu => &self.compute_cpu,
            ModelSlot::ComputeGpu => &self.compute_gpu,
            ModelSlot::PowerCpu => &self.power_cpu,
            ModelSlot::PowerGpu => &self.power_gpu,
            ModelSlot::Encoding => &self.encoding,
            ModelSlot::CnnComplexity => &self.cnn_complexity,
        }
    }

    pub fn slot_mut(&mut self, slot: ModelSlot) -> &mut LinearModel {
        match slot {
            ModelSlot::ComputeCpu => &mut self.compute_cpu,
            ModelSlot::ComputeGpu => &mut self.compute_gpu,
            ModelSlot::PowerCpu => &mut self.power_cpu,
            ModelSlot::PowerGpu => &mut self.power_gpu,
            ModelSlot::Encoding => &mut self.encoding,
            ModelSlot::CnnComplexity => &mut self.cnn_complexity,
        }
    }

    /// Copy of this set with one slot replaced.
    pub fn with_model(&self, name: &str, slot: ModelSlot, model: LinearModel) -> Self {
        let mut set = self.clone();
        set.name = name.to_string();
        *set.slot_mut(slot) = model;
        set
    }

    pub fn check(&self) -> Result<()> {
        for slot in ModelSlot::ALL {
            self.slot(slot).check_shape(slot.feature_names().len(), slot.name())?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: CoefficientSet = serde_json::from_str(text)?;
        set.check()?;
        Ok(set)
    }

    /// Writes `<dir>/<name>.json` and returns its path.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        std::fs::create_dir_all(dir.as_ref())?;
        let path = dir.as_ref().join(format!("{}.json", self.name));
        std::fs::write(&path, self.to_json()? + "\n")?;
        Ok(path)
    }

    /// `paper` selects the built-in set; otherwise `name` is an existing file
    /// or the stem of a file in `registry_dir`.
    pub fn resolve(name: &str, registry_dir: impl AsRef<Path>) -> Result<Self> {
        if name == PAPER_SET {
            return Ok(Self::paper());
        }
        let direct = Path::new(name);
        let path = if direct.is_file() {
            direct.to_path_buf()
        } else {
            registry_dir.as_ref().join(format!("{name}.json"))
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Parse(format!("coefficient set `{name}` ({}): {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn clock_model(model: &LinearModel, clock: f64) -> f64 {
        model.predict(&[clock, clock * clock])
    }

    /// Allocated compute resource, CPU/GPU blend; floored at [`COMPUTE_FLOOR`].
    pub fn compute_resource(&self, alloc: &ComputeAllocation) -> Clamped {
        let raw = alloc.cpu_share * Self::clock_model(&self.compute_cpu, alloc.cpu_clock)
            + alloc.gpu_share() * Self::clock_model(&self.compute_gpu, alloc.gpu_clock);
        Clamped::floor_if(raw, raw <= 0.0, COMPUTE_FLOOR)
    }

    pub fn mean_power_raw(&self, alloc: &ComputeAllocation) -> f64 {
        alloc.cpu_share * Self::clock_model(&self.power_cpu, alloc.cpu_clock)
            + alloc.gpu_share() * Self::clock_model(&self.power_gpu, alloc.gpu_clock)
    }

    /// Mean device power, W; negative extrapolations are replaced by `base_power`.
    pub fn mean_power(&self, alloc: &ComputeAllocation, base_power: f64) -> Clamped {
        let raw = self.mean_power_raw(alloc);
        Clamped::floor_if(raw, raw < 0.0, base_power)
    }

    pub fn cnn_complexity(&self, cnn: &CnnProfile) -> f64 {
        self.cnn_complexity
            .predict(&[cnn.depth, cnn.size, cnn.depth_scale])
    }

    /// Numerator of the encoding latency model, in ms-compute units.
    pub fn encoding_latency_raw(&self, enc: &EncoderConfig, frames: &FrameConfig) -> f64 {
        self.encoding.predict(&[
            enc.i_interval,
            enc.b_interval,
            enc.bitrate,
            frames.frame_area * enc.unit_scale,
            frames.frame_rate,
            enc.quantization,
        ])
    }
}

pub fn compute_resource(alloc: &ComputeAllocation) -> Clamped {
    paper_set().compute_resource(alloc)
}

pub fn mean_power(alloc: &ComputeAllocation, base_power: f64) -> Clamped {
    paper_set().mean_power(alloc, base_power)
}

pub fn cnn_complexity(cnn: &CnnProfile) -> f64 {
    paper_set().cnn_complexity(cnn)
}

pub fn encoding_latency_raw(enc: &EncoderConfig, frames: &FrameConfig) -> f64 {
    paper_set().encoding_latency_raw(enc, frames)
}

/// Column-labelled numeric observations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservationTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ObservationTable {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        Self { columns, rows }
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .enumerate()
                .map(|(col, cell)| {
                    cell.parse::<f64>().map_err(|_| {
                        Error::Parse(format!(
                            "row {} column `{}`: `{cell}` is not a number",
                            line + 1,
                            columns.get(col).map(String::as_str).unwrap_or("?")
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

/// Least-squares fit of `target_column` against every other column.
pub fn fit_linear_model(table: &ObservationTable, target_column: &str) -> Result<LinearModel> {
    let target = table.column_index(target_column)?;
    let names: Vec<String> = table
        .columns
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target)
        .map(|(_, c)| c.clone())
        .collect();
    let x: Vec<Vec<f64>> = table
        .rows
        .iter()
        .map(|r| r.iter().enumerate().filter(|(i, _)| *i != target).map(|(_, v)| *v).collect())
        .collect();
    let y: Vec<f64> = table.rows.iter().map(|r| r[target]).collect();
    fit_design(&x, &y, names)
}

/// Refit of one registry slot from raw measurement columns.
pub fn fit_slot(table: &ObservationTable, slot: ModelSlot, target_column: &str) -> Result<LinearModel> {
    let target = table.column_index(target_column)?;
    let raw_idx = slot
        .raw_columns()
        .iter()
        .map(|c| table.column_index(c))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<Vec<f64>> = table
        .rows
        .iter()
        .map(|r| slot.features(&raw_idx.iter().map(|&i| r[i]).collect::<Vec<_>>()))
        .collect();
    let y: Vec<f64> = table.rows.iter().map(|r| r[target]).collect();
    fit_design(&x, &y, slot.feature_names())
}

/// Ordinary least squares with an intercept. Rows of `x` hold one observation each.
pub fn fit_design(x: &[Vec<f64>], y: &[f64], feature_names: Vec<String>) -> Result<LinearModel> {
    let k = feature_names.len();
    let needed = k + 1;
    if x.len() < needed || y.len() < needed {
        return Err(Error::InsufficientData { needed, got: x.len().min(y.len()) });
    }
    if x.iter().any(|r| r.len() != k) {
        return Err(Error::Parse("observation row width differs from feature count".into()));
    }
    let design: Vec<Vec<f64>> = x
        .iter()
        .map(|r| std::iter::once(1.0).chain(r.iter().copied()).collect())
        .collect();
    let mut column_names = Vec::with_capacity(needed);
    column_names.push("intercept".to_string());
    column_names.extend(feature_names.iter().cloned());

    let beta = match solve_normal_equations(&design, y) {
        Some(beta) => beta,
        None => solve_pivoted_qr(&design, y, &column_names)?,
    };

    let r_squared = r_squared(&design, y, &beta);
    Ok(LinearModel {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        feature_names,
        r_squared: Some(r_squared),
    })
}

fn r_squared(design: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = design
        .iter()
        .zip(y)
        .map(|(row, v)| {
            let fit: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
            (v - fit).powi(2)
        })
        .sum();
    let scale: f64 = y.iter().map(|v| v * v).sum();
    // zero-variance target: a constant is fitted exactly
    if ss_tot <= 1e-24 * scale.max(f64::MIN_POSITIVE) {
        return 1.0;
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Cholesky solve of `XᵀX β = Xᵀy`; `None` when a pivot collapses.
fn solve_normal_equations(design: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = design[0].len();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for (row, v) in design.iter().zip(y) {
        for i in 0..p {
            b[i] += row[i] * v;
            for j in 0..=i {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    let mut l = vec![vec![0.0; p]; p];
    for j in 0..p {
        let d = a[j][j] - l[j][..j].iter().map(|x| x * x).sum::<f64>();
        if !(d > CHOLESKY_PIVOT_TOLERANCE * a[j][j]) {
            return None;
        }
        let djj = d.sqrt();
        l[j][j] = djj;
        for i in j + 1..p {
            let s = a[i][j] - l[i][..j].iter().zip(&l[j][..j]).map(|(x, y)| x * y).sum::<f64>();
            l[i][j] = s / djj;
        }
    }
    let mut z = vec![0.0; p];
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * z[k];
        }
        z[i] = s / l[i][i];
    }
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = z[i];
        for k in i + 1..p {
            s -= l[k][i] * beta[k];
        }
        beta[i] = s / l[i][i];
    }
    Some(beta)
}

/// Householder QR with column pivoting; detects rank deficiency.
fn solve_pivoted_qr(design: &[Vec<f64>], y: &[f64], names: &[String]) -> Result<Vec<f64>> {
    let n = design.len();
    let p = design[0].len();
    // column-major copy
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| design.iter().map(|r| r[j]).collect()).collect();
    let mut rhs = y.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut diag = vec![0.0; p];
    let mut largest = 0.0_f64;

    for k in 0..p {
        let (best, _) = (k..p)
            .map(|j| (j, cols[j][k..].iter().map(|v| v * v).sum::<f64>()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        cols.swap(k, best);
        perm.swap(k, best);

        let norm = cols[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if k == 0 {
            largest = norm;
        }
        if norm <= RANK_TOLERANCE * largest || norm == 0.0 {
            return Err(Error::RankDeficient { column: names[perm[k]].clone() });
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vnorm2 > 0.0 {
            for col in cols.iter_mut().skip(k + 1) {
                let dot: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in col[k..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&rhs[k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in rhs[k..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        cols[k][k] = alpha;
        for r in cols[k][k + 1..n].iter_mut() {
            *r = 0.0;
        }
    }

    let mut z = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = rhs[i];
        for j in i + 1..p {
            s -= cols[j][i] * z[j];
        }
        z[i] = s / diag[i];
    }
    let mut beta = vec![0.0; p];
    for (k, &orig) in perm.iter().enumerate() {
        beta[orig] = z[k];
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alloc(cpu_share: f64, cpu_clock: f64, gpu_clock: f64) -> ComputeAllocation {
        ComputeAllocation { cpu_clock, gpu_clock, cpu_share }
    }

    fn cnn(depth: f64, size: f64, depth_scale: f64) -> CnnProfile {
        CnnProfile { depth, size, depth_scale }
    }

    // Hand evaluations of the published polynomials, written out independently.
    fn compute_oracle(w: f64, fc: f64, fg: f64) -> f64 {
        w * (18.24 + 1.84 * fc * fc - 6.02 * fc) + (1.0 - w) * (193.67 + 400.96 * fg * fg - 558.29 * fg)
    }

    fn power_oracle(w: f64, fc: f64, fg: f64) -> f64 {
        w * (18.85 * fc - 3.64 * fc * fc - 20.74) + (1.0 - w) * (187.48 * fg - 135.11 * fg * fg - 62.197)
    }

    #[test]
    fn compute_resource_examples() {
        assert!((compute_resource(&alloc(1.0, 2.0, 1.0)).value - 13.56).abs() < 1e-9);
        assert!((compute_resource(&alloc(0.0, 2.0, 1.0)).value - 36.34).abs() < 1e-9);
        assert!((compute_resource(&alloc(0.5, 2.0, 1.0)).value - 24.95).abs() < 1e-9);
        for &(w, fc, fg) in &[(0.3, 1.2, 0.9), (0.8, 2.5, 1.3), (1.0, 3.1, 0.1)] {
            let v = compute_resource(&alloc(w, fc, fg));
            assert!((v.raw - compute_oracle(w, fc, fg)).abs() < 1e-9);
        }
    }

    #[test]
    fn compute_resource_clamps_gpu_dip() {
        // GPU branch is negative between its roots near 0.655 and 0.737 GHz
        let v = compute_resource(&alloc(0.0, 2.0, 0.7));
        assert!(v.clamped);
        assert!(v.raw < 0.0);
        assert_eq!(v.value, COMPUTE_FLOOR);
    }

    #[test]
    fn gpu_compute_roots() {
        let (lo, hi) = CoefficientSet::paper()
            .compute_gpu
            .quadratic_nonpositive_interval()
            .unwrap();
        // quadratic formula on 400.96 f^2 - 558.29 f + 193.67
        let disc: f64 = 558.29 * 558.29 - 4.0 * 400.96 * 193.67;
        assert!((lo - (558.29 - disc.sqrt()) / (2.0 * 400.96)).abs() < 1e-12);
        assert!((hi - (558.29 + disc.sqrt()) / (2.0 * 400.96)).abs() < 1e-12);
        assert!((lo - 0.655).abs() < 1e-3 && (hi - 0.737).abs() < 1e-3);
        assert!(CoefficientSet::paper().compute_cpu.quadratic_nonpositive_interval().is_none());
    }

    #[test]
    fn mean_power_examples() {
        let cpu = mean_power(&alloc(1.0, 2.84, 1.0), 0.0);
        assert!((cpu.value - 3.435216).abs() < 1e-9);
        assert!((cpu.value - power_oracle(1.0, 2.84, 0.0)).abs() < 1e-12);
        let gpu = mean_power(&alloc(0.0, 2.0, 0.7), 0.0);
        assert!((gpu.value - 2.8351).abs() < 1e-9);
        let neg = mean_power(&alloc(0.0, 2.0, 1.0), 0.4);
        assert!(neg.clamped);
        assert!((neg.raw - (-9.827)).abs() < 1e-9);
        assert_eq!(neg.value, 0.4);
    }

    #[test]
    fn cnn_complexity_examples() {
        assert!((cnn_complexity(&cnn(31.0, 16.9, 0.0)) - 3.0345).abs() < 1e-9);
        assert!((cnn_complexity(&cnn(106.0, 210.0, 0.0)) - 9.015).abs() < 1e-9);
        assert!((cnn_complexity(&cnn(0.0, 1e-300, 0.0)) - 2.45).abs() < 1e-12);
    }

    #[test]
    fn encoding_raw_examples() {
        let frames = |area: f64, fps: f64| FrameConfig {
            frame_rate: fps,
            frame_area: area,
            frame_bytes: 1.0,
            converted_area: 1.0,
            converted_bytes: 1.0,
            frame_count: 1,
            updates_per_frame: 1,
            request_frequency: None,
        };
        let enc = |i, b, br, q| EncoderConfig {
            i_interval: i,
            b_interval: b,
            bitrate: br,
            quantization: q,
            output_area: 1.0,
            output_bytes: 0.5,
            unit_scale: 1.0,
        };
        let v = encoding_latency_raw(&enc(0.0, 0.0, 0.0, 0.0), &frames(0.0, 30.0));
        assert!((v - 4335.14).abs() < 1e-9);
        let v = encoding_latency_raw(&enc(0.0, 0.0, 0.0, 0.0), &frames(0.0, 0.0));
        assert!((v + 574.36).abs() < 1e-12);
        let v = encoding_latency_raw(&enc(30.0, 2.0, 10.0, 28.0), &frames(230.0, 30.0));
        assert!((v - 5353.12).abs() < 1e-9);
    }

    #[test]
    fn fits_exact_line() {
        let table = ObservationTable::new(
            vec!["x".into(), "y".into()],
            vec![vec![0.0, 2.0], vec![1.0, 5.0], vec![2.0, 8.0]],
        );
        let m = fit_linear_model(&table, "y").unwrap();
        assert!((m.intercept - 2.0).abs() < 1e-12);
        assert!((m.coefficients[0] - 3.0).abs() < 1e-12);
        assert_eq!(m.r_squared, Some(1.0));
    }

    #[test]
    fn constant_target_has_unit_r_squared() {
        let rows = (0..6).map(|i| vec![i as f64, (i * i) as f64 * 0.3, 0.1]).collect();
        let table = ObservationTable::new(vec!["a".into(), "b".into(), "y".into()], rows);
        let m = fit_linear_model(&table, "y").unwrap();
        assert!(m.coefficients.iter().all(|c| c.abs() < 1e-12));
        assert!((m.intercept - 0.1).abs() < 1e-12);
        assert_eq!(m.r_squared, Some(1.0));
    }

    #[test]
    fn rank_deficient_design_is_rejected() {
        let rows = (0..8)
            .map(|i| {
                let a = i as f64;
                vec![a, 2.0 * a + 1.0, a * a]
            })
            .collect();
        let table = ObservationTable::new(vec!["a".into(), "b".into(), "y".into()], rows);
        assert!(matches!(fit_linear_model(&table, "y"), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn too_few_rows() {
        let table = ObservationTable::new(
            vec!["a".into(), "b".into(), "y".into()],
            vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 0.0]],
        );
        assert!(matches!(
            fit_linear_model(&table, "y"),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn qr_path_matches_normal_equations() {
        let design: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let x = i as f64 * 0.37 - 1.0;
                vec![1.0, x, (x * 1.7).sin()]
            })
            .collect();
        let y: Vec<f64> = design.iter().map(|r| 0.5 - 2.0 * r[1] + 4.0 * r[2] + (r[1] * 9.0).cos() * 0.01).collect();
        let names: Vec<String> = ["intercept", "x", "s"].iter().map(|s| s.to_string()).collect();
        let a = solve_normal_equations(&design, &y).unwrap();
        let b = solve_pivoted_qr(&design, &y, &names).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn slot_refit_recovers_power_model() {
        let rows = (0..12)
            .map(|i| {
                let f = 1.0 + 0.2 * i as f64;
                vec![f, 18.85 * f - 3.64 * f * f - 20.74]
            })
            .collect();
        let table = ObservationTable::new(vec!["f_c".into(), "p".into()], rows);
        let m = fit_slot(&table, ModelSlot::PowerCpu, "p").unwrap();
        let paper = CoefficientSet::paper().power_cpu;
        assert!((m.intercept - paper.intercept).abs() < 1e-8);
        for (a, b) in m.coefficients.iter().zip(&paper.coefficients) {
            assert!((a - b).abs() < 1e-8);
        }
        assert_eq!(m.feature_names, paper.feature_names);
    }

    #[test]
    fn registry_json_round_trip_and_shape_check() {
        let set = CoefficientSet::paper();
        let back = CoefficientSet::from_json(&set.to_json().unwrap()).unwrap();
        assert_eq!(set, back);

        let mut bad = set.clone();
        bad.encoding.coefficients.pop();
        assert!(CoefficientSet::from_json(&serde_json::to_string(&bad).unwrap()).is_err());
    }

    #[test]
    fn csv_parsing_reports_bad_cells() {
        let t = ObservationTable::from_csv_reader("x, y\n1, 2\n3, 4\n".as_bytes()).unwrap();
        assert_eq!(t.columns, vec!["x", "y"]);
        assert_eq!(t.rows, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(ObservationTable::from_csv_reader("x,y\n1,abc\n".as_bytes()).is_err());
    }
}
