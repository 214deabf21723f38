use std::fmt;

use serde::Serialize;

/// Non-fatal condition surfaced alongside an evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Compute regression went non-positive and was floored.
    ComputeClamped { raw: f64 },
    /// Mean power regression went negative and was replaced by base power.
    PowerClamped { raw: f64 },
    /// Encoding regression went negative and was clamped to zero.
    EncodingClamped { raw: f64 },
    /// An AoI sample was negative and reported as zero.
    NegativeAge { sensor: String, update: usize, raw: f64 },
    /// Average AoI was not positive, so RoI is undefined.
    DegenerateAoi { sensor: String, average: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ComputeClamped { raw } => write!(f, "compute_clamped(raw={raw})"),
            Warning::PowerClamped { raw } => write!(f, "power_clamped(raw={raw})"),
            Warning::EncodingClamped { raw } => write!(f, "encoding_clamped(raw={raw})"),
            Warning::NegativeAge { sensor, update, raw } => {
                write!(f, "negative_age({sensor}#{update},raw={raw})")
            }
            Warning::DegenerateAoi { sensor, average } => {
                write!(f, "degenerate_aoi({sensor},A={average})")
            }
        }
    }
}

/// `;`-joined list for CSV cells.
pub fn join(warnings: &[Warning]) -> String {
    warnings
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";")
}
