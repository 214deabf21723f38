use serde_json::Value;

use crate::CliError;

/// Parameter sweep over one numeric scenario field.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Dotted path into the scenario document, e.g. `device.allocation.cpu_clock`
    /// or `edges.0.distance`.
    pub path: String,
    /// Swept values, ascending.
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(path: &str, values: Vec<f64>) -> Result<Self, CliError> {
        if values.is_empty() {
            return Err(CliError::Input("sweep value list is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Input("sweep values must be finite".into()));
        }
        let mut values = values;
        values.sort_by(f64::total_cmp);
        Ok(Self { path: path.to_string(), values })
    }
}

/// `1,2.5,4`
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Input(format!("`{s}` is not a number")))
        })
        .collect()
}

/// `start:stop:step`, stop inclusive.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts = parse_values(&text.replace(':', ","))?;
    let [start, stop, step] = parts[..] else {
        return Err(CliError::Input(format!("range `{text}` must be start:stop:step")));
    };
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(CliError::Input(format!("range `{text}` needs step > 0 and stop >= start")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Replaces the numeric scalar at `path` with `value`.
pub fn set_path(doc: &mut Value, path: &str, value: f64) -> Result<(), CliError> {
    let mut node = doc;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(key),
            Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| CliError::Input(format!("sweep path `{path}` does not resolve at `{key}`")))?;
    }
    if !node.is_number() {
        return Err(CliError::Input(format!("sweep path `{path}` is not a numeric field")));
    }
    if node.is_u64() && value >= 0.0 && value.fract() == 0.0 {
        *node = Value::from(value as u64);
        return Ok(());
    }
    *node = serde_json::Number::from_f64(value)
        .map(Value::Number)
        .ok_or_else(|| CliError::Input(format!("cannot store {value}")))?;
    Ok(())
}
