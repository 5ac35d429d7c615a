//! Helpers shared by the acceptance target: check bookkeeping, CSV reading
//! and peak detection.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(criterion: u32, name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { criterion, name: name.to_string(), passed, detail: detail.into() }
    }

    /// |value − target| ≤ tol, reported with both numbers.
    pub fn within(criterion: u32, name: &str, value: f64, target: f64, tol: f64) -> Self {
        let dev = (value - target).abs();
        Self::new(
            criterion,
            name,
            dev <= tol,
            format!("value {value:.6e}, target {target:.6e}, |dev| {dev:.3e} <= {tol:.3e}"),
        )
    }

    /// value ≤ limit.
    pub fn below(criterion: u32, name: &str, value: f64, limit: f64) -> Self {
        Self::new(criterion, name, value <= limit, format!("{value:.4e} <= {limit:.4e}"))
    }

    pub fn failed(criterion: u32, name: &str, err: impl fmt::Display) -> Self {
        Self::new(criterion, name, false, format!("error: {err}"))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] criterion {:>2} {}: {}", self.criterion, self.name, self.detail)
    }
}

/// Columns of a `#`-commented CSV file keyed by header name.
pub fn read_csv_columns(path: &Path) -> Result<BTreeMap<String, Vec<f64>>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let headers: Vec<String> = rdr.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        for (col, field) in cols.iter_mut().zip(rec.iter()) {
            col.push(field.trim().parse::<f64>().map_err(|e| format!("{field:?}: {e}"))?);
        }
    }
    Ok(headers.into_iter().zip(cols).collect())
}

/// Interior local maxima whose topographic prominence exceeds `min_prominence`.
pub fn find_peaks(y: &[f64], min_prominence: f64) -> Vec<usize> {
    let n = y.len();
    let mut peaks = Vec::new();
    for i in 1..n.saturating_sub(1) {
        // Plateaus count once, at their left edge.
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        let mut left_min = y[i];
        for &v in y[..i].iter().rev() {
            if v > y[i] {
                break;
            }
            left_min = left_min.min(v);
        }
        let mut right_min = y[i];
        for &v in &y[i + 1..] {
            if v > y[i] {
                break;
            }
            right_min = right_min.min(v);
        }
        if y[i] - left_min.max(right_min) > min_prominence {
            peaks.push(i);
        }
    }
    peaks
}
