//! Sampled spectra with axis metadata, written as CSV or JSON.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DceError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Values {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Values {
    fn len(&self) -> usize {
        match self {
            Values::Real(v) => v.len(),
            Values::Complex(v) => v.len(),
        }
    }

    fn all_finite(&self) -> bool {
        match self {
            Values::Real(v) => v.iter().all(|x| x.is_finite()),
            Values::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub values: Values,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub axis_name: String,
    pub axis_unit: String,
    pub x: Vec<f64>,
    pub columns: Vec<Column>,
    pub metadata: BTreeMap<String, String>,
}

/// Twelve significant digits, fixed exponent form.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

impl SpectrumSeries {
    pub fn new(axis_name: &str, axis_unit: &str, x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DceError::Domain(format!("axis {axis_name} contains non-finite values")));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DceError::Domain(format!("axis {axis_name} is not strictly increasing")));
        }
        Ok(Self {
            axis_name: axis_name.into(),
            axis_unit: axis_unit.into(),
            x,
            columns: Vec::new(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn push(&mut self, name: &str, unit: &str, values: Values) -> Result<()> {
        if values.len() != self.x.len() {
            return Err(DceError::Domain(format!(
                "column {name} has {} samples, axis has {}",
                values.len(),
                self.x.len()
            )));
        }
        if !values.all_finite() {
            return Err(DceError::Domain(format!("column {name} contains non-finite values")));
        }
        self.columns.push(Column { name: name.into(), unit: unit.into(), values });
        Ok(())
    }

    pub fn push_real(&mut self, name: &str, unit: &str, values: Vec<f64>) -> Result<()> {
        self.push(name, unit, Values::Real(values))
    }

    pub fn push_complex(&mut self, name: &str, unit: &str, values: Vec<Complex64>) -> Result<()> {
        self.push(name, unit, Values::Complex(values))
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn real_column(&self, name: &str) -> Option<&[f64]> {
        match self.column(name).map(|c| &c.values) {
            Some(Values::Real(v)) => Some(v),
            _ => None,
        }
    }

    /// Comment block with metadata, a header row, then one row per sample.
    /// Complex columns become `<name>_re,<name>_im`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut units = vec![format!("{}={}", self.axis_name, self.axis_unit)];
        units.extend(self.columns.iter().map(|c| format!("{}={}", c.name, c.unit)));
        writeln!(out, "# units: {}", units.join("; "))?;

        let mut header = vec![self.axis_name.clone()];
        for c in &self.columns {
            match c.values {
                Values::Real(_) => header.push(c.name.clone()),
                Values::Complex(_) => {
                    header.push(format!("{}_re", c.name));
                    header.push(format!("{}_im", c.name));
                }
            }
        }
        writeln!(out, "{}", header.join(","))?;

        for (i, x) in self.x.iter().enumerate() {
            let mut row = vec![format_value(*x)];
            for c in &self.columns {
                match &c.values {
                    Values::Real(v) => row.push(format_value(v[i])),
                    Values::Complex(v) => {
                        row.push(format_value(v[i].re));
                        row.push(format_value(v[i].im));
                    }
                }
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| DceError::Solver(format!("json encoding failed: {e}")))
    }
}
