use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::commands::Emission;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `out/run.csv` with suffix `T25mK` → `out/run_T25mK.csv`. Any extension on
/// the stem is dropped in favour of the format's.
pub fn output_path(stem: &Path, suffix: &str, ext: &str) -> PathBuf {
    let base = stem.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = if suffix.is_empty() { format!("{base}.{ext}") } else { format!("{base}_{suffix}.{ext}") };
    stem.with_file_name(name)
}

pub fn write_emission(em: &Emission, stem: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut written = Vec::new();
    for (suffix, series) in &em.series {
        let path = output_path(stem, suffix, format.extension());
        let body = match format {
            Format::Csv => series.to_csv_string(),
            Format::Json => series.to_json_string().map_err(CliError::Numerical)?,
        };
        std::fs::write(&path, body)?;
        written.push(path);
    }
    for (suffix, json) in &em.sidecars {
        let path = output_path(stem, suffix, "json");
        std::fs::write(&path, json)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_rules() {
        assert_eq!(output_path(Path::new("out/run.csv"), "T25mK", "csv"), PathBuf::from("out/run_T25mK.csv"));
        assert_eq!(output_path(Path::new("run"), "", "json"), PathBuf::from("run.json"));
        assert_eq!(output_path(Path::new("a/b"), "x_modes", "json"), PathBuf::from("a/b_x_modes.json"));
    }
}
