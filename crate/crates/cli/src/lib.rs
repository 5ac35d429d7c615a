//! Front end for the dce-core simulator: reads a TOML run configuration and
//! writes spectra as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{Emission, Overrides};
pub use config::RunConfig;
pub use error::CliError;
pub use output::Format;

#[derive(Debug, Parser)]
#[command(name = "dce", version, about = "Dynamical Casimir effect spectra for a SQUID-terminated waveguide")]
pub struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Comma-separated temperatures in mK
    #[arg(long = "temperature-mk", global = true, value_delimiter = ',')]
    pub temperature_mk: Option<Vec<f64>>,

    /// Sideband order N of the numerical solver
    #[arg(long, global = true)]
    pub sidebands: Option<usize>,

    /// Number of grid points
    #[arg(long = "grid-points", global = true)]
    pub grid_points: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output path stem; suffixes and the extension are added per file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Photon flux of the single-mirror setup, analytic and numerical
    MirrorSpectrum,
    /// Photon flux with a resonator, one file per scenario and temperature
    ResonatorSpectrum,
    /// Two-photon correlation magnitude versus detuning from ω_d/2
    Correlations,
    /// Second-order coherence versus delay
    G2,
    /// Quadrature squeezing spectra
    Squeezing,
    /// Numerical sideband solve with diagnostics
    Numsolve,
    /// Resonator kernel against the parametric oscillator
    PoCompare,
    /// Photon production rate of a moving mirror
    Rate {
        /// Oscillation amplitude, m
        #[arg(long = "amplitude-m")]
        amplitude_m: Option<f64>,
        /// Mirror oscillation frequency, rad/s
        #[arg(long)]
        frequency: Option<f64>,
        /// Cavity quality factor
        #[arg(long)]
        quality: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::MirrorSpectrum => "mirror-spectrum",
            Command::ResonatorSpectrum => "resonator-spectrum",
            Command::Correlations => "correlations",
            Command::G2 => "g2",
            Command::Squeezing => "squeezing",
            Command::Numsolve => "numsolve",
            Command::PoCompare => "po-compare",
            Command::Rate { .. } => "rate",
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub text: String,
}

/// Runs one subcommand: computes, writes files and returns what was produced.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = cli.config.as_deref().map(RunConfig::load).transpose()?;
    let ov = Overrides {
        temperatures_mk: cli.temperature_mk.clone(),
        sidebands: cli.sidebands,
        grid_points: cli.grid_points,
    };
    if let Some(ts) = &ov.temperatures_mk {
        if ts.is_empty() || ts.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(CliError::Config("--temperature-mk needs non-negative values".into()));
        }
    }
    let need = || cfg.as_ref().ok_or_else(|| CliError::Config(format!("{} needs --config", cli.command.name())));
    let em = match &cli.command {
        Command::MirrorSpectrum => commands::mirror_spectrum(need()?, &ov)?,
        Command::ResonatorSpectrum => commands::resonator_spectrum(need()?, &ov)?,
        Command::Correlations => commands::correlations(need()?, &ov)?,
        Command::G2 => commands::g2(need()?, &ov)?,
        Command::Squeezing => commands::squeezing(need()?, &ov)?,
        Command::Numsolve => commands::numsolve(need()?, &ov)?,
        Command::PoCompare => commands::po_compare(need()?, &ov)?,
        Command::Rate { amplitude_m, frequency, quality } => commands::rate(
            cfg.as_ref(),
            &commands::RateInputs {
                amplitude_m: *amplitude_m,
                mirror_drive_rad_s: *frequency,
                cavity_quality: *quality,
            },
        )?,
    };
    let stem = cli.out.clone().unwrap_or_else(|| PathBuf::from(cli.command.name()));
    let files = output::write_emission(&em, &stem, cli.format)?;
    Ok(Report { files, text: em.text })
}
