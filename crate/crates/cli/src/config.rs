//! TOML run configuration. Keys carry their unit as a suffix and are
//! converted to SI here.

use std::f64::consts::PI;
use std::path::Path;

use dce_core::circuit::{
    derive_params_with, CircuitParams, DerivedParams, JosephsonBias, PhysicalConstants, ValidityThresholds,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    pub critical_current_ua: f64,
    pub junction_capacitance_ff: f64,
    pub phase_velocity_m_per_s: f64,
    pub char_impedance_ohm: f64,
    pub ej_bias_ratio: Option<f64>,
    /// Loop flux in units of Φ0; alternative to `ej_bias_ratio`.
    pub ext_flux_bias_phi0: Option<f64>,
    pub ej_drive_ratio: f64,
    /// ω_d / 2π
    pub drive_frequency_ghz: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub flux_quantum_wb: Option<f64>,
    pub hbar_js: Option<f64>,
    pub boltzmann_j_per_k: Option<f64>,
    pub light_speed_m_per_s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValiditySection {
    pub max_k_leff: Option<f64>,
    pub max_drive_over_plasma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub temperatures_mk: Option<Vec<f64>>,
    pub grid_points: Option<usize>,
    pub sidebands: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Mode 0 placed at `mode_frequency_over_drive · ω_d`.
    Single,
    /// ω_0^res + ω_1^res = ω_d.
    TwoMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorScenario {
    pub name: String,
    pub layout: Layout,
    pub q0: f64,
    pub mode_frequency_over_drive: Option<f64>,
    /// Overrides the circuit's δE_J/E_J0 for this scenario.
    pub ej_drive_ratio: Option<f64>,
    pub temperatures_mk: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Name of the resonator scenario used for the resonator curves.
    pub resonator: Option<String>,
    pub points: Option<usize>,
    /// g2 only: largest τ·ω_d.
    pub tau_max_times_omega_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoCompareSection {
    pub q_values: Vec<f64>,
    /// |ε_PO| / (γ/2) used for every Q.
    pub threshold_ratio: f64,
    pub window_linewidths: f64,
    pub points: usize,
}

impl Default for PoCompareSection {
    fn default() -> Self {
        Self { q_values: vec![50.0, 100.0, 200.0], threshold_ratio: 0.05, window_linewidths: 2.0, points: 201 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSection {
    pub amplitude_m: Option<f64>,
    pub mirror_drive_rad_s: Option<f64>,
    pub cavity_quality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitSection,
    #[serde(default)]
    pub constants: ConstantsSection,
    #[serde(default)]
    pub validity: ValiditySection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub resonator: Vec<ResonatorScenario>,
    #[serde(default)]
    pub correlations: SweepSection,
    #[serde(default)]
    pub g2: SweepSection,
    #[serde(default)]
    pub squeezing: SweepSection,
    #[serde(default)]
    pub po_compare: PoCompareSection,
    #[serde(default)]
    pub rate: RateSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        let c = &self.circuit;
        if c.ej_bias_ratio.is_some() == c.ext_flux_bias_phi0.is_some() {
            return Err(CliError::Config(
                "exactly one of circuit.ej_bias_ratio and circuit.ext_flux_bias_phi0 must be given".into(),
            ));
        }
        let mut names = std::collections::BTreeSet::new();
        for s in &self.resonator {
            if !names.insert(s.name.as_str()) {
                return Err(CliError::Config(format!("duplicate resonator scenario {}", s.name)));
            }
            if !s.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '-' || ch == '_') {
                return Err(CliError::Config(format!("scenario name {:?} must be alphanumeric", s.name)));
            }
            match (s.layout, s.mode_frequency_over_drive) {
                (Layout::Single, None) => {
                    return Err(CliError::Config(format!("scenario {} needs mode_frequency_over_drive", s.name)))
                }
                (Layout::Single, Some(x)) if !(x > 0.0 && x < 1.0) => {
                    return Err(CliError::Config(format!(
                        "scenario {}: mode_frequency_over_drive must lie in (0, 1)",
                        s.name
                    )))
                }
                _ => {}
            }
        }
        for t in self.run.temperatures_mk.iter().flatten() {
            if !(t.is_finite() && *t >= 0.0) {
                return Err(CliError::Config(format!("temperature {t} mK is not valid")));
            }
        }
        for name in [&self.correlations.resonator, &self.g2.resonator, &self.squeezing.resonator].into_iter().flatten()
        {
            self.scenario(name)?;
        }
        Ok(())
    }

    pub fn scenario(&self, name: &str) -> Result<&ResonatorScenario, CliError> {
        self.resonator
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| CliError::Config(format!("no resonator scenario named {name}")))
    }

    pub fn constants(&self) -> PhysicalConstants {
        let d = PhysicalConstants::CODATA;
        let c = &self.constants;
        PhysicalConstants {
            flux_quantum: c.flux_quantum_wb.unwrap_or(d.flux_quantum),
            hbar: c.hbar_js.unwrap_or(d.hbar),
            boltzmann: c.boltzmann_j_per_k.unwrap_or(d.boltzmann),
            light_speed: c.light_speed_m_per_s.unwrap_or(d.light_speed),
        }
    }

    pub fn thresholds(&self) -> ValidityThresholds {
        let d = ValidityThresholds::default();
        ValidityThresholds {
            max_k_leff: self.validity.max_k_leff.unwrap_or(d.max_k_leff),
            max_drive_over_plasma: self.validity.max_drive_over_plasma.unwrap_or(d.max_drive_over_plasma),
        }
    }

    pub fn circuit_params(&self) -> CircuitParams {
        let c = &self.circuit;
        let bias = match (c.ej_bias_ratio, c.ext_flux_bias_phi0) {
            (Some(r), _) => JosephsonBias::Ratio(r),
            (None, Some(f)) => JosephsonBias::Flux(f * self.constants().flux_quantum),
            (None, None) => unreachable!("validated"),
        };
        CircuitParams {
            critical_current: c.critical_current_ua * 1e-6,
            junction_capacitance: c.junction_capacitance_ff * 1e-15,
            phase_velocity: c.phase_velocity_m_per_s,
            char_impedance: c.char_impedance_ohm,
            bias,
            ej_drive_ratio: c.ej_drive_ratio,
            drive_frequency: 2.0 * PI * c.drive_frequency_ghz * 1e9,
        }
    }

    /// Circuit and derived parameters, optionally with a different drive ratio.
    pub fn derive(&self, drive_ratio: Option<f64>) -> Result<(CircuitParams, DerivedParams), CliError> {
        let mut cp = self.circuit_params();
        if let Some(r) = drive_ratio {
            cp.ej_drive_ratio = r;
        }
        let dp = derive_params_with(&self.constants(), &cp, &self.thresholds()).map_err(CliError::from_core)?;
        Ok((cp, dp))
    }
}
