//! Circuit parameters of the SQUID-terminated line and the static
//! quantities derived from them.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, DceError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Wb
    pub flux_quantum: f64,
    /// J s
    pub hbar: f64,
    /// J/K
    pub boltzmann: f64,
    /// m/s
    pub light_speed: f64,
}

impl PhysicalConstants {
    /// CODATA exact SI values; the flux quantum is h/2e.
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        flux_quantum: 6.626_070_15e-34 / (2.0 * 1.602_176_634e-19),
        hbar: 6.626_070_15e-34 / (2.0 * PI),
        boltzmann: 1.380_649e-23,
        light_speed: 299_792_458.0,
    };

    pub fn validate(&self) -> Result<()> {
        require_positive("flux_quantum", self.flux_quantum)?;
        require_positive("hbar", self.hbar)?;
        require_positive("boltzmann", self.boltzmann)?;
        require_positive("light_speed", self.light_speed)
    }

    /// (2π/Φ0)², the factor converting E_J into an inverse inductance.
    pub fn phase_factor_sq(&self) -> f64 {
        (2.0 * PI / self.flux_quantum).powi(2)
    }

    /// E_J = I_c Φ0 / 2π.
    pub fn josephson_energy(&self, critical_current: f64) -> Result<f64> {
        require_positive("critical_current", critical_current)?;
        Ok(critical_current * self.flux_quantum / (2.0 * PI))
    }

    /// E_J(Φ_ext) = 2 E_J |cos(π Φ_ext / Φ0)| for a symmetric SQUID.
    pub fn tunable_josephson_energy(&self, ej: f64, ext_flux: f64) -> Result<f64> {
        require_positive("josephson_energy", ej)?;
        Ok(2.0 * ej * (PI * ext_flux / self.flux_quantum).cos().abs())
    }

    /// L_eff = (Φ0/2π)² / (E_J L0).
    pub fn effective_length(&self, ej_eff: f64, inductance_per_length: f64) -> Result<f64> {
        require_positive("effective josephson_energy", ej_eff)?;
        require_positive("inductance_per_length", inductance_per_length)?;
        Ok(1.0 / (self.phase_factor_sq() * ej_eff * inductance_per_length))
    }

    /// ω_s = sqrt((2π/Φ0)² E_J / C_J). A vanishing E_J gives ω_s = 0.
    pub fn plasma_frequency(&self, ej_eff: f64, junction_capacitance: f64) -> Result<f64> {
        if !(ej_eff.is_finite() && ej_eff >= 0.0) {
            return Err(DceError::Domain(format!("effective josephson_energy must be non-negative, got {ej_eff}")));
        }
        require_positive("junction_capacitance", junction_capacitance)?;
        Ok((self.phase_factor_sq() * ej_eff / junction_capacitance).sqrt())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// How the static Josephson energy E_J0 of the SQUID is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JosephsonBias {
    /// E_J0 / E_J
    Ratio(f64),
    /// External flux through the loop, in Wb.
    Flux(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// A
    pub critical_current: f64,
    /// F
    pub junction_capacitance: f64,
    /// m/s
    pub phase_velocity: f64,
    /// Ω
    pub char_impedance: f64,
    pub bias: JosephsonBias,
    /// δE_J / E_J0
    pub ej_drive_ratio: f64,
    /// rad/s
    pub drive_frequency: f64,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("critical_current", self.critical_current)?;
        require_positive("junction_capacitance", self.junction_capacitance)?;
        require_positive("phase_velocity", self.phase_velocity)?;
        require_positive("char_impedance", self.char_impedance)?;
        require_positive("drive_frequency", self.drive_frequency)?;
        match self.bias {
            JosephsonBias::Ratio(r) => require_positive("ej_bias_ratio", r)?,
            JosephsonBias::Flux(f) if !f.is_finite() => {
                return Err(DceError::Domain(format!("ext_flux_bias must be finite, got {f}")))
            }
            JosephsonBias::Flux(_) => {}
        }
        if !(0.0..1.0).contains(&self.ej_drive_ratio) {
            return Err(DceError::Domain(format!("ej_drive_ratio must lie in [0, 1), got {}", self.ej_drive_ratio)));
        }
        Ok(())
    }

    /// L0 = Z0 / v, H/m.
    pub fn inductance_per_length(&self) -> f64 {
        self.char_impedance / self.phase_velocity
    }

    /// C0 = 1 / (Z0 v), F/m.
    pub fn capacitance_per_length(&self) -> f64 {
        1.0 / (self.char_impedance * self.phase_velocity)
    }

    /// Wavenumber k_ω = |ω| / v.
    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega.abs() / self.phase_velocity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityThresholds {
    /// Upper bound on k_{ω_d} L_eff0.
    pub max_k_leff: f64,
    /// Upper bound on ω_d / ω_s.
    pub max_drive_over_plasma: f64,
}

impl Default for ValidityThresholds {
    fn default() -> Self {
        Self { max_k_leff: 0.3, max_drive_over_plasma: 0.8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ValidityWarning {
    LongEffectiveLength { k_leff: f64, limit: f64 },
    DriveNearPlasma { ratio: f64, limit: f64 },
}

impl fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LongEffectiveLength { k_leff, limit } => {
                write!(f, "k_wd * L_eff0 = {k_leff:.4} exceeds {limit}; the short-mirror approximation is marginal")
            }
            Self::DriveNearPlasma { ratio, limit } => {
                write!(f, "w_d / w_s = {ratio:.4} exceeds {limit}; the drive approaches the SQUID plasma frequency")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// J
    pub ej: f64,
    /// J
    pub ej0: f64,
    /// J
    pub dej: f64,
    /// m
    pub leff0: f64,
    /// m
    pub dleff: f64,
    /// rad/s
    pub plasma_frequency: f64,
    pub constants: PhysicalConstants,
    pub warnings: Vec<ValidityWarning>,
}

pub fn derive_params(constants: &PhysicalConstants, params: &CircuitParams) -> Result<DerivedParams> {
    derive_params_with(constants, params, &ValidityThresholds::default())
}

pub fn derive_params_with(
    constants: &PhysicalConstants,
    params: &CircuitParams,
    thresholds: &ValidityThresholds,
) -> Result<DerivedParams> {
    constants.validate()?;
    params.validate()?;
    let ej = constants.josephson_energy(params.critical_current)?;
    let ej0 = match params.bias {
        JosephsonBias::Ratio(r) => r * ej,
        JosephsonBias::Flux(flux) => constants.tunable_josephson_energy(ej, flux)?,
    };
    if ej0 <= 1e-12 * ej {
        return Err(DceError::Domain(
            "static Josephson energy vanishes at this flux bias; the SQUID is not a mirror".into(),
        ));
    }
    let dej = ej0 * params.ej_drive_ratio;
    let leff0 = constants.effective_length(ej0, params.inductance_per_length())?;
    let dleff = leff0 * params.ej_drive_ratio;
    let plasma_frequency = constants.plasma_frequency(ej0, params.junction_capacitance)?;

    let mut warnings = Vec::new();
    let k_leff = params.wavenumber(params.drive_frequency) * leff0;
    if k_leff > thresholds.max_k_leff {
        warnings.push(ValidityWarning::LongEffectiveLength { k_leff, limit: thresholds.max_k_leff });
    }
    let ratio = params.drive_frequency / plasma_frequency;
    if ratio > thresholds.max_drive_over_plasma {
        warnings.push(ValidityWarning::DriveNearPlasma { ratio, limit: thresholds.max_drive_over_plasma });
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    Ok(DerivedParams { ej, ej0, dej, leff0, dleff, plasma_frequency, constants: *constants, warnings })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const C: PhysicalConstants = PhysicalConstants::CODATA;

    #[test]
    fn flux_quantum_is_codata() {
        assert_relative_eq!(C.flux_quantum, 2.067_833_848e-15, max_relative = 1e-9);
    }

    #[test]
    fn josephson_energy_values() {
        let e = C.josephson_energy(1.25e-6).unwrap();
        assert_relative_eq!(e, 4.1138e-22, max_relative = 1e-4);
        assert_relative_eq!(C.josephson_energy(2.5e-6).unwrap(), 2.0 * e, max_relative = 1e-15);
        assert!(C.josephson_energy(0.0).is_err());
        assert!(C.josephson_energy(-1.0).is_err());
    }

    #[test]
    fn tunable_energy_special_fluxes() {
        let ej = 3.0e-22;
        let phi0 = C.flux_quantum;
        assert_relative_eq!(C.tunable_josephson_energy(ej, 0.0).unwrap(), 2.0 * ej);
        assert!(C.tunable_josephson_energy(ej, phi0 / 2.0).unwrap() < 1e-15 * ej);
        assert_relative_eq!(C.tunable_josephson_energy(ej, phi0 / 3.0).unwrap(), ej, max_relative = 1e-12);
    }

    #[test]
    fn effective_length_reference_set() {
        let (_, dp) = reference();
        assert_relative_eq!(dp.leff0, 0.44e-3, max_relative = 0.01);
        assert_relative_eq!(dp.dleff, 0.11e-3, max_relative = 0.01);
        let l0 = reference_circuit().inductance_per_length();
        let half = C.effective_length(2.0 * dp.ej0, l0).unwrap();
        assert_relative_eq!(half, dp.leff0 / 2.0, max_relative = 1e-14);
        assert!(C.effective_length(0.0, l0).is_err());
    }

    #[test]
    fn plasma_frequency_reference_set() {
        let (cp, dp) = reference();
        assert_relative_eq!(dp.plasma_frequency / (2.0 * PI), 37.3e9, max_relative = 0.005);
        let quad = C.plasma_frequency(4.0 * dp.ej0, cp.junction_capacitance).unwrap();
        assert_relative_eq!(quad, 2.0 * dp.plasma_frequency, max_relative = 1e-14);
        let e_half = C.tunable_josephson_energy(dp.ej, C.flux_quantum / 2.0).unwrap();
        assert!(C.plasma_frequency(e_half, cp.junction_capacitance).unwrap() < 1e-6 * dp.plasma_frequency);
        assert!(C.plasma_frequency(dp.ej0, 0.0).is_err());
    }

    #[test]
    fn reference_set_warns_only_about_length() {
        let (_, dp) = reference();
        assert_eq!(dp.warnings.len(), 1);
        match dp.warnings[0] {
            ValidityWarning::LongEffectiveLength { k_leff, .. } => {
                assert_relative_eq!(k_leff, 0.4303, max_relative = 1e-3)
            }
            other => panic!("unexpected warning {other}"),
        }
    }

    #[test]
    fn zero_drive_gives_zero_modulation() {
        let mut cp = reference_circuit();
        cp.ej_drive_ratio = 0.0;
        let dp = derive_params(&C, &cp).unwrap();
        assert_eq!(dp.dleff, 0.0);
        assert_eq!(dp.dej, 0.0);
    }

    #[test]
    fn line_constants_are_consistent() {
        let cp = reference_circuit();
        let (l0, c0) = (cp.inductance_per_length(), cp.capacitance_per_length());
        assert_relative_eq!(1.0 / (l0 * c0).sqrt(), cp.phase_velocity, max_relative = 1e-15);
        assert_relative_eq!((l0 / c0).sqrt(), cp.char_impedance, max_relative = 1e-15);
    }

    #[test]
    fn flux_bias_matches_ratio() {
        let mut cp = reference_circuit();
        // 2|cos(π f)| = 1.3
        let f = (0.65f64).acos() / PI;
        cp.bias = JosephsonBias::Flux(f * C.flux_quantum);
        let dp = derive_params(&C, &cp).unwrap();
        let (_, reference) = reference();
        assert_relative_eq!(dp.leff0, reference.leff0, max_relative = 1e-12);
    }

    #[test]
    fn invalid_circuit_rejected() {
        let mut cp = reference_circuit();
        cp.ej_drive_ratio = 1.0;
        assert!(derive_params(&C, &cp).is_err());
        let mut cp = reference_circuit();
        cp.phase_velocity = 0.0;
        assert!(derive_params(&C, &cp).is_err());
        let mut cp = reference_circuit();
        cp.bias = JosephsonBias::Flux(C.flux_quantum / 2.0);
        assert!(derive_params(&C, &cp).is_err());
    }

    proptest! {
        #[test]
        fn effective_length_round_trip(e in 1e-24f64..1e-20, l0 in 1e-8f64..1e-5) {
            let l = C.effective_length(e, l0).unwrap();
            let target = (C.flux_quantum / (2.0 * PI)).powi(2);
            prop_assert!((l * e * l0 / target - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tunable_energy_even_and_periodic(x in -3.0f64..3.0) {
            let ej = 2e-22;
            let phi = x * C.flux_quantum;
            let base = C.tunable_josephson_energy(ej, phi).unwrap();
            let neg = C.tunable_josephson_energy(ej, -phi).unwrap();
            let shifted = C.tunable_josephson_energy(ej, phi + C.flux_quantum).unwrap();
            prop_assert!((base - neg).abs() <= 1e-12 * ej);
            prop_assert!((base - shifted).abs() <= 1e-12 * ej);
        }
    }
}
