//! Single SQUID mirror terminating a semi-infinite line: static reflection
//! and the first-order response to a harmonic modulation of E_J.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitParams, DerivedParams};
use crate::error::{require_positive, DceError, Result};
use crate::kernel::ScatterKernel;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Reflection including the junction capacitance,
/// R = −[(2π/Φ0)²E_J0 − ω²C_J + iω/Z0] / [(2π/Φ0)²E_J0 − ω²C_J − iω/Z0].
pub fn reflection_full(omega: f64, dp: &DerivedParams, cp: &CircuitParams) -> Result<Complex64> {
    require_positive("omega", omega)?;
    let re = dp.constants.phase_factor_sq() * dp.ej0 - omega * omega * cp.junction_capacitance;
    let im = cp.wavenumber(omega) / cp.inductance_per_length();
    Ok(-Complex64::new(re, im) / Complex64::new(re, -im))
}

/// R = −(1 + i k L_eff0)/(1 − i k L_eff0), the C_J → 0 limit.
pub fn reflection_simplified(omega: f64, leff0: f64, phase_velocity: f64) -> Result<Complex64> {
    require_positive("omega", omega)?;
    let x = omega / phase_velocity * leff0;
    Ok(-Complex64::new(1.0, x) / Complex64::new(1.0, -x))
}

/// S(ω′, ω″) = i (δL_eff / v) sqrt(ω′ω″) Θ(ω′)Θ(ω″).
pub fn pump_coupling(w1: f64, w2: f64, dleff: f64, phase_velocity: f64) -> Complex64 {
    if w1 > 0.0 && w2 > 0.0 {
        I * (dleff / phase_velocity * (w1 * w2).sqrt())
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// ε = (δL_eff / v)(ω_d / 2).
pub fn small_parameter(dleff: f64, phase_velocity: f64, drive_frequency: f64) -> Result<f64> {
    if !(dleff.is_finite() && dleff >= 0.0) {
        return Err(DceError::Domain(format!("dleff must be non-negative, got {dleff}")));
    }
    require_positive("phase_velocity", phase_velocity)?;
    require_positive("drive_frequency", drive_frequency)?;
    Ok(dleff / phase_velocity * drive_frequency / 2.0)
}

/// Plane at which input and output amplitudes are referred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferencePlane {
    /// The equivalent ideal mirror at x = L_eff0; R = −1.
    #[default]
    EffectiveMirror,
    /// The SQUID itself at x = 0; every coefficient picks up propagation phases.
    Squid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorKernel {
    pub drive_frequency: f64,
    pub dleff: f64,
    pub leff0: f64,
    pub phase_velocity: f64,
    pub epsilon: f64,
    pub plane: ReferencePlane,
}

pub fn mirror_kernel(dp: &DerivedParams, cp: &CircuitParams) -> Result<MirrorKernel> {
    MirrorKernel::new(dp, cp, ReferencePlane::EffectiveMirror)
}

impl MirrorKernel {
    pub fn new(dp: &DerivedParams, cp: &CircuitParams, plane: ReferencePlane) -> Result<Self> {
        let epsilon = small_parameter(dp.dleff, cp.phase_velocity, cp.drive_frequency)?;
        if epsilon >= 1.0 {
            return Err(DceError::Model(format!(
                "small parameter epsilon = {epsilon:.4} >= 1; perturbative kernel invalid"
            )));
        }
        if epsilon > 0.1 {
            log::warn!("small parameter epsilon = {epsilon:.4} exceeds 0.1");
        }
        Ok(Self {
            drive_frequency: cp.drive_frequency,
            dleff: dp.dleff,
            leff0: dp.leff0,
            phase_velocity: cp.phase_velocity,
            epsilon,
            plane,
        })
    }

    fn s(&self, w1: f64, w2: f64) -> Complex64 {
        pump_coupling(w1, w2, self.dleff, self.phase_velocity)
    }

    fn phase(&self, k_sum: f64) -> Complex64 {
        match self.plane {
            ReferencePlane::EffectiveMirror => Complex64::new(1.0, 0.0),
            ReferencePlane::Squid => Complex64::from_polar(1.0, k_sum * self.leff0),
        }
    }

    fn k(&self, omega: f64) -> f64 {
        omega.abs() / self.phase_velocity
    }
}

impl ScatterKernel for MirrorKernel {
    fn reflection(&self, omega: f64) -> Complex64 {
        -self.phase(2.0 * self.k(omega))
    }

    fn upper_sideband(&self, omega: f64) -> Complex64 {
        let other = omega + self.drive_frequency;
        self.s(omega, other) * self.phase(self.k(omega) + self.k(other))
    }

    fn lower_sideband(&self, omega: f64) -> Complex64 {
        let other = omega - self.drive_frequency;
        self.s(omega, other) * self.phase(self.k(omega) + self.k(other))
    }

    fn anomalous(&self, omega: f64) -> Complex64 {
        let partner = self.drive_frequency - omega;
        self.s(omega, partner).conj() * self.phase(self.k(omega) - self.k(partner))
    }

    fn drive_frequency(&self) -> f64 {
        self.drive_frequency
    }

    fn small_parameter(&self) -> f64 {
        self.epsilon
    }

    fn label(&self) -> String {
        match self.plane {
            ReferencePlane::EffectiveMirror => "mirror".into(),
            ReferencePlane::Squid => "mirror@squid-plane".into(),
        }
    }
}
