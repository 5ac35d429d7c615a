//! Measurable quantities computed from a [`ScatterKernel`]: photon flux,
//! two-photon correlations, g², squeezing spectra, and the ideal-mirror
//! photon-rate estimate.
//!
//! Spectra are dimensionless mode occupations; overall prefactors relating
//! them to voltage spectra are dropped.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::PhysicalConstants;
use crate::error::{require_positive, DceError, Result};
use crate::kernel::ScatterKernel;
use crate::quadrature::{integrate, integrate_complex, Tolerance};
use crate::series::SpectrumSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    /// K
    pub temperature: f64,
    pub constants: PhysicalConstants,
}

impl ThermalState {
    pub fn new(temperature: f64) -> Result<Self> {
        Self::with_constants(temperature, PhysicalConstants::CODATA)
    }

    pub fn with_constants(temperature: f64, constants: PhysicalConstants) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(DceError::Domain(format!("temperature must be non-negative, got {temperature}")));
        }
        Ok(Self { temperature, constants })
    }

    pub fn zero() -> Self {
        Self { temperature: 0.0, constants: PhysicalConstants::CODATA }
    }

    pub fn occupation(&self, omega: f64) -> Result<f64> {
        require_positive("omega", omega)?;
        if self.temperature == 0.0 {
            return Ok(0.0);
        }
        let x = self.constants.hbar * omega / (self.constants.boltzmann * self.temperature);
        Ok(1.0 / x.exp_m1())
    }
}

/// Bose–Einstein occupation n̄(ω) = 1/(e^{ħω/k_BT} − 1).
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    ThermalState::new(temperature)?.occupation(omega)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParts {
    /// Terms proportional to the input occupation.
    pub thermal: f64,
    /// Pair-creation term |A(ω)|², present at zero temperature.
    pub pair: f64,
}

impl FluxParts {
    pub fn total(&self) -> f64 {
        self.thermal + self.pair
    }
}

pub fn photon_flux_parts(kernel: &dyn ScatterKernel, thermal: &ThermalState, omega: f64) -> Result<FluxParts> {
    require_positive("omega", omega)?;
    let wd = kernel.drive_frequency();
    let weighted = |coef: Complex64, at: f64| -> Result<f64> {
        let p = coef.norm_sqr();
        if p == 0.0 {
            Ok(0.0)
        } else {
            Ok(p * thermal.occupation(at.abs())?)
        }
    };
    let anomalous = kernel.anomalous(omega);
    let thermal_part = weighted(kernel.reflection(omega), omega)?
        + weighted(kernel.upper_sideband(omega), omega + wd)?
        + weighted(kernel.lower_sideband(omega), omega - wd)?
        + weighted(anomalous, wd - omega)?;
    Ok(FluxParts { thermal: thermal_part, pair: anomalous.norm_sqr() })
}

/// n_out(ω) = |R|²n̄(ω) + |U|²n̄(ω+ω_d) + |D|²n̄(ω−ω_d) + |A|²[1 + n̄(ω_d−ω)].
pub fn photon_flux(kernel: &dyn ScatterKernel, thermal: &ThermalState, omega: f64) -> Result<f64> {
    Ok(photon_flux_parts(kernel, thermal, omega)?.total())
}

/// ⟨a_out(ω_d/2 − Δω) a_out(ω_d/2 + Δω)⟩ coefficient,
/// R(ω_d/2 − Δω) A(ω_d/2 + Δω) [1 + n̄(ω_d/2 − Δω)].
pub fn pair_correlation(kernel: &dyn ScatterKernel, thermal: &ThermalState, delta: f64) -> Result<Complex64> {
    let half = kernel.drive_frequency() / 2.0;
    if !(0.0..half).contains(&delta) {
        return Err(DceError::Domain(format!("detuning {delta:.6e} outside [0, w_d/2)")));
    }
    let lower = half - delta;
    let upper = half + delta;
    Ok(kernel.reflection(lower) * kernel.anomalous(upper) * (1.0 + thermal.occupation(lower)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceTerms {
    /// ∫ ω|A|² dω
    pub intensity: f64,
    /// ∫ ω|A|² e^{iωτ} dω
    pub normal: Complex64,
    /// ∫ sqrt(ω(ω_d−ω)) R(ω_d−ω) A(ω) e^{iωτ} dω
    pub anomalous: Complex64,
}

impl CoherenceTerms {
    pub fn g2(&self) -> f64 {
        let g1 = self.intensity;
        (g1 * g1 + self.normal.norm_sqr() + self.anomalous.norm_sqr()) / (g1 * g1)
    }
}

fn g2_tolerance() -> Tolerance {
    Tolerance { abs: 1e-10, rel: 1e-11, max_intervals: 20_000 }
}

/// Zero-temperature coherence integrals at delay τ, with ω measured in units of ω_d.
pub fn coherence_terms(kernel: &dyn ScatterKernel, tau: f64) -> Result<CoherenceTerms> {
    let wd = kernel.drive_frequency();
    let phase = wd * tau;
    let tol = g2_tolerance();
    let (intensity, _) = integrate(|x| x * kernel.anomalous(x * wd).norm_sqr(), 0.0, 1.0, tol)?;
    if intensity <= 0.0 {
        return Err(DceError::Model("kernel creates no photons; g2 undefined".into()));
    }
    let normal = integrate_complex(
        |x| Complex64::from_polar(x * kernel.anomalous(x * wd).norm_sqr(), x * phase),
        0.0,
        1.0,
        tol,
    )?
    .value;
    let anomalous = integrate_complex(
        |x| {
            (x * (1.0 - x)).sqrt()
                * kernel.reflection((1.0 - x) * wd)
                * kernel.anomalous(x * wd)
                * Complex64::from_polar(1.0, x * phase)
        },
        0.0,
        1.0,
        tol,
    )?
    .value;
    Ok(CoherenceTerms { intensity, normal, anomalous })
}

/// g²(τ) = G²(τ) / G¹(0)² at zero temperature.
pub fn coherence_g2(kernel: &dyn ScatterKernel, tau_grid: &[f64]) -> Result<SpectrumSeries> {
    let values: Vec<f64> =
        tau_grid.par_iter().map(|&tau| coherence_terms(kernel, tau).map(|t| t.g2())).collect::<Result<_>>()?;
    let mut s = SpectrumSeries::new("tau", "s", tau_grid.to_vec())?
        .with_meta("kernel", kernel.label())
        .with_meta("temperature_k", 0.0);
    s.push_real("g2", "1", values)?;
    Ok(s)
}

/// S_X^θ(Δω) with the local oscillator at ω_d/2:
/// 1 + |A(ω₊)|² + |A(ω₋)|² + Re{e^{2iθ}[R(ω₊)A(ω₋) + R(ω₋)A(ω₊)]}, ω± = ω_d/2 ± Δω.
/// For the mirror kernel |A(ω₊)| = |A(ω₋)| = |S(ω₊, ω₋)|.
pub fn squeezing_at(kernel: &dyn ScatterKernel, theta: f64, delta: f64) -> f64 {
    let half = kernel.drive_frequency() / 2.0;
    if delta.abs() >= half {
        return 1.0;
    }
    let (up, down) = (half + delta, half - delta);
    let (a_up, a_down) = (kernel.anomalous(up), kernel.anomalous(down));
    let cross = kernel.reflection(up) * a_down + kernel.reflection(down) * a_up;
    1.0 + a_up.norm_sqr() + a_down.norm_sqr() + (Complex64::from_polar(1.0, 2.0 * theta) * cross).re
}

pub fn squeezing_spectrum(kernel: &dyn ScatterKernel, theta: f64, delta_grid: &[f64]) -> Result<SpectrumSeries> {
    let values: Vec<f64> = delta_grid.par_iter().map(|&d| squeezing_at(kernel, theta, d)).collect();
    let mut s = SpectrumSeries::new("delta_omega", "rad/s", delta_grid.to_vec())?
        .with_meta("kernel", kernel.label())
        .with_meta("theta", theta)
        .with_meta("lo_frequency", kernel.drive_frequency() / 2.0);
    s.push_real("s_x", "1", values)?;
    Ok(s)
}

/// ∫ S_X^θ dΔω over |Δω| < ω_d/2, using Δω = (ω_d/2) sin t to absorb the
/// square-root behaviour at the band edges.
pub fn total_squeezing_at(kernel: &dyn ScatterKernel, theta: f64) -> Result<f64> {
    let half = kernel.drive_frequency() / 2.0;
    let tol = Tolerance { abs: 1e-12, rel: 1e-12, max_intervals: 4000 };
    let (v, _) = integrate(|t| squeezing_at(kernel, theta, half * t.sin()) * t.cos(), -PI / 2.0, PI / 2.0, tol)?;
    Ok(half * v)
}

/// Total squeezing in the θ = π/4 quadrature.
pub fn total_squeezing(kernel: &dyn ScatterKernel) -> Result<f64> {
    total_squeezing_at(kernel, PI / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorMotionParams {
    /// m
    pub amplitude: f64,
    /// rad/s
    pub mirror_drive: f64,
    pub cavity_quality: Option<f64>,
}

impl MirrorMotionParams {
    pub fn validate(&self, constants: &PhysicalConstants) -> Result<()> {
        require_positive("amplitude", self.amplitude)?;
        require_positive("mirror_drive", self.mirror_drive)?;
        if let Some(q) = self.cavity_quality {
            require_positive("cavity_quality", q)?;
        }
        if self.amplitude * self.mirror_drive >= constants.light_speed {
            return Err(DceError::Domain("mirror speed a*Omega must stay below c".into()));
        }
        Ok(())
    }
}

/// (Ω/3π)(aΩ/c)², times Q for a cavity.
pub fn photon_rate(params: &MirrorMotionParams) -> Result<f64> {
    let c = PhysicalConstants::CODATA.light_speed;
    params.validate(&PhysicalConstants::CODATA)?;
    let w = params.mirror_drive;
    let rate = w / (3.0 * PI) * (params.amplitude * w / c).powi(2);
    Ok(rate * params.cavity_quality.unwrap_or(1.0))
}

/// (a/c)² ω(Ω − ω) Θ(Ω − ω).
pub fn dce_spectrum_shape(amplitude: f64, mirror_drive: f64, omega: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    let c = PhysicalConstants::CODATA.light_speed;
    if omega >= mirror_drive {
        return Ok(0.0);
    }
    Ok((amplitude / c).powi(2) * omega * (mirror_drive - omega))
}
