//! Open resonator: a line section of effective length d_eff between a
//! coupling capacitor and the SQUID mirror.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitParams, DerivedParams};
use crate::error::{require_positive, DceError, Result};
use crate::kernel::ScatterKernel;
use crate::scattering::{mirror_kernel, MirrorKernel};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorSpec {
    /// ω_c = 1/(C_c Z0), rad/s
    pub coupling: f64,
    /// F
    pub gap_capacitance: f64,
    /// Physical distance from the gap to the SQUID, m.
    pub squid_position: f64,
    /// d_eff = d + L_eff0, m
    pub effective_length: f64,
    /// ω0 = 2πv/d_eff, rad/s
    pub base_mode: f64,
    /// m/s
    pub phase_velocity: f64,
}

impl ResonatorSpec {
    pub fn from_geometry(gap_capacitance: f64, squid_position: f64, leff0: f64, cp: &CircuitParams) -> Result<Self> {
        require_positive("gap_capacitance", gap_capacitance)?;
        require_positive("squid_position", squid_position)?;
        let coupling = 1.0 / (gap_capacitance * cp.char_impedance);
        let effective_length = squid_position + leff0;
        Ok(Self {
            coupling,
            gap_capacitance,
            squid_position,
            effective_length,
            base_mode: 2.0 * PI * cp.phase_velocity / effective_length,
            phase_velocity: cp.phase_velocity,
        })
    }

    pub fn from_coupling(coupling: f64, effective_length: f64, leff0: f64, cp: &CircuitParams) -> Result<Self> {
        require_positive("coupling", coupling)?;
        require_positive("effective_length", effective_length)?;
        let squid_position = effective_length - leff0;
        if squid_position <= 0.0 {
            return Err(DceError::Domain(format!(
                "effective length {effective_length:.4e} m does not exceed L_eff0 = {leff0:.4e} m"
            )));
        }
        Ok(Self {
            coupling,
            gap_capacitance: 1.0 / (coupling * cp.char_impedance),
            squid_position,
            effective_length,
            base_mode: 2.0 * PI * cp.phase_velocity / effective_length,
            phase_velocity: cp.phase_velocity,
        })
    }

    /// Places mode `mode` at `frequency` with quality factor `quality`.
    pub fn tuned(mode: usize, frequency: f64, quality: f64, leff0: f64, cp: &CircuitParams) -> Result<Self> {
        require_positive("frequency", frequency)?;
        let c = coupling_for_quality(mode, quality)?;
        let x = mode_root(mode, c)?;
        let base_mode = 2.0 * PI * frequency / x;
        Self::from_coupling(c * base_mode / (2.0 * PI), 2.0 * PI * cp.phase_velocity / base_mode, leff0, cp)
    }

    /// Chooses the length so that ω_0^res + ω_1^res = ω_d, with mode 0 at quality `q0`.
    pub fn two_mode(drive_frequency: f64, q0: f64, leff0: f64, cp: &CircuitParams) -> Result<Self> {
        require_positive("drive_frequency", drive_frequency)?;
        let c = coupling_for_quality(0, q0)?;
        let sum = mode_root(0, c)? + mode_root(1, c)?;
        let base_mode = 2.0 * PI * drive_frequency / sum;
        Self::from_coupling(c * base_mode / (2.0 * PI), 2.0 * PI * cp.phase_velocity / base_mode, leff0, cp)
    }

    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega / self.phase_velocity
    }

    /// 2πω_c/ω0, the coupling in units of the phase variable x = 2πω/ω0.
    fn coupling_phase(&self) -> f64 {
        2.0 * PI * self.coupling / self.base_mode
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub index: usize,
    /// rad/s
    pub frequency: f64,
    /// Full width Γ_n, rad/s
    pub width: f64,
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTable {
    pub modes: Vec<Mode>,
}

impl ModeTable {
    pub fn get(&self, index: usize) -> Result<&Mode> {
        self.modes
            .get(index)
            .ok_or_else(|| DceError::Domain(format!("mode {index} not in table of {} modes", self.modes.len())))
    }
}

pub fn coupling_transform(omega: f64, coupling: f64) -> Result<Matrix2<Complex64>> {
    require_positive("omega", omega)?;
    let y = I * (coupling / (2.0 * omega));
    let one = Complex64::new(1.0, 0.0);
    Ok(Matrix2::new(one - y, y, -y, one + y))
}

pub fn translate_modes(omega: f64, effective_length: f64, phase_velocity: f64) -> Result<Matrix2<Complex64>> {
    require_positive("omega", omega)?;
    let phase = omega / phase_velocity * effective_length;
    let zero = Complex64::new(0.0, 0.0);
    Ok(Matrix2::new(Complex64::from_polar(1.0, phase), zero, zero, Complex64::from_polar(1.0, -phase)))
}

fn denominator(omega: f64, spec: &ResonatorSpec) -> (Complex64, Complex64, Complex64) {
    let w = 2.0 * omega / spec.coupling;
    let half = Complex64::from_polar(1.0, spec.wavenumber(omega) * spec.effective_length);
    let full = half * half;
    (Complex64::new(1.0, -w) + full, half, Complex64::new(0.0, w))
}

fn checked_denominator(omega: f64, spec: &ResonatorSpec) -> Result<(Complex64, Complex64, Complex64)> {
    require_positive("omega", omega)?;
    let parts = denominator(omega, spec);
    if parts.0.norm() < 1e-14 {
        return Err(DceError::Singular { omega, detail: "resonator denominator vanishes".into() });
    }
    Ok(parts)
}

/// R_res = [1 + (1 + 2iω/ω_c) e^{2ikd}] / [(1 − 2iω/ω_c) + e^{2ikd}].
pub fn reflection_res(omega: f64, spec: &ResonatorSpec) -> Result<Complex64> {
    let (den, half, iw) = checked_denominator(omega, spec)?;
    Ok((1.0 + (1.0 + iw) * half * half) / den)
}

/// A_res = (2iω/ω_c) e^{ikd} / [(1 − 2iω/ω_c) + e^{2ikd}].
pub fn response_ares(omega: f64, spec: &ResonatorSpec) -> Result<Complex64> {
    let (den, half, iw) = checked_denominator(omega, spec)?;
    Ok(iw * half / den)
}

fn reflection_unchecked(omega: f64, spec: &ResonatorSpec) -> Complex64 {
    let (den, half, iw) = denominator(omega, spec);
    (1.0 + (1.0 + iw) * half * half) / den
}

fn response_unchecked(omega: f64, spec: &ResonatorSpec) -> Complex64 {
    if omega <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (den, half, iw) = denominator(omega, spec);
    iw * half / den
}

/// h(x) = x sin x − c cos x; its roots solve tan x = c/x.
fn mode_equation(x: f64, c: f64) -> (f64, f64) {
    let (s, co) = x.sin_cos();
    (x * s - c * co, s + x * co + c * s)
}

/// Root of tan x = c/x on (nπ, nπ + π/2).
fn mode_root(n: usize, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(DceError::Bracket { branch: n, detail: format!("coupling phase {c} is not positive") });
    }
    let mut lo = n as f64 * PI;
    let mut hi = lo + PI / 2.0;
    let sign_lo = mode_equation(lo, c).0.signum();
    let sign_hi = mode_equation(hi, c).0.signum();
    if sign_lo == sign_hi || sign_lo == 0.0 {
        return Err(DceError::Bracket {
            branch: n,
            detail: format!("no sign change on [{lo:.6}, {hi:.6}] for coupling phase {c:.6e}"),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mode_equation(mid, c).0.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    // Newton polish, kept inside the bracket.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let (h, dh) = mode_equation(x, c);
        if dh == 0.0 {
            break;
        }
        let next = x - h / dh;
        if !(next > n as f64 * PI && next < n as f64 * PI + PI / 2.0) {
            break;
        }
        let done = (next - x).abs() <= 4.0 * f64::EPSILON * x;
        x = next;
        if done {
            break;
        }
    }
    Ok(x)
}

fn quality_from_phase(n: usize, c: f64) -> Result<f64> {
    Ok(c * c / (2.0 * mode_root(n, c)?))
}

/// Coupling phase c = 2πω_c/ω0 giving mode `n` the quality factor `q`.
fn coupling_for_quality(n: usize, q: f64) -> Result<f64> {
    require_positive("quality", q)?;
    let mut lo = 1e-6;
    let mut hi = 1.0;
    while quality_from_phase(n, hi)? < q {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(DceError::Domain(format!("quality factor {q} out of range")));
        }
    }
    if quality_from_phase(n, lo)? > q {
        return Err(DceError::Domain(format!("quality factor {q} too small to realize for mode {n}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if quality_from_phase(n, mid)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mode frequencies from tan(2πω/ω0) = ω_c/ω, with Γ_n = 2(ω0/2π)(ω_n/ω_c)² and Q_n = ω_n/Γ_n.
pub fn find_modes(spec: &ResonatorSpec, n_max: usize) -> Result<ModeTable> {
    let c = spec.coupling_phase();
    let mut modes = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let x = mode_root(n, c)?;
        let frequency = x * spec.base_mode / (2.0 * PI);
        let width = 2.0 * (spec.base_mode / (2.0 * PI)) * (frequency / spec.coupling).powi(2);
        modes.push(Mode { index: n, frequency, width, quality: frequency / width });
    }
    Ok(ModeTable { modes })
}

/// Single-pole approximation of A_res near mode n.
pub fn breit_wigner_response(omega: f64, spec: &ResonatorSpec, mode: &Mode) -> Complex64 {
    let half = mode.width / 2.0;
    let sign = if mode.index.is_multiple_of(2) { -1.0 } else { 1.0 };
    sign * (spec.base_mode / (2.0 * PI)).sqrt() * half.sqrt() / Complex64::new(half, -(omega - mode.frequency))
}

/// Single-pole approximation of R_res near a mode.
pub fn breit_wigner_reflection(omega: f64, mode: &Mode) -> Complex64 {
    let half = mode.width / 2.0;
    let d = omega - mode.frequency;
    -Complex64::new(half, d) / Complex64::new(half, -d)
}

/// Peak position and full width at half maximum of |A_res|² around a mode.
pub fn measured_linewidth(spec: &ResonatorSpec, mode: &Mode) -> Result<(f64, f64)> {
    let power = |w: f64| response_unchecked(w, spec).norm_sqr();
    // Golden-section search for the maximum within ±Γ of the nominal frequency.
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (mode.frequency - mode.width, mode.frequency + mode.width);
    if a <= 0.0 {
        a = 0.5 * mode.frequency;
    }
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if power(c) > power(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if b - a < 1e-13 * mode.frequency {
            break;
        }
    }
    let peak = 0.5 * (a + b);
    let half = 0.5 * power(peak);
    let edge = |dir: f64| -> Result<f64> {
        let mut inner = peak;
        let mut step = mode.width / 4.0;
        let mut outer = peak + dir * step;
        while power(outer) > half {
            inner = outer;
            step *= 2.0;
            outer = peak + dir * step;
            if outer <= 0.0 || step > 10.0 * mode.frequency {
                return Err(DceError::Solver(format!("no half-maximum crossing for mode {}", mode.index)));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (inner + outer);
            if power(mid) > half {
                inner = mid;
            } else {
                outer = mid;
            }
            if (outer - inner).abs() < 1e-13 * mode.frequency {
                break;
            }
        }
        Ok(0.5 * (inner + outer))
    };
    let width = edge(1.0)? - edge(-1.0)?;
    Ok((peak, width))
}

/// ε_res = (δL_eff / d_eff)(ω_d / 2)(1 / Γ_n).
pub fn epsilon_res(spec: &ResonatorSpec, dp: &DerivedParams, cp: &CircuitParams, mode_index: usize) -> Result<f64> {
    let table = find_modes(spec, mode_index)?;
    let mode = table.get(mode_index)?;
    Ok(dp.dleff / spec.effective_length * (cp.drive_frequency / 2.0) / mode.width)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonatorKernel {
    pub spec: ResonatorSpec,
    pub mirror: MirrorKernel,
    pub modes: ModeTable,
    pub epsilon: f64,
}

pub fn resonator_kernel(spec: &ResonatorSpec, dp: &DerivedParams, cp: &CircuitParams) -> Result<ResonatorKernel> {
    let mirror = mirror_kernel(dp, cp)?;
    let modes = find_modes(spec, 5)?;
    let epsilon = dp.dleff / spec.effective_length * (cp.drive_frequency / 2.0) / modes.modes[0].width;
    if epsilon >= 1.0 {
        return Err(DceError::Model(format!(
            "resonator small parameter {epsilon:.4} >= 1; the drive is above the parametric threshold"
        )));
    }
    if epsilon > 0.1 {
        log::warn!("resonator small parameter {epsilon:.4} exceeds 0.1");
    }
    Ok(ResonatorKernel { spec: *spec, mirror, modes, epsilon })
}

impl ResonatorKernel {
    fn a(&self, omega: f64) -> Complex64 {
        response_unchecked(omega, &self.spec)
    }
}

impl ScatterKernel for ResonatorKernel {
    fn reflection(&self, omega: f64) -> Complex64 {
        reflection_unchecked(omega, &self.spec)
    }

    fn upper_sideband(&self, omega: f64) -> Complex64 {
        let other = omega + self.mirror.drive_frequency;
        self.mirror.upper_sideband(omega) * self.a(omega) * self.a(other)
    }

    fn lower_sideband(&self, omega: f64) -> Complex64 {
        let other = omega - self.mirror.drive_frequency;
        self.mirror.lower_sideband(omega) * self.a(omega) * self.a(other)
    }

    fn anomalous(&self, omega: f64) -> Complex64 {
        let partner = self.mirror.drive_frequency - omega;
        self.mirror.anomalous(omega) * self.a(omega) * self.a(partner).conj()
    }

    fn drive_frequency(&self) -> f64 {
        self.mirror.drive_frequency
    }

    fn small_parameter(&self) -> f64 {
        self.epsilon
    }

    fn label(&self) -> String {
        format!(
            "resonator(omega_c={:.6e}, d_eff={:.6e}, Q0={:.4})",
            self.spec.coupling, self.spec.effective_length, self.modes.modes[0].quality
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::fixtures::*;
    use crate::circuit::{derive_params, PhysicalConstants};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec_q(q: f64) -> (CircuitParams, DerivedParams, ResonatorSpec) {
        let (cp, dp) = reference();
        let spec = ResonatorSpec::tuned(0, cp.drive_frequency / 2.0, q, dp.leff0, &cp).unwrap();
        (cp, dp, spec)
    }

    fn matrix_close(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn coupling_transform_cases() {
        let id = Matrix2::identity();
        assert!(matrix_close(&coupling_transform(3.0, 0.0).unwrap(), &id, 0.0));
        let t = coupling_transform(1.0, 2.0).unwrap();
        let expect = Matrix2::new(Complex64::new(1.0, -1.0), I, -I, Complex64::new(1.0, 1.0));
        assert!(matrix_close(&t, &expect, 1e-15));
        for (w, wc) in [(0.3, 7.0), (5.0, 0.1), (1e10, 3e11)] {
            assert!((coupling_transform(w, wc).unwrap().determinant() - 1.0).norm() < 1e-12);
        }
        assert!(coupling_transform(0.0, 1.0).is_err());
    }

    #[test]
    fn translate_modes_cases() {
        let id = Matrix2::identity();
        assert!(matrix_close(&translate_modes(2.0, 0.0, 1.0).unwrap(), &id, 0.0));
        let p = translate_modes(PI, 1.0, 1.0).unwrap();
        assert!(matrix_close(&p, &(-id), 1e-15));
        let p = translate_modes(0.7, 3.1, 1.3).unwrap();
        assert!(matrix_close(&(p * p.adjoint()), &id, 1e-15));
    }

    #[test]
    fn reflection_matches_matrix_composition() {
        let (_, _, spec) = spec_q(20.0);
        for x in [0.1, 0.37, 0.5, 0.81, 1.3, 2.2] {
            let w = x * spec.base_mode;
            let m = translate_modes(w, spec.effective_length, spec.phase_velocity).unwrap()
                * coupling_transform(w, spec.coupling).unwrap();
            // Mirror at the far end: c_out = −c_in.
            let r = -(m[(0, 0)] + m[(1, 0)]) / (m[(0, 1)] + m[(1, 1)]);
            assert!((r - reflection_res(w, &spec).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn open_gap_reflects_fully() {
        let (cp, dp, base) = spec_q(20.0);
        let w = 0.3 * base.base_mode;
        let spec = ResonatorSpec::from_coupling(1e6 * w, base.effective_length, dp.leff0, &cp).unwrap();
        assert!((reflection_res(w, &spec).unwrap() - 1.0).norm() < 1e-5);
    }

    #[test]
    fn coupling_limits_of_response() {
        // ω_c → ∞ is an open gap: nothing enters. ω_c → 0 shorts the gap and
        // the field propagates unimpeded to the mirror.
        let (cp, dp, base) = spec_q(20.0);
        let w = 0.37 * base.base_mode;
        let open = ResonatorSpec::from_coupling(1e9 * w, base.effective_length, dp.leff0, &cp).unwrap();
        assert!(response_ares(w, &open).unwrap().norm() < 1e-8);
        let shorted = ResonatorSpec::from_coupling(1e-9 * w, base.effective_length, dp.leff0, &cp).unwrap();
        assert!((response_ares(w, &shorted).unwrap().norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn designed_spec_hits_targets() {
        let (cp, dp, spec) = spec_q(20.0);
        let modes = find_modes(&spec, 3).unwrap();
        assert_relative_eq!(modes.modes[0].frequency, cp.drive_frequency / 2.0, max_relative = 1e-12);
        assert_relative_eq!(modes.modes[0].quality, 20.0, max_relative = 1e-10);
        assert_relative_eq!(spec.coupling * spec.gap_capacitance * cp.char_impedance, 1.0, epsilon = 1e-15);
        assert_relative_eq!(spec.effective_length - spec.squid_position, dp.leff0, max_relative = 1e-12);

        let two = ResonatorSpec::two_mode(cp.drive_frequency, 50.0, dp.leff0, &cp).unwrap();
        let m = find_modes(&two, 1).unwrap();
        assert_relative_eq!(m.modes[0].frequency + m.modes[1].frequency, cp.drive_frequency, max_relative = 1e-12);
        assert_relative_eq!(m.modes[0].quality, 50.0, max_relative = 1e-10);
    }

    #[test]
    fn too_short_resonator_rejected() {
        let (cp, dp) = reference();
        assert!(ResonatorSpec::from_coupling(1e10, 0.5 * dp.leff0, dp.leff0, &cp).is_err());
    }

    #[test]
    fn mode_table_consistency() {
        for q in [20.0, 50.0, 200.0] {
            let (_, _, spec) = spec_q(q);
            let table = find_modes(&spec, 5).unwrap();
            for (j, m) in table.modes.iter().enumerate() {
                let x = 2.0 * PI * m.frequency / spec.base_mode;
                assert!(((x).tan() - spec.coupling / m.frequency).abs() < 1e-10);
                let n = j as f64;
                assert!(m.frequency > n * spec.base_mode / 2.0);
                assert!(m.frequency < (2.0 * n + 1.0) * spec.base_mode / 4.0);
                let q_formula = 2.0 * PI * spec.coupling.powi(2) / (2.0 * spec.base_mode * m.frequency);
                assert_relative_eq!(m.quality, q_formula, max_relative = 1e-12);
                assert_relative_eq!(m.width, m.frequency / m.quality, max_relative = 1e-14);
            }
            for pair in table.modes.windows(2) {
                assert!(pair[1].frequency > pair[0].frequency);
                assert!(pair[1].quality < pair[0].quality);
            }
        }
    }

    #[test]
    fn limiting_couplings() {
        let (cp, dp) = reference();
        let d_eff = 5e-3;
        let w0 = 2.0 * PI * cp.phase_velocity / d_eff;
        let weak = ResonatorSpec::from_coupling(1e-6 * w0, d_eff, dp.leff0, &cp).unwrap();
        let strong = ResonatorSpec::from_coupling(1e6 * w0, d_eff, dp.leff0, &cp).unwrap();
        let weak_modes = find_modes(&weak, 4).unwrap();
        let strong_modes = find_modes(&strong, 4).unwrap();
        for n in 1..=4 {
            let m = weak_modes.modes[n].frequency;
            assert_relative_eq!(m, n as f64 * w0 / 2.0, max_relative = 1e-6);
        }
        for n in 0..=4 {
            let m = strong_modes.modes[n].frequency;
            assert_relative_eq!(m, (2 * n + 1) as f64 * w0 / 4.0, max_relative = 1e-6);
        }
    }

    #[test]
    fn peak_response_near_single_pole_value() {
        for q in [20.0, 50.0, 100.0] {
            let (_, _, spec) = spec_q(q);
            let mode = find_modes(&spec, 0).unwrap().modes[0];
            let (peak, _) = measured_linewidth(&spec, &mode).unwrap();
            let expect = (spec.base_mode / (2.0 * PI)).sqrt() * (2.0 / mode.width).sqrt();
            let got = response_ares(peak, &spec).unwrap().norm();
            assert!((got / expect - 1.0).abs() < 0.1, "Q = {q}: {got} vs {expect}");
        }
    }

    #[test]
    fn weaker_coupling_narrows_and_raises_modes() {
        let (cp, dp) = reference();
        let d_eff = 6e-3;
        let w0 = 2.0 * PI * cp.phase_velocity / d_eff;
        let mut last: Option<(f64, f64)> = None;
        for ratio in [1.0, 1.5, 2.0, 3.0] {
            let spec = ResonatorSpec::from_coupling(ratio * w0, d_eff, dp.leff0, &cp).unwrap();
            let mode = find_modes(&spec, 0).unwrap().modes[0];
            let (peak, width) = measured_linewidth(&spec, &mode).unwrap();
            if let Some((p, w)) = last {
                assert!(width < w);
                assert!(peak > p);
            }
            last = Some((peak, width));
        }
    }

    #[test]
    fn single_pole_error_shrinks_as_inverse_root_q() {
        // The width and position of the single-pole form are first order in
        // 2ω/ω_c ∝ Q^{-1/2}, so its fidelity scales the same way.
        let mut previous = f64::INFINITY;
        for q in [20.0, 50.0, 100.0, 200.0] {
            let (_, _, spec) = spec_q(q);
            let mode = find_modes(&spec, 0).unwrap().modes[0];
            let mut worst: f64 = 0.0;
            for j in 0..=200 {
                let w = mode.frequency + mode.width * (j as f64 / 200.0 - 0.5);
                let bw = breit_wigner_response(w, &spec, &mode);
                worst = worst.max((response_ares(w, &spec).unwrap() - bw).norm() / bw.norm());
            }
            assert!(worst < 1.0 / q.sqrt(), "Q = {q}: {worst}");
            assert!(worst < previous);
            previous = worst;
        }
    }

    #[test]
    fn kernel_reduces_to_reflection_without_drive() {
        let mut cp = reference_circuit();
        cp.ej_drive_ratio = 0.0;
        let dp = derive_params(&PhysicalConstants::CODATA, &cp).unwrap();
        let spec = ResonatorSpec::tuned(0, cp.drive_frequency / 2.0, 20.0, dp.leff0, &cp).unwrap();
        let k = resonator_kernel(&spec, &dp, &cp).unwrap();
        for x in [0.2, 0.5, 0.7] {
            let w = x * cp.drive_frequency;
            assert_eq!(k.anomalous(w).norm(), 0.0);
            assert_eq!(k.upper_sideband(w).norm(), 0.0);
            assert_eq!(k.reflection(w), reflection_res(w, &spec).unwrap());
        }
    }

    #[test]
    fn kernel_epsilon_formula_and_threshold() {
        let (cp, dp, spec) = spec_q(20.0);
        let mode = find_modes(&spec, 0).unwrap().modes[0];
        let eps = epsilon_res(&spec, &dp, &cp, 0).unwrap();
        assert_relative_eq!(
            eps,
            dp.dleff / spec.effective_length * cp.drive_frequency / 2.0 / mode.width,
            max_relative = 1e-14
        );
        assert!(resonator_kernel(&spec, &dp, &cp).is_ok());
        let (_, _, high) = spec_q(50.0);
        assert!(matches!(resonator_kernel(&high, &dp, &cp), Err(DceError::Model(_))));
    }

    #[test]
    fn two_mode_kernel_is_doubly_peaked() {
        let (mut cp, _) = reference();
        cp.ej_drive_ratio = 0.02;
        let dp = derive_params(&PhysicalConstants::CODATA, &cp).unwrap();
        let spec = ResonatorSpec::two_mode(cp.drive_frequency, 50.0, dp.leff0, &cp).unwrap();
        let k = resonator_kernel(&spec, &dp, &cp).unwrap();
        let m = &k.modes.modes;
        let mid = k.anomalous(cp.drive_frequency / 2.0).norm();
        assert!(k.anomalous(m[0].frequency).norm() > 10.0 * mid);
        assert!(k.anomalous(m[1].frequency).norm() > 10.0 * mid);
    }

    proptest! {
        #[test]
        fn lossless_reflection(x in 0.01f64..3.0) {
            let (_, _, spec) = spec_q(20.0);
            let r = reflection_res(x * spec.base_mode, &spec).unwrap();
            prop_assert!((r.norm() - 1.0).abs() < 1e-10);
        }
    }
}
