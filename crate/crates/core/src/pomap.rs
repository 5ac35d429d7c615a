//! Degenerate parametric oscillator equivalent of a resonator tuned to
//! ω_0^res = ω_d/2, and its comparison against the resonator kernel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitParams, DerivedParams};
use crate::error::{DceError, Result};
use crate::kernel::ScatterKernel;
use crate::resonator::{find_modes, reflection_res, resonator_kernel, ResonatorSpec};
use crate::series::SpectrumSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct POParams {
    /// γ, rad/s
    pub damping: f64,
    /// ε_PO, rad/s
    pub pump: Complex64,
    /// ω_0^res − ω_d/2, rad/s
    pub detuning: f64,
}

impl POParams {
    /// |ε_PO| / (γ/2); below threshold when < 1.
    pub fn threshold_ratio(&self) -> f64 {
        self.pump.norm() / (self.damping / 2.0)
    }

    pub fn below_threshold(&self) -> bool {
        self.threshold_ratio() < 1.0
    }
}

/// γ = Γ_0 and ε_PO = −i δL_eff ω_d / (4 d_eff).
pub fn po_params(spec: &ResonatorSpec, dp: &DerivedParams, cp: &CircuitParams) -> Result<POParams> {
    let mode = find_modes(spec, 0)?.modes[0];
    let detuning = mode.frequency - cp.drive_frequency / 2.0;
    if detuning.abs() > 1e-3 * mode.width {
        log::warn!(
            "mode 0 is detuned from w_d/2 by {:.3} linewidths; the oscillator mapping assumes resonance",
            detuning / mode.width
        );
    }
    let pump = Complex64::new(0.0, -dp.dleff * cp.drive_frequency / (4.0 * spec.effective_length));
    Ok(POParams { damping: mode.width, pump, detuning })
}

/// F(ω) = [(γ/2)² + ω² + |ε|²]/[(γ/2 − iω)² − |ε|²], G(ω) = γε/[(γ/2 − iω)² − |ε|²],
/// with ω the detuning from ω_d/2.
pub fn po_kernel(omega: f64, p: &POParams) -> Result<(Complex64, Complex64)> {
    if !p.below_threshold() {
        return Err(DceError::Model(format!(
            "pump at {:.4} of threshold; linear oscillator has no steady state",
            p.threshold_ratio()
        )));
    }
    let half = p.damping / 2.0;
    let e2 = p.pump.norm_sqr();
    let den = Complex64::new(half, -omega).powi(2) - e2;
    Ok(((half * half + omega * omega + e2) / den, p.pump * p.damping / den))
}

/// Quadrature spectrum of the oscillator output,
/// 1 + |G(ω)|² + |G(−ω)|² + Re{e^{2iθ}[F(ω)G(−ω) + F(−ω)G(ω)]}.
/// The oscillator's F carries the opposite sign to R_res, so its θ matches the
/// resonator kernel's θ + π/2.
pub fn po_squeezing(p: &POParams, theta: f64, omega: f64) -> Result<f64> {
    let (f_up, g_up) = po_kernel(omega, p)?;
    let (f_dn, g_dn) = po_kernel(-omega, p)?;
    let cross = f_up * g_dn + f_dn * g_up;
    Ok(1.0 + g_up.norm_sqr() + g_dn.norm_sqr() + (Complex64::from_polar(1.0, 2.0 * theta) * cross).re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// Columns `raw` = |R_res − F| and `aligned` = |R_res − e^{iφ}F|.
    pub elastic: SpectrumSeries,
    /// Columns `raw` = |A − G| and `aligned` = |A − e^{iφ}G|, with A(ω_d/2 + ω) the anomalous kernel coefficient.
    pub anomalous: SpectrumSeries,
    pub elastic_phase: f64,
    pub anomalous_phase: f64,
    /// max aligned elastic deviation / max |F|
    pub elastic_deviation: f64,
    /// max aligned anomalous deviation / max |G|; zero without pumping
    pub anomalous_deviation: f64,
    pub params: POParams,
}

fn best_phase(target: &[Complex64], model: &[Complex64]) -> f64 {
    target.iter().zip(model).map(|(t, m)| m.conj() * t).sum::<Complex64>().arg()
}

/// Compares the resonator kernel with the oscillator over |ω| ≤ window on `points` samples.
pub fn equivalence_report(
    spec: &ResonatorSpec,
    dp: &DerivedParams,
    cp: &CircuitParams,
    window: f64,
    points: usize,
) -> Result<EquivalenceReport> {
    let params = po_params(spec, dp, cp)?;
    let quality = find_modes(spec, 0)?.modes[0].quality;
    if quality < 20.0 {
        log::warn!("Q_0 = {quality:.2} is below the high-Q regime of the oscillator mapping");
    }
    if points < 2 || !(window > 0.0 && window < cp.drive_frequency / 2.0) {
        return Err(DceError::Domain(format!("invalid comparison window {window:.6e} with {points} points")));
    }
    let kernel = resonator_kernel(spec, dp, cp)?;
    let half = cp.drive_frequency / 2.0;
    let x: Vec<f64> = (0..points).map(|j| -window + 2.0 * window * j as f64 / (points - 1) as f64).collect();

    let mut f = Vec::with_capacity(points);
    let mut g = Vec::with_capacity(points);
    let mut r = Vec::with_capacity(points);
    let mut a = Vec::with_capacity(points);
    for &w in &x {
        let (fw, gw) = po_kernel(w, &params)?;
        f.push(fw);
        g.push(gw);
        r.push(reflection_res(half + w, spec)?);
        a.push(kernel.anomalous(half + w));
    }

    let series = |target: &[Complex64], model: &[Complex64], phase: f64| -> Result<(SpectrumSeries, f64)> {
        let rot = Complex64::from_polar(1.0, phase);
        let raw: Vec<f64> = target.iter().zip(model).map(|(t, m)| (t - m).norm()).collect();
        let aligned: Vec<f64> = target.iter().zip(model).map(|(t, m)| (t - rot * m).norm()).collect();
        let scale = model.iter().map(|m| m.norm()).fold(0.0, f64::max);
        let worst = aligned.iter().copied().fold(0.0, f64::max);
        let mut s = SpectrumSeries::new("omega", "rad/s", x.clone())?
            .with_meta("kernel", kernel.label())
            .with_meta("phase_rotation", phase)
            .with_meta("po_damping", params.damping)
            .with_meta("po_pump_abs", params.pump.norm());
        s.push_real("raw", "1", raw)?;
        s.push_real("aligned", "1", aligned)?;
        Ok((s, if scale > 0.0 { worst / scale } else { 0.0 }))
    };

    let elastic_phase = best_phase(&r, &f);
    let anomalous_phase = if params.pump.norm() > 0.0 { best_phase(&a, &g) } else { 0.0 };
    let (elastic, elastic_deviation) = series(&r, &f, elastic_phase)?;
    let (anomalous, anomalous_deviation) = series(&a, &g, anomalous_phase)?;
    Ok(EquivalenceReport {
        elastic,
        anomalous,
        elastic_phase,
        anomalous_phase,
        elastic_deviation,
        anomalous_deviation,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::fixtures::*;
    use crate::circuit::{derive_params, PhysicalConstants};
    use crate::resonator::epsilon_res;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn setup(q: f64, drive_ratio: f64) -> (CircuitParams, DerivedParams, ResonatorSpec) {
        let mut cp = reference_circuit();
        cp.ej_drive_ratio = drive_ratio;
        let dp = derive_params(&PhysicalConstants::CODATA, &cp).unwrap();
        let spec = ResonatorSpec::tuned(0, cp.drive_frequency / 2.0, q, dp.leff0, &cp).unwrap();
        (cp, dp, spec)
    }

    #[test]
    fn mapping_basics() {
        let (cp, dp, spec) = setup(50.0, 0.0);
        let p = po_params(&spec, &dp, &cp).unwrap();
        assert_eq!(p.pump.norm(), 0.0);
        assert!(p.below_threshold());

        let (cp, dp, spec) = setup(50.0, 0.01);
        let p = po_params(&spec, &dp, &cp).unwrap();
        assert_eq!(p.pump.re, 0.0);
        assert!(p.pump.im < 0.0);
        let gamma = find_modes(&spec, 0).unwrap().modes[0].width;
        let expect = dp.dleff / spec.effective_length * cp.drive_frequency / (2.0 * gamma);
        assert_relative_eq!(p.threshold_ratio(), expect, max_relative = 1e-14);
        assert_relative_eq!(p.threshold_ratio(), epsilon_res(&spec, &dp, &cp, 0).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn threshold_flag_matches_resonator_epsilon() {
        for ratio in [0.005, 0.02, 0.05, 0.1, 0.3] {
            let (cp, dp, spec) = setup(50.0, ratio);
            let p = po_params(&spec, &dp, &cp).unwrap();
            let eps = epsilon_res(&spec, &dp, &cp, 0).unwrap();
            assert_eq!(p.below_threshold(), eps < 1.0);
            assert_eq!(resonator_kernel(&spec, &dp, &cp).is_ok(), eps < 1.0);
        }
    }

    #[test]
    fn pump_scales_linearly() {
        let (cp1, dp1, spec) = setup(50.0, 0.01);
        let (cp2, dp2, _) = setup(50.0, 0.03);
        let p1 = po_params(&spec, &dp1, &cp1).unwrap();
        let p2 = po_params(&spec, &dp2, &cp2).unwrap();
        assert_relative_eq!(p2.pump.im / p1.pump.im, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn kernel_without_pump() {
        let p = POParams { damping: 2.0, pump: Complex64::new(0.0, 0.0), detuning: 0.0 };
        for w in [-3.0, 0.0, 0.4] {
            let (f, g) = po_kernel(w, &p).unwrap();
            let expect = Complex64::new(1.0, w) / Complex64::new(1.0, -w);
            assert!((f - expect).norm() < 1e-15);
            assert_relative_eq!(f.norm(), 1.0, epsilon = 1e-15);
            assert_eq!(g.norm(), 0.0);
        }
    }

    #[test]
    fn kernel_at_zero_detuning() {
        let p = POParams { damping: 2.0, pump: Complex64::new(0.0, -0.3), detuning: 0.0 };
        let (_, g) = po_kernel(0.0, &p).unwrap();
        let expect = p.pump * 2.0 / (1.0 - 0.09);
        assert!((g - expect).norm() < 1e-15);
        for w in [0.1, 0.5, 2.0] {
            assert!(po_kernel(w, &p).unwrap().1.norm() < g.norm());
        }
        let over = POParams { pump: Complex64::new(0.0, -1.0), ..p };
        assert!(matches!(po_kernel(0.0, &over), Err(DceError::Model(_))));
    }

    #[test]
    fn deviations_shrink_with_quality() {
        let mut last = (f64::INFINITY, f64::INFINITY);
        for q in [50.0, 100.0, 200.0] {
            // Keep the pump at a fixed fraction of threshold.
            let (cp, dp, spec) = setup(q, 0.01);
            let scale = 0.05 / epsilon_res(&spec, &dp, &cp, 0).unwrap();
            let (cp, dp, spec) = setup(q, 0.01 * scale);
            let gamma = find_modes(&spec, 0).unwrap().modes[0].width;
            let rep = equivalence_report(&spec, &dp, &cp, 2.0 * gamma, 201).unwrap();
            assert!(rep.elastic_deviation < last.0);
            assert!(rep.anomalous_deviation < last.1);
            last = (rep.elastic_deviation, rep.anomalous_deviation);
        }
    }

    #[test]
    fn unpumped_report_is_reflection_only() {
        let (cp, dp, spec) = setup(100.0, 0.0);
        let gamma = find_modes(&spec, 0).unwrap().modes[0].width;
        let rep = equivalence_report(&spec, &dp, &cp, 2.0 * gamma, 101).unwrap();
        assert_eq!(rep.anomalous_deviation, 0.0);
        // F = −R_BW, so the raw difference is close to 2 and the aligned one small.
        let raw = rep.elastic.real_column("raw").unwrap();
        assert!(raw.iter().all(|&d| d > 1.5));
        assert!(rep.elastic_deviation < 1.5 / 100f64.sqrt());
    }

    #[test]
    fn po_squeezing_tracks_resonator_quadrature() {
        use crate::observables::squeezing_at;
        use std::f64::consts::PI;
        let (cp, dp, spec) = setup(200.0, 0.002);
        let p = po_params(&spec, &dp, &cp).unwrap();
        let kernel = resonator_kernel(&spec, &dp, &cp).unwrap();
        let scale = 1.0 - squeezing_at(&kernel, PI / 4.0, 0.0);
        for &d in &[0.0, 0.3, 1.0] {
            let w = d * p.damping;
            for &theta in &[PI / 4.0, -PI / 4.0, 0.1] {
                let res = squeezing_at(&kernel, theta, w);
                let po = po_squeezing(&p, theta + PI / 2.0, w).unwrap();
                assert!((res - po).abs() < 0.1 * scale, "{d} {theta}: {res} vs {po}");
            }
        }
        let squeezed = po_squeezing(&p, -PI / 4.0, 0.0).unwrap();
        assert!(squeezed < 1.0);
        let (f, g) = po_kernel(0.0, &p).unwrap();
        assert!(((f.norm() - g.norm()).powi(2) - squeezed).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn po_normalization(gamma in 0.1f64..10.0, frac in 0.0f64..0.99, phase in 0.0f64..6.3, w in -20.0f64..20.0) {
            let p = POParams { damping: gamma, pump: Complex64::from_polar(frac * gamma / 2.0, phase), detuning: 0.0 };
            let (f, g) = po_kernel(w, &p).unwrap();
            prop_assert!((f.norm_sqr() - g.norm_sqr() - 1.0).abs() < 1e-12 * f.norm_sqr().max(1.0));
        }
    }
}
