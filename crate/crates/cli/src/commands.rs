//! One function per subcommand. Each returns the series it wants written;
//! file naming and serialization live in `output`.

use std::f64::consts::PI;

use dce_core::circuit::{CircuitParams, DerivedParams};
use dce_core::numsolver::{sideband_sweep, CONDITION_LIMIT};
use dce_core::observables::{
    coherence_g2, pair_correlation, photon_flux_parts, photon_rate, squeezing_at, total_squeezing_at,
    MirrorMotionParams, ThermalState,
};
use dce_core::pomap::{equivalence_report, po_params, po_squeezing};
use dce_core::resonator::{epsilon_res, resonator_kernel, ResonatorKernel, ResonatorSpec};
use dce_core::scattering::{mirror_kernel, MirrorKernel};
use dce_core::series::SpectrumSeries;
use dce_core::ScatterKernel;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Layout, ResonatorScenario, RunConfig};
use crate::error::CliError;

pub const DEFAULT_MIRROR_TEMPERATURES_MK: [f64; 3] = [0.0, 25.0, 50.0];

/// Command-line overrides shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub temperatures_mk: Option<Vec<f64>>,
    pub sidebands: Option<usize>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Default)]
pub struct Emission {
    /// (file suffix, series); an empty suffix means the bare output stem.
    pub series: Vec<(String, SpectrumSeries)>,
    /// (file suffix, JSON text) written verbatim.
    pub sidecars: Vec<(String, String)>,
    pub text: String,
}

/// 25 → "T25mK", 2.5 → "T2.5mK".
pub fn temperature_tag(mk: f64) -> String {
    format!("T{mk}mK")
}

fn temperatures(cfg: &RunConfig, ov: &Overrides, scenario: Option<&ResonatorScenario>, default: &[f64]) -> Vec<f64> {
    ov.temperatures_mk
        .clone()
        .or_else(|| scenario.and_then(|s| s.temperatures_mk.clone()))
        .or_else(|| cfg.run.temperatures_mk.clone())
        .unwrap_or_else(|| default.to_vec())
}

fn grid_points(cfg: &RunConfig, ov: &Overrides, section: Option<usize>, default: usize) -> Result<usize, CliError> {
    let m = ov.grid_points.or(section).or(cfg.run.grid_points).unwrap_or(default);
    if m < 2 {
        return Err(CliError::Config(format!("grid points must be at least 2, got {m}")));
    }
    Ok(m)
}

fn sidebands(cfg: &RunConfig, ov: &Overrides) -> Result<usize, CliError> {
    let n = ov.sidebands.or(cfg.run.sidebands).unwrap_or(5);
    if n == 0 || n > 64 {
        return Err(CliError::Config(format!("sideband order must be in 1..=64, got {n}")));
    }
    Ok(n)
}

fn thermal(cfg: &RunConfig, mk: f64) -> Result<ThermalState, CliError> {
    ThermalState::with_constants(mk * 1e-3, cfg.constants()).map_err(CliError::from_core)
}

/// Midpoints (j + ½)/M of M equal cells on (0, 1).
pub fn half_offset_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect()
}

fn provenance(mut s: SpectrumSeries, command: &str, cp: &CircuitParams, dp: &DerivedParams) -> SpectrumSeries {
    let bias = match cp.bias {
        dce_core::circuit::JosephsonBias::Ratio(r) => format!("ej0_over_ej={r}"),
        dce_core::circuit::JosephsonBias::Flux(f) => format!("ext_flux_wb={f:e}"),
    };
    s = s
        .with_meta("command", command)
        .with_meta("generator", concat!("dce ", env!("CARGO_PKG_VERSION")))
        .with_meta("normalization", "dimensionless mode occupation; overall prefactors dropped")
        .with_meta("critical_current_a", format!("{:e}", cp.critical_current))
        .with_meta("junction_capacitance_f", format!("{:e}", cp.junction_capacitance))
        .with_meta("phase_velocity_m_per_s", format!("{:e}", cp.phase_velocity))
        .with_meta("char_impedance_ohm", cp.char_impedance)
        .with_meta("bias", bias)
        .with_meta("ej_drive_ratio", cp.ej_drive_ratio)
        .with_meta("drive_frequency_rad_s", format!("{:e}", cp.drive_frequency))
        .with_meta("leff0_m", format!("{:e}", dp.leff0))
        .with_meta("dleff_m", format!("{:e}", dp.dleff))
        .with_meta("plasma_frequency_rad_s", format!("{:e}", dp.plasma_frequency))
        .with_meta("flux_quantum_wb", format!("{:e}", dp.constants.flux_quantum))
        .with_meta("hbar_js", format!("{:e}", dp.constants.hbar))
        .with_meta("boltzmann_j_per_k", format!("{:e}", dp.constants.boltzmann));
    if !dp.warnings.is_empty() {
        let w: Vec<String> = dp.warnings.iter().map(|w| w.to_string()).collect();
        s = s.with_meta("validity_warnings", w.join("; "));
    }
    s
}

fn resonator_spec(s: &ResonatorScenario, cp: &CircuitParams, dp: &DerivedParams) -> Result<ResonatorSpec, CliError> {
    let spec = match s.layout {
        Layout::Single => {
            let x = s.mode_frequency_over_drive.expect("validated");
            ResonatorSpec::tuned(0, x * cp.drive_frequency, s.q0, dp.leff0, cp)
        }
        Layout::TwoMode => ResonatorSpec::two_mode(cp.drive_frequency, s.q0, dp.leff0, cp),
    };
    spec.map_err(CliError::from_core)
}

struct Scenario {
    cp: CircuitParams,
    dp: DerivedParams,
    spec: ResonatorSpec,
    kernel: ResonatorKernel,
}

fn build_scenario(cfg: &RunConfig, s: &ResonatorScenario) -> Result<Scenario, CliError> {
    let (cp, dp) = cfg.derive(s.ej_drive_ratio)?;
    let spec = resonator_spec(s, &cp, &dp)?;
    let kernel = resonator_kernel(&spec, &dp, &cp).map_err(CliError::from_core)?;
    Ok(Scenario { cp, dp, spec, kernel })
}

fn scenario_meta(mut series: SpectrumSeries, s: &ResonatorScenario, sc: &Scenario) -> SpectrumSeries {
    series = series
        .with_meta("scenario", &s.name)
        .with_meta("resonator_coupling_rad_s", format!("{:e}", sc.spec.coupling))
        .with_meta("resonator_effective_length_m", format!("{:e}", sc.spec.effective_length))
        .with_meta("resonator_epsilon", sc.kernel.epsilon);
    for m in &sc.kernel.modes.modes {
        series = series.with_meta(
            &format!("mode_{}", m.index),
            format!("omega_over_omega_d={} q={}", m.frequency / sc.cp.drive_frequency, m.quality),
        );
    }
    series
}

pub fn mirror_spectrum(cfg: &RunConfig, ov: &Overrides) -> Result<Emission, CliError> {
    let (cp, dp) = cfg.derive(None)?;
    let kernel = mirror_kernel(&dp, &cp).map_err(CliError::from_core)?;
    let m = grid_points(cfg, ov, None, 200)?;
    let order = sidebands(cfg, ov)?;
    let x = half_offset_grid(m);
    let wd = cp.drive_frequency;
    let bases: Vec<f64> = x.iter().map(|x| x * wd).collect();
    let mut out = Emission::default();
    for mk in temperatures(cfg, ov, None, &DEFAULT_MIRROR_TEMPERATURES_MK) {
        let th = thermal(cfg, mk)?;
        let analytic: Vec<_> = bases
            .iter()
            .map(|&w| photon_flux_parts(&kernel, &th, w))
            .collect::<Result<_, _>>()
            .map_err(CliError::from_core)?;
        let numeric = sideband_sweep(&bases, order, &cp, &dp, &th).map_err(CliError::Numerical)?;
        let mut s = SpectrumSeries::new("omega_over_omega_d", "1", x.clone()).map_err(CliError::Numerical)?;
        s.push_real("n_thermal", "1", analytic.iter().map(|p| p.thermal).collect())?;
        s.push_real("n_total_analytic", "1", analytic.iter().map(|p| p.total()).collect())?;
        s.push_real("n_total_numeric", "1", numeric.iter().map(|p| p.flux).collect())?;
        let s = provenance(s, "mirror-spectrum", &cp, &dp)
            .with_meta("kernel", kernel.label())
            .with_meta("epsilon", kernel.epsilon)
            .with_meta("temperature_mk", mk)
            .with_meta("grid", format!("half-offset midpoints, {m} points on (0, 1)"))
            .with_meta("sidebands", order);
        out.series.push((temperature_tag(mk), s));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ModeRow {
    index: usize,
    frequency_rad_s: f64,
    frequency_over_omega_d: f64,
    width_rad_s: f64,
    width_over_omega_d: f64,
    quality: f64,
}

#[derive(Serialize)]
struct ModeSidecar<'a> {
    scenario: &'a str,
    drive_frequency_rad_s: f64,
    coupling_rad_s: f64,
    effective_length_m: f64,
    epsilon_res: f64,
    modes: Vec<ModeRow>,
}

pub fn resonator_spectrum(cfg: &RunConfig, ov: &Overrides) -> Result<Emission, CliError> {
    if cfg.resonator.is_empty() {
        return Err(CliError::Config("resonator-spectrum needs at least one [[resonator]] scenario".into()));
    }
    let m = grid_points(cfg, ov, None, 4000)?;
    let x = half_offset_grid(m);
    let mut out = Emission::default();
    for s in &cfg.resonator {
        let sc = build_scenario(cfg, s)?;
        let wd = sc.cp.drive_frequency;
        for mk in temperatures(cfg, ov, Some(s), &[0.0]) {
            let th = thermal(cfg, mk)?;
            let parts: Vec<_> = x
                .par_iter()
                .map(|&x| photon_flux_parts(&sc.kernel, &th, x * wd))
                .collect::<Result<_, _>>()
                .map_err(CliError::from_core)?;
            let mut series = SpectrumSeries::new("omega_over_omega_d", "1", x.clone())?;
            series.push_real("n_thermal", "1", parts.iter().map(|p| p.thermal).collect())?;
            series.push_real("n_total", "1", parts.iter().map(|p| p.total()).collect())?;
            let series = scenario_meta(provenance(series, "resonator-spectrum", &sc.cp, &sc.dp), s, &sc)
                .with_meta("kernel", sc.kernel.label())
                .with_meta("temperature_mk", mk)
                .with_meta("grid", format!("half-offset midpoints, {m} points on (0, 1)"));
            out.series.push((format!("{}_{}", s.name, temperature_tag(mk)), series));
        }
        let sidecar = ModeSidecar {
            scenario: &s.name,
            drive_frequency_rad_s: wd,
            coupling_rad_s: sc.spec.coupling,
            effective_length_m: sc.spec.effective_length,
            epsilon_res: epsilon_res(&sc.spec, &sc.dp, &sc.cp, 0).map_err(CliError::from_core)?,
            modes: sc
                .kernel
                .modes
                .modes
                .iter()
                .map(|md| ModeRow {
                    index: md.index,
                    frequency_rad_s: md.frequency,
                    frequency_over_omega_d: md.frequency / wd,
                    width_rad_s: md.width,
                    width_over_omega_d: md.width / wd,
                    quality: md.quality,
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Config(e.to_string()))?;
        out.sidecars.push((format!("{}_modes", s.name), json));
    }
    Ok(out)
}

fn optional_scenario<'a>(
    cfg: &'a RunConfig,
    name: &Option<String>,
) -> Result<Option<(&'a ResonatorScenario, Scenario)>, CliError> {
    match name {
        Some(n) => {
            let s = cfg.scenario(n)?;
            Ok(Some((s, build_scenario(cfg, s)?)))
        }
        None => Ok(None),
    }
}

pub fn correlations(cfg: &RunConfig, ov: &Overrides) -> Result<Emission, CliError> {
    let (cp, dp) = cfg.derive(None)?;
    let mirror = mirror_kernel(&dp, &cp).map_err(CliError::from_core)?;
    let res = optional_scenario(cfg, &cfg.correlations.resonator)?;
    let m = grid_points(cfg, ov, cfg.correlations.points, 200)?;
    // Δω/ω_d on (0, ½)
    let x: Vec<f64> = half_offset_grid(m).into_iter().map(|x| x / 2.0).collect();
    let wd = cp.drive_frequency;
    let mut s = SpectrumSeries::new("delta_omega_over_omega_d", "1", x.clone())?;
    let column = |k: &dyn ScatterKernel, th: &ThermalState| -> Result<Vec<f64>, CliError> {
        x.iter()
            .map(|&d| pair_correlation(k, th, d * wd).map(|z| z.norm()))
            .collect::<Result<_, _>>()
            .map_err(CliError::from_core)
    };
    let temps = temperatures(cfg, ov, res.as_ref().map(|(s, _)| *s), &[0.0]);
    for &mk in &temps {
        let th = thermal(cfg, mk)?;
        s.push_real(&format!("mirror_{}", temperature_tag(mk)), "1", column(&mirror, &th)?)?;
        if let Some((_, sc)) = &res {
            s.push_real(&format!("resonator_{}", temperature_tag(mk)), "1", column(&sc.kernel, &th)?)?;
        }
    }
    let mut s = provenance(s, "correlations", &cp, &dp)
        .with_meta("quantity", "|<a_out(w_d/2 + dw) a_out(w_d/2 - dw)>|")
        .with_meta("mirror_kernel", mirror.label())
        .with_meta("temperatures_mk", format!("{temps:?}"));
    if let Some((rs, sc)) = &res {
        s = scenario_meta(s, rs, sc).with_meta("resonator_ej_drive_ratio", sc.cp.ej_drive_ratio);
    }
    Ok(Emission { series: vec![(String::new(), s)], ..Default::default() })
}

pub fn g2(cfg: &RunConfig, ov: &Overrides) -> Result<Emission, CliError> {
    let (cp, dp) = cfg.derive(None)?;
    let mirror = mirror_kernel(&dp, &cp).map_err(CliError::from_core)?;
    let res = optional_scenario(cfg, &cfg.g2.resonator)?;
    let m = grid_points(cfg, ov, cfg.g2.points, 201)?;
    let tau_max = cfg.g2.tau_max_times_omega_d.unwrap_or(20.0);
    if !(tau_max > 0.0) {
        return Err(CliError::Config("g2.tau_max_times_omega_d must be positive".into()));
    }
    let x: Vec<f64> = (0..m).map(|j| tau_max * j as f64 / (m - 1) as f64).collect();
    let tau: Vec<f64> = x.iter().map(|t| t / cp.drive_frequency).collect();
    let mut s = SpectrumSeries::new("tau_times_omega_d", "1", x)?;
    let g = coherence_g2(&mirror, &tau).map_err(CliError::Numerical)?;
    s.push_real("g2_mirror", "1", g.real_column("g2").expect("g2 column").to_vec())?;
    if let Some((_, sc)) = &res {
        let g = coherence_g2(&sc.kernel, &tau).map_err(CliError::Numerical)?;
        s.push_real("g2_resonator", "1", g.real_column("g2").expect("g2 column").to_vec())?;
    }
    let mut s = provenance(s, "g2", &cp, &dp)
        .with_meta("mirror_kernel", mirror.label())
        .with_meta("epsilon", mirror.epsilon)
        .with_meta("temperature_mk", 0.0);
    if let Some((rs, sc)) = &res {
        s = scenario_meta(s, rs, sc).with_meta("resonator_ej_drive_ratio", sc.cp.ej_drive_ratio);
    }
    Ok(Emission { series: vec![(String::new(), s)], ..Default::default() })
}

/// Quadrature angles: θ⁻ = π/4 is the squeezed one for both kernels, θ⁺ = −π/4.
pub const THETA_MINUS: f64 = PI / 4.0;
pub const THETA_PLUS: f64 = -PI / 4.0;

pub fn squeezing(cfg: &RunConfig, ov: &Overrides) -> Result<Emission, CliError> {
    let (cp, dp) = cfg.derive(None)?;
    let mirror = mirror_kernel(&dp, &cp).map_err(CliError::from_core)?;
    let res = optional_scenario(cfg, &cfg.squeezing.resonator)?;
    let m = grid_points(cfg, ov, cfg.squeezing.points, 400)?;
    // Δω/ω_d on (−½, ½)
    let x: Vec<f64> = half_offset_grid(m).into_iter().map(|x| x - 0.5).collect();
    let wd = cp.drive_frequency;
    let curve =
        |k: &dyn ScatterKernel, theta: f64| -> Vec<f64> { x.iter().map(|&d| squeezing_at(k, theta, d * wd)).collect() };
    let mut s = SpectrumSeries::new("delta_omega_over_omega_d", "1", x.clone())?;
    s.push_real("mirror_theta_minus", "1", curve(&mirror, THETA_MINUS))?;
    s.push_real("mirror_theta_plus", "1", curve(&mirror, THETA_PLUS))?;
    let mut s_meta = vec![
        ("mirror_total_theta_minus", total_squeezing_at(&mirror, THETA_MINUS).map_err(CliError::Numerical)? / wd),
        ("mirror_total_theta_plus", total_squeezing_at(&mirror, THETA_PLUS).map_err(CliError::Numerical)? / wd),
    ];
    if let Some((_, sc)) = &res {
        s.push_real("resonator_theta_minus", "1", curve(&sc.kernel, THETA_MINUS))?;
        s.push_real("resonator_theta_plus", "1", curve(&sc.kernel, THETA_PLUS))?;
        let p = po_params(&sc.spec, &sc.dp, &sc.cp).map_err(CliError::from_core)?;
        let po = |theta: f64| -> Result<Vec<f64>, CliError> {
            x.iter()
                .map(|&d| po_squeezing(&p, theta + PI / 2.0, d * wd))
                .collect::<Result<_, _>>()
                .map_err(CliError::from_core)
        };
        s.push_real("po_theta_minus", "1", po(THETA_MINUS)?)?;
        s.push_real("po_theta_plus", "1", po(THETA_PLUS)?)?;
        s_meta.push((
            "resonator_total_theta_minus",
            total_squeezing_at(&sc.kernel, THETA_MINUS).map_err(CliError::Numerical)? / wd,
        ));
    }
    let mut s = provenance(s, "squeezing", &cp, &dp)
        .with_meta("mirror_kernel", mirror.label())
        .with_meta("epsilon", mirror.epsilon)
        .with_meta("theta_minus", THETA_MINUS)
        .with_meta("theta_plus", THETA_PLUS)
        .with_meta("lo_frequency", "omega_d / 2")
        .with_meta("temperature_mk", 0.0);
    for (k, v) in s_meta {
        s = s.with_meta(&format!("{k}_over_omega_d"), v);
    }
    if let Some((rs, sc)) = &res {
        s = scenario_meta(s, rs, sc).with_meta("resonator_ej_drive_ratio", sc.cp.ej_drive_ratio);
    }
    Ok(Emission { series: vec![(String::new(), s)], ..Default::default() })
}

pub fn numsolve(cfg: &RunConfig, ov: &Overrides) -> Result<Emission, CliError> {
    let (cp, dp) = cfg.derive(None)?;
    let kernel: MirrorKernel = mirror_kernel(&dp, &cp).map_err(CliError::from_core)?;
    let m = grid_points(cfg, ov, None, 200)?;
    let order = sidebands(cfg, ov)?;
    let x = half_offset_grid(m);
    let bases: Vec<f64> = x.iter().map(|x| x * cp.drive_frequency).collect();
    let mut out = Emission::default();
    for mk in temperatures(cfg, ov, None, &[0.0]) {
        let th = thermal(cfg, mk)?;
        let pts = sideband_sweep(&bases, order, &cp, &dp, &th).map_err(CliError::Numerical)?;
        let analytic: Vec<f64> = bases
            .iter()
            .map(|&w| photon_flux_parts(&kernel, &th, w).map(|p| p.total()))
            .collect::<Result<_, _>>()
            .map_err(CliError::from_core)?;
        let mut s = SpectrumSeries::new("omega_over_omega_d", "1", x.clone())?;
        s.push_real("n_numeric", "1", pts.iter().map(|p| p.flux).collect())?;
        s.push_real("n_analytic", "1", analytic)?;
        s.push_real("anomalous_numeric", "1", pts.iter().map(|p| p.anomalous).collect())?;
        s.push_real("anomalous_perturbative", "1", bases.iter().map(|&w| kernel.anomalous(w).norm()).collect())?;
        s.push_real("second_sideband", "1", pts.iter().map(|p| p.second_sideband).collect())?;
        s.push_real("symplectic_residual", "1", pts.iter().map(|p| p.symplectic_residual).collect())?;
        s.push_real("condition_number", "1", pts.iter().map(|p| p.condition).collect())?;
        let s = provenance(s, "numsolve", &cp, &dp)
            .with_meta("kernel", kernel.label())
            .with_meta("epsilon", kernel.epsilon)
            .with_meta("temperature_mk", mk)
            .with_meta("sidebands", order)
            .with_meta("condition_limit", format!("{CONDITION_LIMIT:e}"));
        out.series.push((temperature_tag(mk), s));
    }
    Ok(out)
}

/// One file per quality factor, each at the configured fraction of the
/// parametric threshold, with the resonance exactly at ω_d/2.
pub fn po_compare(cfg: &RunConfig, _ov: &Overrides) -> Result<Emission, CliError> {
    let pc = &cfg.po_compare;
    if !(pc.threshold_ratio > 0.0 && pc.threshold_ratio < 1.0) {
        return Err(CliError::Config("po_compare.threshold_ratio must lie in (0, 1)".into()));
    }
    if pc.q_values.is_empty() || pc.points < 2 || !(pc.window_linewidths > 0.0) {
        return Err(CliError::Config("po_compare needs q_values, points >= 2 and a positive window".into()));
    }
    let mut out = Emission::default();
    let mut summary = String::new();
    for &q in &pc.q_values {
        let (cp, dp, spec) = threshold_scenario(cfg, q, pc.threshold_ratio)?;
        let width = dce_core::resonator::find_modes(&spec, 0).map_err(CliError::from_core)?.modes[0].width;
        let report = equivalence_report(&spec, &dp, &cp, pc.window_linewidths * width, pc.points)
            .map_err(CliError::from_core)?;
        let x: Vec<f64> = report.elastic.x.iter().map(|w| w / width).collect();
        let mut s = SpectrumSeries::new("omega_over_gamma0", "1", x)?;
        let take = |series: &SpectrumSeries, name: &str| series.real_column(name).expect("column").to_vec();
        s.push_real("elastic_raw", "1", take(&report.elastic, "raw"))?;
        s.push_real("elastic_aligned", "1", take(&report.elastic, "aligned"))?;
        s.push_real("anomalous_raw", "1", take(&report.anomalous, "raw"))?;
        s.push_real("anomalous_aligned", "1", take(&report.anomalous, "aligned"))?;
        let s = provenance(s, "po-compare", &cp, &dp)
            .with_meta("q0", q)
            .with_meta("threshold_ratio", report.params.threshold_ratio())
            .with_meta("elastic_phase", report.elastic_phase)
            .with_meta("anomalous_phase", report.anomalous_phase)
            .with_meta("elastic_deviation", report.elastic_deviation)
            .with_meta("anomalous_deviation", report.anomalous_deviation)
            .with_meta("window_over_gamma0", pc.window_linewidths);
        summary.push_str(&format!(
            "Q0 = {q}: elastic deviation {:.4e}, anomalous deviation {:.4e}\n",
            report.elastic_deviation, report.anomalous_deviation
        ));
        out.series.push((format!("Q{q}"), s));
    }
    out.text = summary;
    Ok(out)
}

/// Resonator tuned to ω_d/2 with quality `q` and the drive scaled so that
/// ε_res equals `ratio`.
pub fn threshold_scenario(
    cfg: &RunConfig,
    q: f64,
    ratio: f64,
) -> Result<(CircuitParams, DerivedParams, ResonatorSpec), CliError> {
    let probe = 1e-3;
    let (cp, dp) = cfg.derive(Some(probe))?;
    let spec = ResonatorSpec::tuned(0, cp.drive_frequency / 2.0, q, dp.leff0, &cp).map_err(CliError::from_core)?;
    let eps = epsilon_res(&spec, &dp, &cp, 0).map_err(CliError::from_core)?;
    let (cp, dp) = cfg.derive(Some(probe * ratio / eps))?;
    Ok((cp, dp, spec))
}

pub struct RateInputs {
    pub amplitude_m: Option<f64>,
    pub mirror_drive_rad_s: Option<f64>,
    pub cavity_quality: Option<f64>,
}

pub fn rate(cfg: Option<&RunConfig>, inputs: &RateInputs) -> Result<Emission, CliError> {
    let section = cfg.map(|c| c.rate.clone()).unwrap_or_default();
    let amplitude = inputs
        .amplitude_m
        .or(section.amplitude_m)
        .ok_or_else(|| CliError::Config("rate needs --amplitude-m or rate.amplitude_m".into()))?;
    let drive = inputs
        .mirror_drive_rad_s
        .or(section.mirror_drive_rad_s)
        .ok_or_else(|| CliError::Config("rate needs --frequency or rate.mirror_drive_rad_s".into()))?;
    let quality = inputs.cavity_quality.or(section.cavity_quality);
    let free = photon_rate(&MirrorMotionParams { amplitude, mirror_drive: drive, cavity_quality: None })
        .map_err(CliError::from_core)?;
    let mut text = format!("amplitude {amplitude:e} m, drive {drive:e} rad/s\nsingle mirror: {free:.3e} photons/s\n");
    if let Some(q) = quality {
        let cav = photon_rate(&MirrorMotionParams { amplitude, mirror_drive: drive, cavity_quality: Some(q) })
            .map_err(CliError::from_core)?;
        text.push_str(&format!("cavity, Q = {q:e}: {cav:.3e} photons/s\n"));
    }
    Ok(Emission { text, ..Default::default() })
}
