//! Non-perturbative solution of the driven SQUID boundary condition on a
//! discrete frequency set.
//!
//! The boundary condition at each frequency ω_r couples the field at ω_r to
//! the field at every ω_s differing by a multiple of ω_d. Writing the field
//! at the SQUID as a_in + a_out with a(−ω) = a†(ω) gives
//! M_out a_out = M_in a_in, and B = M_out⁻¹ M_in.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitParams, DerivedParams};
use crate::error::{require_positive, DceError, Result};
use crate::observables::ThermalState;
use crate::series::SpectrumSeries;

pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FrequencyGrid {
    /// ω_n = base + n ω_d for n = −order..order.
    Sideband { base: f64, order: usize, drive_frequency: f64 },
    /// (j + ½) step for j = −half_count..half_count−1; symmetric about 0 and never 0.
    Uniform { step: f64, half_count: usize },
}

impl FrequencyGrid {
    pub fn sideband(base: f64, order: usize, drive_frequency: f64) -> Result<Self> {
        require_positive("drive_frequency", drive_frequency)?;
        if !(base > 0.0 && base < drive_frequency) {
            return Err(DceError::Domain(format!("sideband base {base:.6e} must lie inside (0, w_d)")));
        }
        Ok(Self::Sideband { base, order, drive_frequency })
    }

    /// Uniform grid reaching at least `cutoff`.
    pub fn uniform(step: f64, cutoff: f64) -> Result<Self> {
        require_positive("step", step)?;
        require_positive("cutoff", cutoff)?;
        let half_count = (cutoff / step).ceil().max(1.0) as usize;
        Ok(Self::Uniform { step, half_count })
    }

    pub fn frequencies(&self) -> Vec<f64> {
        match *self {
            Self::Sideband { base, order, drive_frequency } => {
                let n = order as i64;
                (-n..=n).map(|k| base + k as f64 * drive_frequency).collect()
            }
            Self::Uniform { step, half_count } => {
                let n = half_count as i64;
                (-n..n).map(|j| (j as f64 + 0.5) * step).collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Self::Sideband { order, .. } => 2 * order + 1,
            Self::Uniform { half_count, .. } => 2 * half_count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Periodic Josephson energy E_J(t) = Σ_k c_k e^{ikω_d t}, real-valued so c_{−k} = c_k*.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub static_energy: f64,
    pub drive_frequency: f64,
    /// c_1, c_2, ...
    pub harmonics: Vec<Complex64>,
}

impl DriveSpec {
    /// E_J(t) = E_J0 + δE_J cos(ω_d t).
    pub fn harmonic(ej0: f64, dej: f64, drive_frequency: f64) -> Self {
        Self { static_energy: ej0, drive_frequency, harmonics: vec![Complex64::new(dej / 2.0, 0.0)] }
    }

    pub fn from_circuit(dp: &DerivedParams, cp: &CircuitParams) -> Self {
        Self::harmonic(dp.ej0, dp.dej, cp.drive_frequency)
    }

    /// Fourier coefficients from equally spaced samples over one drive period.
    pub fn from_samples(samples: &[f64], drive_frequency: f64, max_harmonic: usize) -> Result<Self> {
        require_positive("drive_frequency", drive_frequency)?;
        let m = samples.len();
        if m < 2 * max_harmonic + 1 {
            return Err(DceError::Domain(format!("{m} samples cannot resolve {max_harmonic} harmonics")));
        }
        let coefficient = |k: usize| -> Complex64 {
            samples
                .iter()
                .enumerate()
                .map(|(j, &e)| e * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * j) as f64 / m as f64))
                .sum::<Complex64>()
                / m as f64
        };
        let static_energy = coefficient(0).re;
        require_positive("mean josephson energy", static_energy)?;
        Ok(Self { static_energy, drive_frequency, harmonics: (1..=max_harmonic).map(coefficient).collect() })
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k == 0 {
            return Complex64::new(self.static_energy, 0.0);
        }
        match self.harmonics.get(k.unsigned_abs() as usize - 1) {
            Some(c) if k > 0 => *c,
            Some(c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

fn lattice_offset(omega_m: f64, omega_n: f64, drive_frequency: f64) -> Option<i64> {
    let k = (omega_m - omega_n) / drive_frequency;
    let nearest = k.round();
    ((k - nearest).abs() < 1e-9 * (1.0 + nearest.abs())).then_some(nearest as i64)
}

/// Weight of δ(ω_m − ω_n − kω_d) in
/// g(ω_m, ω_n) = (1/2π) sqrt(|ω_n|/|ω_m|) ∫ E_J(t) e^{−i(ω_m−ω_n)t} dt,
/// i.e. c_k sqrt(|ω_n|/|ω_m|), or zero off the lattice. On a uniform grid the
/// delta is δ_mn/Δω, so Δω·g is this weight as a Kronecker entry.
pub fn drive_kernel_g(omega_m: f64, omega_n: f64, drive: &DriveSpec) -> Result<Complex64> {
    if omega_m == 0.0 || omega_n == 0.0 {
        return Err(DceError::Domain("drive kernel undefined at zero frequency".into()));
    }
    Ok(match lattice_offset(omega_m, omega_n, drive.drive_frequency) {
        Some(k) => drive.coefficient(k) * (omega_n.abs() / omega_m.abs()).sqrt(),
        None => Complex64::new(0.0, 0.0),
    })
}

/// Row r is the boundary condition at ω_r; column s the field at ω_s.
/// The coupling entry is (2π/Φ0)² g(ω_s, ω_r), and the diagonal carries
/// ω_r² C_J and iω_r/(v L0) with the signed frequency.
pub fn assemble(
    grid: &FrequencyGrid,
    drive: &DriveSpec,
    cp: &CircuitParams,
    dp: &DerivedParams,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    if let FrequencyGrid::Uniform { step, .. } = grid {
        let ratio = drive.drive_frequency / step;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(DceError::Domain(format!("uniform step {step:.6e} does not divide the drive frequency")));
        }
    }
    let freqs = grid.frequencies();
    let n = freqs.len();
    let k2 = dp.constants.phase_factor_sq();
    let mut coupling = DMatrix::<Complex64>::zeros(n, n);
    for (r, &wr) in freqs.iter().enumerate() {
        for (s, &ws) in freqs.iter().enumerate() {
            coupling[(r, s)] = drive_kernel_g(ws, wr, drive)? * k2;
        }
    }
    let inv_l0v = 1.0 / (cp.inductance_per_length() * cp.phase_velocity);
    let mut m_out = -coupling.clone();
    let mut m_in = coupling;
    for (r, &w) in freqs.iter().enumerate() {
        let cap = w * w * cp.junction_capacitance;
        let line = w * inv_l0v;
        m_out[(r, r)] += Complex64::new(cap, line);
        m_in[(r, r)] += Complex64::new(-cap, line);
    }
    Ok((m_out, m_in))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMatrix {
    pub grid: FrequencyGrid,
    pub frequencies: Vec<f64>,
    pub b: DMatrix<Complex64>,
    pub condition: f64,
    pub symplectic_residual: f64,
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn solve(grid: &FrequencyGrid, m_out: DMatrix<Complex64>, m_in: &DMatrix<Complex64>) -> Result<BogoliubovMatrix> {
    let frequencies = grid.frequencies();
    let n = frequencies.len();
    if m_out.shape() != (n, n) || m_in.shape() != (n, n) {
        return Err(DceError::Solver(format!("matrices do not match grid of {n} points")));
    }
    let norm = one_norm(&m_out);
    let lu = m_out.lu();
    let inverse = lu.try_inverse().ok_or(DceError::IllConditioned {
        condition: f64::INFINITY,
        limit: CONDITION_LIMIT,
        dimension: n,
    })?;
    let condition = norm * one_norm(&inverse);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(DceError::IllConditioned { condition, limit: CONDITION_LIMIT, dimension: n });
    }
    let b = &inverse * m_in;
    let j = DMatrix::<Complex64>::from_fn(n, n, |r, c| {
        if r != c {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(frequencies[r].signum(), 0.0)
        }
    });
    let symplectic_residual = (&b * &j * b.adjoint() - &j).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(BogoliubovMatrix { grid: grid.clone(), frequencies, b, condition, symplectic_residual })
}

impl BogoliubovMatrix {
    /// Output occupation at row r: Σ_s |B_rs|² n̄(ω_s) over normal columns
    /// plus Σ_s |B_rs|² [1 + n̄(|ω_s|)] over anomalous ones.
    pub fn row_flux(&self, row: usize, thermal: &ThermalState) -> Result<f64> {
        let mut total = 0.0;
        for (s, &ws) in self.frequencies.iter().enumerate() {
            let p = self.b[(row, s)].norm_sqr();
            let n = thermal.occupation(ws.abs())?;
            total += if ws > 0.0 { p * n } else { p * (1.0 + n) };
        }
        Ok(total)
    }

    /// Row index of the base frequency on a sideband lattice.
    pub fn base_row(&self) -> Option<usize> {
        match self.grid {
            FrequencyGrid::Sideband { order, .. } => Some(order),
            FrequencyGrid::Uniform { .. } => None,
        }
    }

    /// B entry between lattice orders (row n, column m) on a sideband grid.
    pub fn lattice_entry(&self, n: i64, m: i64) -> Option<Complex64> {
        let FrequencyGrid::Sideband { order, .. } = self.grid else { return None };
        let o = order as i64;
        if n.abs() > o || m.abs() > o {
            return None;
        }
        Some(self.b[((n + o) as usize, (m + o) as usize)])
    }

    pub fn index_of(&self, omega: f64) -> Option<usize> {
        self.frequencies.iter().position(|&w| (w - omega).abs() <= 1e-9 * omega.abs().max(1.0))
    }
}

/// Occupation at every positive grid frequency.
pub fn numerical_flux(b: &BogoliubovMatrix, thermal: &ThermalState) -> Result<SpectrumSeries> {
    let rows: Vec<usize> = (0..b.frequencies.len()).filter(|&r| b.frequencies[r] > 0.0).collect();
    let x: Vec<f64> = rows.iter().map(|&r| b.frequencies[r]).collect();
    let values = rows.iter().map(|&r| b.row_flux(r, thermal)).collect::<Result<Vec<_>>>()?;
    let mut s = SpectrumSeries::new("omega", "rad/s", x)?
        .with_meta("solver", "dense LU")
        .with_meta("temperature_k", thermal.temperature)
        .with_meta("grid_points", b.frequencies.len());
    s.push_real("n_out", "1", values)?;
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandPoint {
    pub base: f64,
    pub flux: f64,
    /// |B| from a_in†(ω_d − ω) to a_out(ω).
    pub anomalous: f64,
    /// |B| from a_in(ω + 2ω_d) to a_out(ω).
    pub second_sideband: f64,
    pub condition: f64,
    pub symplectic_residual: f64,
}

pub fn solve_sideband(
    base: f64,
    order: usize,
    drive: &DriveSpec,
    cp: &CircuitParams,
    dp: &DerivedParams,
) -> Result<BogoliubovMatrix> {
    let grid = FrequencyGrid::sideband(base, order, drive.drive_frequency)?;
    let (m_out, m_in) = assemble(&grid, drive, cp, dp)?;
    solve(&grid, m_out, &m_in)
}

/// One sideband solve per base frequency, in parallel; results keep input order.
pub fn sideband_sweep(
    bases: &[f64],
    order: usize,
    cp: &CircuitParams,
    dp: &DerivedParams,
    thermal: &ThermalState,
) -> Result<Vec<SidebandPoint>> {
    let drive = DriveSpec::from_circuit(dp, cp);
    bases
        .par_iter()
        .map(|&base| {
            let run = || -> Result<SidebandPoint> {
                let b = solve_sideband(base, order, &drive, cp, dp)?;
                let row = b.base_row().expect("sideband grid");
                Ok(SidebandPoint {
                    base,
                    flux: b.row_flux(row, thermal)?,
                    anomalous: b.lattice_entry(0, -1).map_or(0.0, |z| z.norm()),
                    second_sideband: b.lattice_entry(0, 2).map_or(0.0, |z| z.norm()),
                    condition: b.condition,
                    symplectic_residual: b.symplectic_residual,
                })
            };
            run().map_err(|e| DceError::Solver(format!("at omega = {base:.6e} rad/s: {e}")))
        })
        .collect()
}
