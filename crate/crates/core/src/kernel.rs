//! The first-order Bogoliubov map shared by the mirror and resonator setups:
//!
//! a_out(ω) = R(ω) a_in(ω) + U(ω) a_in(ω+ω_d) + D(ω) a_in(ω−ω_d) + A(ω) a_in†(ω_d−ω)

use num_complex::Complex64;

pub trait ScatterKernel: Send + Sync {
    /// Elastic coefficient R(ω).
    fn reflection(&self, omega: f64) -> Complex64;

    /// Coefficient U(ω) of a_in(ω + ω_d).
    fn upper_sideband(&self, omega: f64) -> Complex64;

    /// Coefficient D(ω) of a_in(ω − ω_d); zero unless ω > ω_d.
    fn lower_sideband(&self, omega: f64) -> Complex64;

    /// Coefficient A(ω) of a_in†(ω_d − ω); zero unless 0 < ω < ω_d.
    fn anomalous(&self, omega: f64) -> Complex64;

    fn drive_frequency(&self) -> f64;

    /// Perturbation parameter of the kernel.
    fn small_parameter(&self) -> f64;

    /// Short label written into output metadata.
    fn label(&self) -> String;
}
