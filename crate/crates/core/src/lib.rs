//! Dynamical Casimir effect in a SQUID-terminated coplanar waveguide.
//!
//! Frequencies are angular (rad/s) and all quantities are SI.

pub mod circuit;
pub mod error;
pub mod kernel;
pub mod numsolver;
pub mod observables;
pub mod pomap;
pub mod quadrature;
pub mod resonator;
pub mod scattering;
pub mod series;

pub use error::{DceError, Result};
pub use kernel::ScatterKernel;
