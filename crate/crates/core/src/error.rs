use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DceError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("numerical singularity at omega = {omega:.6e} rad/s: {detail}")]
    Singular { omega: f64, detail: String },

    #[error("root bracketing failed on branch {branch}: {detail}")]
    Bracket { branch: usize, detail: String },

    #[error("quadrature did not converge: estimated error {achieved:.3e} > tolerance {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("linear solve rejected: condition number {condition:.3e} exceeds {limit:.1e} (dimension {dimension})")]
    IllConditioned { condition: f64, limit: f64, dimension: usize },

    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, DceError>;

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(DceError::Domain(format!("{name} must be positive and finite, got {value}")))
    }
}
