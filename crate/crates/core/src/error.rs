use thiserror::Error;

pub type Result<T, E = KwcError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KwcError {
    /// Two fields (or a field and a flux) live on incompatible grids.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Input outside the domain of an operation (e.g. boundary constraint violated).
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration rejected before any computation.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Argument outside the supported range of a special function.
    #[error("argument {x} outside supported range [{min}, {max}]")]
    Range { x: f64, min: f64, max: f64 },

    /// An iterative solver stopped without meeting its tolerance.
    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    Solver {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A discrete invariant (maximum principle, energy inequality) failed.
    #[error("scheme invariant violated: {0}")]
    Scheme(String),
}

impl KwcError {
    pub fn is_invariant_failure(&self) -> bool {
        matches!(self, KwcError::Scheme(_))
    }
}
