use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Arguments violate a precondition (bad range, dimension mismatch, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A series or iteration did not converge within its budget.
    #[error("numeric limit: {0}")]
    NumericLimit(String),

    /// A truncation (Fock dimension, Kraus count, grid size) is too small or too large.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// The probed quadrature is (numerically) orthogonal to the state displacement,
    /// so the normalized correlation diverges.
    #[error("probed quadrature is orthogonal to the state displacement (tangent argument {argument:.3e} rad from a pole)")]
    QuadratureOrthogonal { argument: f64 },

    /// `arg <a>` is undefined because the mean field vanishes.
    #[error("state phase undefined: |<a>| = {0:.3e}")]
    UndefinedPhase(f64),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
