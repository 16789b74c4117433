use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is reducible: nonzero pattern is not strongly connected")]
    NotIrreducible,

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("economy is not viable: spectral radius {lambda} >= 1")]
    NonViable { lambda: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coefficient path has kind {found}, expected {expected}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("innovator path has no gap to close (initial == frontier)")]
    DegenerateGap,

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("sensitivity extremes must be positive (k_min = {k_min}, k_max = {k_max})")]
    NonPositiveK { k_min: f64, k_max: f64 },

    #[error("1 - beta*k(t) does not change sign on the horizon (beta = {beta})")]
    NoSignChange { beta: f64 },

    #[error("numerical failure at t = {t}: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Strips any [`Error::AtTime`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NoConvergence { .. } | Error::NonViable { .. } | Error::NotIrreducible
        )
    }
}
