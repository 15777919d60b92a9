use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("theta must lie in [0, 0.5], got {0}")]
    InvalidTheta(f64),
    #[error("empty sample: {0}")]
    EmptySample(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("location entries must be 0 or 1")]
    NonBinaryLocation,
    #[error("both classes must be present")]
    SingleClass,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("solver stopped after {iterations} iterations with KKT residual {kkt_residual:e}")]
    NoConvergence { iterations: usize, kkt_residual: f64 },
}

impl Error {
    pub(crate) fn mismatch(what: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { what, expected, found }
    }
}
