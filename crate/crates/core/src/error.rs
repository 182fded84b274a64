use thiserror::Error;

/// Errors raised by state, channel and entropy computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("eigensolver did not converge")]
    ConvergenceFailure,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state is not strictly positive (min eigenvalue {0:e})")]
    SingularState(f64),

    #[error("trace is {got}, expected {expected}")]
    InvalidTrace { got: f64, expected: f64 },

    #[error("map is not trace preserving (marginal deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sampled marginal is singular after {0} attempts")]
    SingularMarginal(usize),

    #[error("map is not CPTP (choi min eigenvalue {min_eig:e}, trace-preservation deviation {tp_violation:e})")]
    NotCptp { min_eig: f64, tp_violation: f64 },

    #[error("channel is not unital (deviation {0:e})")]
    NotUnital(f64),

    #[error("channel is not a qubit channel (dims {0} -> {1})")]
    NotQubit(usize, usize),

    #[error("p = {0} outside the open interval (eps, 1 - eps)")]
    POutOfRange(f64),

    #[error("need at least 2 trials, got {0}")]
    InsufficientTrials(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
