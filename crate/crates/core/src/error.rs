use thiserror::Error;

/// Errors raised by the tail tests and the machinery around them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate tail: the largest and smallest retained values are equal ({0})")]
    DegenerateTail(f64),

    #[error("invalid tail: {0}")]
    InvalidTail(String),

    #[error("invalid tail index {0}: must be finite and non-negative")]
    InvalidTailIndex(f64),

    #[error("quadrature failed to reach tolerance: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    QuadratureFailure {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("calibration mismatch: {0}")]
    CalibrationMismatch(String),

    #[error("calibration diverged: worst grid size {worst_size:.4} at xi = {worst_xi:.3} exceeds {limit:.4}; try a smaller kappa or more draws")]
    CalibrationDivergence {
        worst_size: f64,
        worst_xi: f64,
        limit: f64,
    },

    #[error("design matrix is rank deficient (relative singular value {0:e})")]
    RankDeficient(f64),

    #[error("residual variance is zero")]
    ZeroVariance,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("artifact format error: {0}")]
    Artifact(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
