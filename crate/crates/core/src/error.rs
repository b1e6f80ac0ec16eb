use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the disc laboratory.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {0} is not inside the unit disc")]
    OutsideDisc(Complex64),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("coefficient is singular at {0}")]
    Singularity(Complex64),

    #[error("first derivative vanishes at {0}; map is not locally univalent there")]
    LocalUnivalence(Complex64),

    #[error("step size underflow near {0}")]
    StepUnderflow(Complex64),

    #[error("tolerance {tol:e} not met (estimated error {err:e})")]
    ToleranceNotMet { tol: f64, err: f64 },

    #[error("requested series order {0} exceeds the supported maximum")]
    OrderOverflow(usize),

    #[error("point {z} lies beyond the evaluation radius cap {cap}")]
    BeyondRadiusCap { z: Complex64, cap: f64 },

    #[error("zero on contour persists after {0} perturbation attempts")]
    ZeroOnContour(usize),

    #[error("contour quadrature did not settle on an integer winding number (last estimate {0})")]
    QuadratureFailure(f64),

    #[error("Newton refinement failed near {0}")]
    NewtonFailure(Complex64),

    #[error("not applicable: {0}")]
    Applicability(String),

    #[error("parameter constraint violated: {0}")]
    ParameterConstraint(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("solutions belong to different coefficient families")]
    MismatchedFamilies,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
