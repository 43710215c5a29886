use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid must be at least 5x5 cells, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },

    #[error("field shape {got:?} does not match grid {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("limiter {limiter} is not defined for {scheme}")]
    UnsupportedLimiter {
        limiter: &'static str,
        scheme: &'static str,
    },

    #[error("global limiter requires the previous-step bounds")]
    MissingGlobalBounds,

    #[error("no closed-form solution for {case} at t = {t}")]
    NoExactSolution { case: &'static str, t: f64 },

    #[error("velocity field vanishes, time step is unbounded")]
    ZeroVelocity,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("relative error undefined: exact solution has zero norm")]
    ZeroNorm,

    #[error("observed order needs positive errors, got {coarse} and {fine}")]
    NonPositiveError { coarse: f64, fine: f64 },

    #[error("requested {requested} steps exceed the Courant target {target} (stage Courant {courant})")]
    CourantExceeded {
        requested: usize,
        target: f64,
        courant: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("csv error: {0}")]
    Csv(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
