use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ordering constraint violated: alpha + beta + gamma = {sum}, expected -1")]
    ConstraintViolation { sum: f64 },

    #[error("degenerate ordering: a = -1 makes the 1/(4(a+1)) prefactor infinite")]
    DegenerateOrdering,

    #[error("unknown ordering preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid system configuration: {0}")]
    InvalidSystem(String),

    #[error("complex ν: physically unacceptable ordering (ν² = {nu_squared})")]
    ComplexOrdering { nu_squared: f64 },

    #[error("no bound states: V0 = {v0} must be positive")]
    NoBoundStates { v0: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: n = {n}, need at least {min}")]
    GridTooCoarse { n: usize, min: usize },

    #[error("domain too small: ground state at the grid edge is {ratio:e} of its peak (limit 1e-6)")]
    DomainTooSmall { ratio: f64 },

    #[error("bisection for eigenvalue {index} stopped at bracket width {width:e}")]
    ToleranceNotReached { index: usize, width: f64 },

    #[error("shift {shift} is singular after {attempts} re-shifts")]
    SingularShift { shift: f64, attempts: usize },

    #[error("requested {requested} eigenvalues from a system of size {size}")]
    TooManyLevels { requested: usize, size: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
