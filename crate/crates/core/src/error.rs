use thiserror::Error;

/// Errors raised by the solvers and their setup routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Requested accuracy cannot be reached in double precision.
    #[error("accuracy {eps:e} unattainable in double precision (log argument {arg:e} <= 1)")]
    Unattainable { eps: f64, arg: f64 },

    /// Input arrays do not match the plan or grid they were given to.
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    /// The implicit division factor `1 + i mu0 dt V` came too close to zero.
    #[error("division factor {magnitude:e} at grid point {index} (dt*V resonance)")]
    Resonance { index: usize, magnitude: f64 },

    /// A multistep solver was asked to step without enough history.
    #[error("history holds {have} entries, scheme needs {need}; run the startup first")]
    InsufficientHistory { have: usize, need: usize },

    /// Initial data or potential is not numerically supported in the box.
    #[error("free-space support violated: |f| = {magnitude:e} on the boundary ring (threshold {threshold:e})")]
    Support { magnitude: f64, threshold: f64 },

    /// Evaluation point outside the configured range.
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange { what: &'static str, value: f64, lo: f64, hi: f64 },

    /// An iterative numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerics(String),

    /// Reading or writing an artifact failed.
    #[error("I/O: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn shape(expected: impl ToString, got: impl ToString) -> Self {
        Error::Shape {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
