use thiserror::Error;

/// Failures reported by the library. The CLI maps each variant to an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates an admissibility inequality.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested computation is not defined in the current stability regime.
    #[error("regime error: {0}")]
    Regime(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
