//! Error type shared by every module of the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by channel synthesis, modulation, detection and the
/// analytical error-probability engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid sizes: antenna count not a power of two, mismatched vector
    /// lengths, empty inputs.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// An antenna or symbol index outside its valid range.
    #[error("index {index} out of range 0..{len}")]
    Index { index: usize, len: usize },
    /// A scalar parameter outside its domain (negative concentration,
    /// non-square QAM order, non-positive energy, ...).
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Bit frame lengths inconsistent with the configuration.
    #[error("framing error: {0}")]
    Framing(String),
    /// A decided symbol that is not a constellation point.
    #[error("demap error: {0}")]
    Demap(String),
    /// Detector or job misconfiguration.
    #[error("configuration error: {0}")]
    Configuration(String),
    /// Numerical quadrature did not reach its tolerance.
    #[error("numeric error: {what} (error estimate {estimate:e})")]
    Numeric { what: String, estimate: f64 },
    /// A generating function evaluated at (or past) one of its poles.
    #[error("pole error: {0}")]
    Pole(String),
    /// Reading a config or writing an output file failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }

    /// True for failures coming from the numerical engine rather than from
    /// user input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric { .. } | Error::Pole(_))
    }

    /// Process exit status: 2 for invalid input, 3 for numerical failures,
    /// 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric { .. } | Error::Pole(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }

    /// Short machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Index { .. } => "index",
            Error::Parameter(_) => "parameter",
            Error::Framing(_) => "framing",
            Error::Demap(_) => "demap",
            Error::Configuration(_) => "config",
            Error::Numeric { .. } => "numeric",
            Error::Pole(_) => "pole",
            Error::Io(_) => "io",
        }
    }
}
