use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Leading coefficient vanishes where an invertible one is required.
    #[error("singular input: {0}")]
    SingularInput(String),

    /// A requested coefficient or order lies beyond what is known.
    #[error("truncation: needed order {needed}, available {available}")]
    Truncation { needed: i64, available: i64 },

    /// Input outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Series cannot be inverted under composition.
    #[error("non-invertible series: {0}")]
    NonInvertible(String),

    /// Density has a pole of order greater than one in the closed disk.
    #[error("non-integrable density: pole of order {order} at {location}")]
    NonIntegrable { order: usize, location: String },

    /// Vector passed where a unit vector is required.
    #[error("vector not normalized: norm {0}")]
    Normalization(f64),

    /// Closed-form data required by an operation is missing.
    #[error("missing data: {0}")]
    MissingData(String),

    /// Experiment or parameter configuration problem.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
