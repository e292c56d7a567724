use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model or configuration parameter violates its domain.
    InvalidParameter(&'static str),
    /// An evaluation grid is negative, non-finite or not strictly increasing.
    InvalidGrid,
    /// Sample data cannot be used for the requested operation.
    InvalidSamples(&'static str),
    /// A requested operating point lies outside the range covered by a curve.
    OutOfRange { target: f64, min: f64, max: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::InvalidGrid => f.write_str("grid must be non-negative, finite and strictly increasing"),
            Error::InvalidSamples(what) => write!(f, "invalid samples: {what}"),
            Error::OutOfRange { target, min, max } => {
                write!(f, "target {target:e} outside curve range [{min:e}, {max:e}]")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
