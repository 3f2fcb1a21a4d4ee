use thiserror::Error;

/// Errors raised by the workbench operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a precondition (wrong mode, zero function, bad shape).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exponent lies outside the range an operation accepts.
    #[error("invalid exponent {value}: {reason}")]
    InvalidExponent { value: f64, reason: String },

    /// Element or function belongs to a different group than the one expected.
    #[error("group mismatch: expected {expected}, found {found}")]
    GroupMismatch { expected: String, found: String },

    /// A combinatorial enumeration would exceed its configured cap.
    #[error("resource limit exceeded: {what} needs {needed} but the limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    /// Torus quadrature did not settle before the grid cap.
    #[error("quadrature did not converge: last estimates {previous} and {last} at {points} points per axis")]
    QuadratureNotConverged { previous: f64, last: f64, points: usize },

    /// An ascent step produced an identically zero response.
    #[error("degenerate ascent: response for function {index} vanished on the window")]
    Degenerate { index: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn exponent(value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidExponent {
            value,
            reason: reason.into(),
        }
    }

    /// True for errors caused by enumeration or grid caps.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. } | Error::QuadratureNotConverged { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
