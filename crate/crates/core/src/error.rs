use std::fmt;

/// Errors raised by the numerics layer. Quadrature that merely fails to
/// converge is not an error: the result comes back with `converged = false`
/// so the caller can decide what to do with the partial value.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the range a routine is defined on.
    Domain(String),
    /// Evaluating the function would exceed the representable range of f64.
    Overflow { arg: f64, max: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Overflow { arg, max } => {
                write!(f, "overflow: argument {arg:e} exceeds limit {max:e}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
