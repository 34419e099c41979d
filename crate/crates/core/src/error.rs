use std::fmt;

/// Errors surfaced by validating constructors and the fallible numerical
/// routines (quadrature, sampling, histogram comparison).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Rejected by a validating constructor or parameter check.
    InvalidInput(String),
    /// An integrand evaluated to a non-finite value at a quadrature node.
    NonFiniteSample { x: f64, y: f64 },
    /// Iterative node doubling ran out of budget before reaching tolerance.
    QuadratureNotConverged { delta: f64, tol: f64 },
    /// Rejection sampling used up its proposal budget.
    RejectionBudgetExhausted { rejections: usize },
    /// A proposal density exceeded the grid-estimated rejection envelope.
    EnvelopeViolation { value: f64, envelope: f64 },
    /// Two grids that must have equal shape do not.
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NonFiniteSample { x, y } => {
                write!(f, "integrand is not finite at node ({x}, {y})")
            }
            Error::QuadratureNotConverged { delta, tol } => {
                write!(
                    f,
                    "quadrature did not converge: last relative change {delta} above {tol}"
                )
            }
            Error::RejectionBudgetExhausted { rejections } => {
                write!(
                    f,
                    "rejection sampling exhausted its budget of {rejections} proposals \
                     (envelope too tight; raise envelope_safety)"
                )
            }
            Error::EnvelopeViolation { value, envelope } => {
                write!(
                    f,
                    "conditional density {value} exceeded the rejection envelope {envelope}"
                )
            }
            Error::ShapeMismatch { left, right } => {
                write!(f, "grid shapes differ: {left:?} vs {right:?}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
