use core::fmt;

/// Failure modes of the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Gamma-type function evaluated at a non-positive integer.
    Pole { x: f64 },
    /// Argument outside the range where the evaluator meets its accuracy contract.
    UnsupportedRange { what: &'static str, value: f64 },
    /// Argument outside the mathematical domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Invalid construction parameter.
    InvalidParameter { what: &'static str, reason: &'static str },
    /// The fractional order failed the square-integrability gate.
    OrderGate { alpha: f64 },
    /// Adaptive quadrature hit its subdivision budget before reaching tolerance.
    Quadrature { what: &'static str, estimate: f64, error: f64 },
    /// Finite-difference step collapsed below representable resolution.
    StepUnderflow { step: f64 },
    /// Operator evaluated at a point where it is singular.
    Singular { what: &'static str },
    /// Lower envelope exceeded upper envelope in a multimap.
    EnvelopeViolation { xi: f64, lower: f64, upper: f64 },
    /// Two sampled objects were expected to share a time grid.
    GridMismatch,
    /// The simulate/project alternation did not stabilize.
    Infeasible { candidate: usize, rounds: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Pole { x } => write!(f, "pole of the gamma function at x = {x}"),
            Error::UnsupportedRange { what, value } => {
                write!(f, "{what}: argument {value} is outside the supported range")
            }
            Error::Domain { what, value } => write!(f, "{what}: {value} is outside the domain"),
            Error::InvalidParameter { what, reason } => write!(f, "invalid {what}: {reason}"),
            Error::OrderGate { alpha } => write!(
                f,
                "alpha must exceed 0.5 (got {alpha}): the kernel psi'(s)(psi(t)-psi(s))^(alpha-1) \
                 is square integrable on [a,t] only for 1/2 < alpha <= 1"
            ),
            Error::Quadrature { what, estimate, error } => write!(
                f,
                "{what}: quadrature did not converge (estimate {estimate}, error {error})"
            ),
            Error::StepUnderflow { step } => {
                write!(f, "finite-difference step {step} underflows the clock resolution")
            }
            Error::Singular { what } => write!(f, "{what} is singular at this argument"),
            Error::EnvelopeViolation { xi, lower, upper } => write!(
                f,
                "envelope violation at xi = {xi}: lower {lower} exceeds upper {upper}"
            ),
            Error::GridMismatch => write!(f, "trajectory and control do not share a grid"),
            Error::Infeasible { candidate, rounds } => write!(
                f,
                "candidate {candidate}: simulate/project alternation did not stabilize in {rounds} rounds"
            ),
        }
    }
}

impl core::error::Error for Error {}
