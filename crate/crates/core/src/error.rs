//! Error type shared by every module in the crate.

use alloc::string::String;
use core::fmt;

/// Failure modes of the numerical engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A pivot fell below the singularity threshold during elimination,
    /// or the solve produced non-finite entries.
    SingularMatrix,
    /// Matrix/vector dimensions do not agree.
    DimensionMismatch { expected: usize, got: usize },
    /// `decaying_sqrt` received an argument with magnitude below 1e-14,
    /// where the decay branch is not defined.
    ZeroArgument,
    /// Incident energy coincides with a real barrier height to within
    /// 1e-12, which makes the evanescent wavenumber degenerate.
    DegenerateEnergy,
    /// A requested configuration needs exponentials beyond exp(600),
    /// outside the representable dynamic range.
    RangeExceeded { exponent: f64 },
    /// Junction coupling outside the unitary window (0, 0.5].
    CouplingOutOfRange { value: f64 },
    /// The two one-sided phase-derivative estimates kept disagreeing
    /// after the step was halved; the delay is not trustworthy here.
    NonConvergentDerivative,
    /// A system description violates its documented invariants.
    InvalidSpec(String),
    /// A sweep plan names an unknown parameter/observable or an empty grid.
    PlanInvalid(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularMatrix => write!(f, "matrix is singular to working precision"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::ZeroArgument => write!(f, "square-root argument too close to zero"),
            Error::DegenerateEnergy => {
                write!(f, "incident energy degenerate with a real barrier height")
            }
            Error::RangeExceeded { exponent } => {
                write!(f, "exponential range exceeded: exponent {exponent} > 600")
            }
            Error::CouplingOutOfRange { value } => {
                write!(f, "junction coupling {value} outside (0, 0.5]")
            }
            Error::NonConvergentDerivative => {
                write!(f, "phase derivative did not converge after step halving")
            }
            Error::InvalidSpec(msg) => write!(f, "invalid system description: {msg}"),
            Error::PlanInvalid(msg) => write!(f, "invalid sweep plan: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Short stable code for each error kind, used as the machine-readable
/// marker in sweep tables and CSV output.
impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::SingularMatrix => "singular-matrix",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::ZeroArgument => "zero-argument",
            Error::DegenerateEnergy => "degenerate-energy",
            Error::RangeExceeded { .. } => "range-exceeded",
            Error::CouplingOutOfRange { .. } => "coupling-out-of-range",
            Error::NonConvergentDerivative => "non-convergent-derivative",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::PlanInvalid(_) => "plan-invalid",
        }
    }
}
