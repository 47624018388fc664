use alloc::string::String;
use core::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A derivative of higher order than the function carries was requested.
    Capability { requested: usize, max_order: usize },
    /// Malformed or out-of-range argument.
    Argument(String),
    /// Input failed a structural check (e.g. convexity).
    Validation(String),
    /// The root search found no sign change on `[lo, hi]`.
    RootNotBracketed { lo: f64, hi: f64 },
    /// `f'' + g''` vanished at the matched pair.
    DegenerateHessian { x: f64, curvature_sum: f64 },
    /// The rotated curve stops being a graph (`R' <= 0` at `at`).
    RotationTooLarge { phi: f64, at: f64 },
    /// A checked hypothesis of a construction does not hold.
    Precondition(String),
    /// A construction could not be completed with the supplied parameters.
    ConstructionFailed(String),
    /// `tan γ` lies outside the range of the profile's derivative.
    GammaTooLarge { gamma: f64 },
    /// The side conditions of the epsilon solve fail for this angle.
    GammaNotSmall { gamma: f64 },
    /// A solved constant violates its proven sign or bound.
    Inconsistent(String),
    /// Requested size exceeds the supported budget.
    Resource(String),
    /// Curve assembly broke an invariant.
    Assembly(String),
    /// The closed curve failed to close after placing all copies.
    Symmetry { gap: f64 },
    /// The smoothing schedule could not meet its norm cap.
    ScheduleFailed { step: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Capability { requested, max_order } => {
                write!(f, "derivative of order {requested} requested but max_order is {max_order}")
            }
            Error::Argument(m) => write!(f, "invalid argument: {m}"),
            Error::Validation(m) => write!(f, "validation failed: {m}"),
            Error::RootNotBracketed { lo, hi } => {
                write!(f, "root not bracketed on [{lo}, {hi}]")
            }
            Error::DegenerateHessian { x, curvature_sum } => {
                write!(f, "degenerate Hessian at x = {x}: f'' + g'' = {curvature_sum}")
            }
            Error::RotationTooLarge { phi, at } => {
                write!(f, "rotation by {phi} rad is not a graph near x = {at}")
            }
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::ConstructionFailed(m) => write!(f, "construction failed: {m}"),
            Error::GammaTooLarge { gamma } => {
                write!(f, "tan({gamma}) is outside the range of f'")
            }
            Error::GammaNotSmall { gamma } => {
                write!(f, "gamma = {gamma} violates the endpoint slope conditions")
            }
            Error::Inconsistent(m) => write!(f, "inconsistent construction: {m}"),
            Error::Resource(m) => write!(f, "resource limit: {m}"),
            Error::Assembly(m) => write!(f, "assembly error: {m}"),
            Error::Symmetry { gap } => write!(f, "closure gap {gap} after all copies"),
            Error::ScheduleFailed { step } => {
                write!(f, "no admissible angle found for smoothing step {step}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
