use core::fmt;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by the numerical routines.
///
/// Every failure mode is a plain value so callers (and the experiment
/// harness) can map them onto exit codes without string matching.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An ambient dimension below the supported minimum of 3.
    DimensionTooSmall { n: usize },
    /// Eigensolver input above the supported size.
    DimensionTooLarge { m: usize },
    /// Entries of a would-be zero-sum vector do not sum to zero.
    ZeroSumViolation { sum: f64 },
    /// A quantity that must be strictly positive was not.
    NonPositive { what: &'static str, value: f64 },
    /// A scalar parameter outside its documented range.
    ParamOutOfRange { what: &'static str, value: f64 },
    /// An exponential would exceed the floating-point range.
    Overflow { what: &'static str, exponent: f64 },
    /// Flaschka data violating the leaf constraints beyond tolerance.
    OffLeaf { casimir_error: f64 },
    /// Step-size underflow while enforcing positivity of the `a` variables.
    StiffnessAbort { time: f64, dt: f64 },
    /// Two Dirichlet eigenvalues coincide within tolerance.
    DegenerateSpectrum { gap: f64 },
    /// Input too ill-conditioned for a reliable answer.
    IllConditioned { what: &'static str, measure: f64 },
    /// Band-edge search found the wrong number of real roots.
    RootCount { expected: usize, found: usize },
    /// Node doubling did not converge within the node budget.
    QuadratureNoConvergence { nodes: usize, last_delta: f64 },
    /// A billiard trajectory passes too close to a codimension-two face.
    CornerDegeneracy { time: f64 },
    /// Operation not available for the requested input.
    Unsupported(&'static str),
    /// Internal invariant violated; indicates a bug, not bad input.
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionTooSmall { n } => {
                write!(f, "dimension n = {n} is below the minimum of 3")
            }
            Error::DimensionTooLarge { m } => {
                write!(f, "matrix dimension {m} exceeds the supported maximum of 64")
            }
            Error::ZeroSumViolation { sum } => {
                write!(f, "entries sum to {sum:e}, not zero")
            }
            Error::NonPositive { what, value } => {
                write!(f, "{what} must be strictly positive, got {value}")
            }
            Error::ParamOutOfRange { what, value } => {
                write!(f, "{what} = {value} is out of range")
            }
            Error::Overflow { what, exponent } => {
                write!(f, "{what}: exponent {exponent} exceeds the floating-point range")
            }
            Error::OffLeaf { casimir_error } => {
                write!(f, "point is off the symplectic leaf (Casimir error {casimir_error:e})")
            }
            Error::StiffnessAbort { time, dt } => {
                write!(f, "step size underflow at t = {time} (dt = {dt:e}); system too stiff")
            }
            Error::DegenerateSpectrum { gap } => {
                write!(f, "Dirichlet eigenvalues coincide within {gap:e}")
            }
            Error::IllConditioned { what, measure } => {
                write!(f, "{what} is too ill-conditioned ({measure:e})")
            }
            Error::RootCount { expected, found } => {
                write!(f, "band-edge search found {found} roots, expected {expected}")
            }
            Error::QuadratureNoConvergence { nodes, last_delta } => {
                write!(f, "quadrature did not converge with {nodes} nodes (last delta {last_delta:e})")
            }
            Error::CornerDegeneracy { time } => {
                write!(f, "trajectory hits a corner near t = {time}")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::Internal(what) => write!(f, "internal error: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
