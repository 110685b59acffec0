use std::fmt;

/// Failure modes surfaced by the library.
///
/// Evaluation distinguishes *outcomes* (a converged value, a precision
/// failure, an iteration cap) from *errors*: an `Error` means the request
/// itself was ill-posed or an internal contract was violated, never that the
/// algorithm merely failed to converge.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The requested evaluation point or parameter set lies outside the
    /// region where the function (or the chosen expansion) is defined.
    Domain(String),
    /// A lower parameter is a non-positive integer, so the function itself
    /// is undefined.
    Undefined(String),
    /// Two consecutive remainder estimates compared bit-equal, so the
    /// acceleration step has no information to work with.
    DegenerateWeights,
    /// Logarithm of the gamma function requested at one of its poles.
    Pole(String),
    /// An iterative reference computation hit its term cap without meeting
    /// its tolerance.
    NoConvergence { terms: usize },
    /// Elimination found no usable pivot.
    SingularSystem,
    /// A basis function underflowed to zero, leaving the system meaningless.
    BasisUnderflow,
    /// A configuration value violates its documented range.
    InvalidConfig(String),
    /// A complex literal could not be parsed.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Undefined(msg) => write!(f, "function undefined: {msg}"),
            Error::DegenerateWeights => {
                write!(f, "remainder estimates degenerate (equal weights)")
            }
            Error::Pole(msg) => write!(f, "gamma pole: {msg}"),
            Error::NoConvergence { terms } => {
                write!(f, "reference summation did not converge within {terms} terms")
            }
            Error::SingularSystem => write!(f, "linear system is singular"),
            Error::BasisUnderflow => write!(f, "basis function underflowed to zero"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
