use core::fmt;

/// Errors raised by the calculus.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A predictive probability outside the open interval (0, 1).
    InvalidPredictive { index: usize, value: f64 },
    /// A mass vector that is malformed, negative, or does not sum to one.
    InvalidMass(&'static str),
    /// A mass component equal to zero where the inversion needs strict positivity.
    Degenerate { index: usize },
    /// Lengths or orders that do not fit the requested operation.
    Dimension { expected: usize, found: usize },
    /// A PaN assertion violating `1 <= a1 <= a2 <= N-1` or the bound conditions.
    InvalidAssertion(&'static str),
    /// A fitted quartic-side completion that fails to be nondecreasing on the grid.
    NonMonotoneCompletion { index: usize },
    /// `q1` above the admissible bound for the frequency-mimicking family.
    BoundViolation { q1: f64, bound: f64 },
    /// No frequency-mimicking extension is available at this count.
    NotExtendible { a: usize },
    /// Extension bounds inconsistent with the widened window.
    InvalidExtension(&'static str),
    /// Three conditional lines that do not satisfy the one-step reduction.
    NonCoherentTriple,
    /// `ceil(N theta1) > floor(N theta2)`.
    EmptyWindow { a1: usize, a2: usize },
    /// Incomplete-beta shape parameters other than `alpha = beta = 0`.
    UnsupportedParameters,
    /// Invalid mixing interval.
    InvalidParameters(&'static str),
    /// A numerical routine failed to reach its tolerance.
    Precision(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPredictive { index, value } => {
                write!(f, "predictive entry {index} = {value} is outside (0, 1)")
            }
            Error::InvalidMass(why) => write!(f, "invalid mass function: {why}"),
            Error::Degenerate { index } => write!(
                f,
                "mass component {index} is zero; degenerate inversion is not supported"
            ),
            Error::Dimension { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidAssertion(why) => write!(f, "invalid PaN assertion: {why}"),
            Error::NonMonotoneCompletion { index } => {
                write!(f, "completion is not nondecreasing at a = {index}")
            }
            Error::BoundViolation { q1, bound } => {
                write!(f, "q1 = {q1} exceeds the admissible bound {bound}")
            }
            Error::NotExtendible { a } => {
                write!(f, "a = {a} does not admit a frequency-mimicking extension")
            }
            Error::InvalidExtension(why) => write!(f, "invalid extension: {why}"),
            Error::NonCoherentTriple => {
                f.write_str("conditional triple does not satisfy the reduction equation")
            }
            Error::EmptyWindow { a1, a2 } => {
                write!(f, "empty frequency-mimicking window: a1 = {a1} > a2 = {a2}")
            }
            Error::UnsupportedParameters => {
                f.write_str("only alpha = beta = 0 incomplete-beta densities are supported")
            }
            Error::InvalidParameters(why) => write!(f, "invalid parameters: {why}"),
            Error::Precision(why) => write!(f, "numerical precision failure: {why}"),
        }
    }
}

impl core::error::Error for Error {}
