//! Crate-wide error type.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shape constraint violated (`m <= n`, positive dimensions, ...).
    InvalidShape { n: usize, m: usize },
    /// Entry-bound constraint violated (`0 <= a <= b`, `b > 0`).
    InvalidBounds { lower: f64, upper: f64 },
    /// A scalar argument is outside its documented domain.
    InvalidArgument(&'static str),
    /// Exact computation refused: input too large for the algorithm class.
    SizeGuard { limit: usize, got: usize },
    /// Operation is defined for square matrices only.
    NotSquare { n: usize, m: usize },
    /// A matrix entry violates finiteness or sign constraints.
    InvalidEntry { row: usize, col: usize, value: f64 },
    /// Strictly positive input required.
    NonPositiveEntry,
    /// A matrix that must be invertible is numerically singular.
    SingularMatrix,
    /// A matrix that must have full column rank does not.
    RankDeficient,
    /// Eigenvalue / column index outside the valid range.
    IndexOutOfRange,
    /// A sampling schedule exceeds the configured draw budget.
    BudgetExceeded { requested: u64, budget: u64 },
    /// Adaptive quadrature stopped before reaching the requested accuracy;
    /// carries the best value obtained and the achieved error estimate.
    QuadratureNoConvergence { value: f64, error: f64 },
    /// An iterative matrix decomposition failed to converge.
    DecompositionFailed,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidShape { n, m } => write!(f, "invalid shape ({n}, {m}): need 1 <= m <= n"),
            Error::InvalidBounds { lower, upper } => {
                write!(f, "invalid entry bounds [{lower}, {upper}]")
            }
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::SizeGuard { limit, got } => {
                write!(f, "size guard exceeded: n = {got} > {limit}")
            }
            Error::NotSquare { n, m } => write!(f, "square matrix required, got ({n}, {m})"),
            Error::InvalidEntry { row, col, value } => {
                write!(
                    f,
                    "entry ({row}, {col}) = {value} is not a finite nonnegative number"
                )
            }
            Error::NonPositiveEntry => write!(f, "strictly positive entries required"),
            Error::SingularMatrix => write!(f, "matrix is numerically singular"),
            Error::RankDeficient => write!(f, "matrix does not have full column rank"),
            Error::IndexOutOfRange => write!(f, "index out of range"),
            Error::BudgetExceeded { requested, budget } => {
                write!(
                    f,
                    "sampling budget exceeded: {requested} draws requested, budget {budget}"
                )
            }
            Error::QuadratureNoConvergence { value, error } => {
                write!(
                    f,
                    "quadrature did not converge: value {value}, achieved error {error:e}"
                )
            }
            Error::DecompositionFailed => write!(f, "matrix decomposition did not converge"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
