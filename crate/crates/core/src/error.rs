use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {value} outside the supported range [{min}, {max}]")]
    OutOfRange { value: i128, min: i128, max: i128 },
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("{what} has size {size}, above the cap {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },
    #[error("vector is not primitive (gcd {gcd})")]
    NotPrimitive { gcd: i128 },
    #[error("dimension {0} is too small for this operation")]
    DimensionTooSmall(usize),
    #[error("dimension {got} exceeds the maximum {max}")]
    DimensionTooLarge { got: usize, max: usize },
    #[error("{u} is not a unit modulo {q}")]
    NotAUnit { u: i128, q: u64 },
    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: i128 },
    #[error("basis is singular")]
    SingularBasis,
    #[error("determinant {got} does not match the expected {expected}")]
    DeterminantMismatch { got: i128, expected: i128 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("search budget of {cells} cells exhausted with interval [{lo}, {hi}]")]
    BudgetExhausted { cells: u64, lo: f64, hi: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Errors caused by a size cap rather than by malformed input.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            Error::TooLarge { .. }
                | Error::Overflow(_)
                | Error::DimensionTooLarge { .. }
                | Error::OutOfRange { .. }
                | Error::BudgetExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
