use std::fmt;

/// Errors surfaced by the geometry engine. Everything here is a contract
/// violation or a resource guard; ordinary "empty result" outcomes are not
/// errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Modulus failed the trial-division primality check.
    NotPrime(u32),
    /// Modulus above the supported ceiling (`MAX_MODULUS`).
    ModulusTooLarge(u32),
    /// Multiplicative inverse of zero requested.
    DivisionByZero,
    /// Vector or matrix shapes do not line up.
    DimensionMismatch { expected: usize, got: usize },
    /// Two flats live in different ambient spaces (p or n differ).
    AmbientMismatch,
    /// A dimension argument is outside its valid range.
    InvalidDimension { what: &'static str, value: usize, limit: usize },
    /// Enumeration would produce more items than the configured guard allows.
    GuardExceeded { requested: u128, guard: u64 },
    /// A requested sample is larger than the available population.
    OversizeRequest { requested: u64, available: u64 },
    /// A lemma hypothesis does not hold on the given input; the message names
    /// the offending witness.
    HypothesisViolation(String),
    /// Numeric overflow in an exact count (beyond u128).
    CountOverflow,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::ModulusTooLarge(p) => {
                write!(f, "modulus {p} exceeds supported ceiling {}", crate::field::MAX_MODULUS)
            }
            Error::DivisionByZero => write!(f, "division by zero in prime field"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::AmbientMismatch => write!(f, "flats live in different ambient spaces"),
            Error::InvalidDimension { what, value, limit } => {
                write!(f, "invalid {what}: {value} (limit {limit})")
            }
            Error::GuardExceeded { requested, guard } => {
                write!(f, "enumeration of {requested} items exceeds guard {guard}")
            }
            Error::OversizeRequest { requested, available } => {
                write!(f, "requested {requested} items but only {available} exist")
            }
            Error::HypothesisViolation(msg) => write!(f, "hypothesis violation: {msg}"),
            Error::CountOverflow => write!(f, "exact count overflowed u128"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
