use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("q = {0} is even; the construction needs an odd prime")]
    EvenModulus(u32),
    #[error("q = {0} is not prime (only prime fields are supported)")]
    NotPrime(u32),
    #[error("q = {q} exceeds the supported maximum {max}")]
    ModulusTooLarge { q: u32, max: u32 },
    #[error("delta must be a nonzero element of F_q")]
    DeltaZero,
    #[error("delta = {delta} is a square in F_{q}; a non-square is required")]
    DeltaIsSquare { q: u32, delta: u32 },
    #[error("a = {0} is not a valid graph parameter: {1}")]
    InvalidDistance(u32, &'static str),
    #[error("sphere S_{0} is empty")]
    EmptySphere(u32),
    #[error("index {index} out of range (expected {range})")]
    OutOfRange { index: i64, range: String },
    #[error("q = {q} is too large for dense operators (limit {limit})")]
    TooLargeForDense { q: u32, limit: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
