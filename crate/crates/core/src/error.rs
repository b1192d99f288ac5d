use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field GF({p}^{e}) exceeds the supported size")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u64),
    #[error("value {value} is not an element of a field of size {size}")]
    NotAnElement { value: u64, size: u64 },
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("n = {n} is not coprime with q = {q}")]
    NotCoprime { n: u64, q: u64 },
    #[error("extension degree {r} exceeds the cap {cap}")]
    ExtensionTooLarge { r: u32, cap: u32 },
    #[error("element is not in the base field")]
    NotInBaseField,
    #[error("index {index} out of range for modulus {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(usize, usize),
    #[error("operation on an empty index set")]
    EmptySet,
    #[error("index set is not a union of cyclotomic cosets")]
    NotCosetUnion,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("row length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("the zero code has no minimum distance")]
    ZeroCode,
    #[error("cannot puncture every coordinate")]
    PunctureAll,
    #[error("repeated evaluation point")]
    RepeatedPoint,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("enumeration of {what} exceeds the cap of 2^{cap_bits}")]
    CapExceeded { what: String, cap_bits: u32 },
}
