use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadExtensionDegree(u32),
    #[error("field order {p}^{e} exceeds the supported bound {bound}")]
    FieldTooLarge { p: u64, e: u32, bound: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("no irreducible polynomial of degree {e} over F_{p} found")]
    NoModulus { p: u32, e: u32 },
    #[error("elements or polynomials from different fields (F_{0} vs F_{1})")]
    FieldMismatch(u32, u32),
    #[error("{0} does not encode an element of F_{1}")]
    BadElement(String, u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial tuple is empty")]
    EmptyTuple,
    #[error("every polynomial in the tuple is zero")]
    AllZero,
    #[error("expected a monic polynomial, got {0}")]
    NotMonic(String),
    #[error("polynomial tuple is not coprime (common factor of degree {0})")]
    NotCoprime(usize),
    #[error("expected common factor degree {expected}, found {found}")]
    WrongCommonDegree { expected: usize, found: usize },
    #[error("malformed signature: {0}")]
    BadSignature(String),
    #[error("cannot parse polynomial {0:?}: {1}")]
    Parse(String, String),
    #[error("enumeration of {projected} tuples exceeds the cap of {cap}")]
    CapExceeded { projected: u128, cap: u64 },
    #[error("index ({k},{l}) is not part of the stratification for a={a}, b={b}, n={n}")]
    IllegalStratum { k: usize, l: usize, a: usize, b: usize, n: usize },
    #[error("stratum index k={k} outside 0..={max}")]
    StratumOutOfRange { k: usize, max: usize },
    #[error("characteristic {p} divides a={a} or b={b}; rerun with force to compute anyway")]
    Hypothesis { p: u32, a: usize, b: usize },
    #[error("weights and degree must be positive (a={a}, b={b}, n={n})")]
    BadWeights { a: usize, b: usize, n: usize },
    #[error("negative degree {0}")]
    NegativeDegree(i64),
    #[error("q must be at least 2, got {0}")]
    BadMeasureBase(u64),
    #[error("identity failed: {0}")]
    IdentityFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
