use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be monic of degree {expected}")]
    BadModulus { expected: u32 },
    #[error("modulus {modulus:?} is reducible over GF({p})")]
    ReducibleModulus { p: u32, modulus: Vec<u32> },
    #[error("field order {order} exceeds the configured bound {bound}")]
    OrderTooLarge { order: u64, bound: u64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors live in ambient spaces of different dimensions ({expected} vs {found})")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("matrix must be non-zero")]
    ZeroMatrix,
    #[error("scalar matrices define no hyperplane for the identity automorphism")]
    ScalarMatrixWithIdentity,

    #[error("geometry too large: {flags} flags exceed the bound {bound}")]
    TooLarge { flags: u64, bound: u64 },
    #[error("projective dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("flag set is not a subspace")]
    NotASubspace,
    #[error("flag set is not a geometric hyperplane")]
    NotAHyperplane,
    #[error("flag set length {found} does not match the geometry ({expected} flags)")]
    FlagSetMismatch { expected: usize, found: usize },
    #[error("no pair of flags at distance 3")]
    NoDistance3Pair,

    #[error("functional vanishes on the whole ambient space")]
    ZeroFunctional,
    #[error("functional does not vanish on the quotient kernel")]
    FunctionalNotOnQuotient,
    #[error("kernel is not contained in the ambient space of the embedding")]
    KernelNotInAmbient,
    #[error("kernel meets the secant through flags {0} and {1}")]
    QuotientViolation(usize, usize),

    #[error("automorphism power {power} out of range for degree {degree}")]
    BadAutomorphism { power: u32, degree: u32 },
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("negative multiplicity {0}")]
    NegativeMultiplicity(i64),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("expected {expected} arguments, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("search space of {size} points exceeds the bound {bound}")]
    SearchSpaceTooLarge { size: u128, bound: u128 },
    #[error("non-null semi-polynomial vanishes everywhere")]
    IdentityViolation,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
