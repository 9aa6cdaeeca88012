use num_bigint::BigInt;
use thiserror::Error;

/// Failure to read an exact scalar from text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{input}` as an exact scalar: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: String,
}

impl ParseScalarError {
    pub(crate) fn new(input: &str, reason: impl Into<String>) -> Self {
        Self { input: input.to_owned(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gluing matrix is not unimodular (det = {det})")]
    NonUnimodular { det: BigInt },
    #[error("fiber map is not normalized: expected f#(a) = a, got (b1, b2) = ({b1}, {b2})")]
    NotNormalized { b1: BigInt, b2: BigInt },
    #[error("det(B - I) = {det} is nonzero, so B has no eigenvector for eigenvalue 1")]
    NoEigenvector { det: BigInt },
    #[error("B is the identity matrix")]
    IdentityMatrix,
    #[error("word has {len} letters, above the limit of {limit}")]
    WordTooLong { len: usize, limit: usize },
    #[error("internal mismatch between independent computations: {0}")]
    InternalMismatch(String),
    #[error("invalid condition context: {0}")]
    InvalidContext(String),
    #[error("conditions not met: {0}")]
    ConditionsNotMet(String),
    #[error("map does not descend to the bundle: {0}")]
    GluingViolation(String),
    #[error("no affine witness available: {0}")]
    NoAffineWitness(String),
    #[error("f# is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("unclassifiable: {0}")]
    Unclassifiable(String),
    #[error("the iterate count n must be positive")]
    ZeroIterate,
}

pub type Result<T> = std::result::Result<T, Error>;
