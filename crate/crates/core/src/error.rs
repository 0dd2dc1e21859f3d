use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p not prime: {0}")]
    NotPrime(u64),
    #[error("denominator not invertible: {0}")]
    DenominatorNotInvertible(String),
    #[error("level {level} is not coprime to p = {p}")]
    NotCoprime { level: u64, p: u64 },
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("element is not an N-th root of unity for N = {0}")]
    NotRootOfUnity(u64),
    #[error("characteristic polynomial has roots outside the roots of unity of level {0}")]
    NonUnityRoots(u64),
    #[error("dictionary too small: need level {needed}, ceiling is {max}")]
    DictionaryTooSmall { needed: u64, max: u64 },
    #[error("matrix is not invertible over the ring")]
    NotInvertible,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d∘d ≠ 0 at degree {0}")]
    NotAComplex(i64),
    #[error("map does not commute with differentials at degree {0}")]
    NotAChainMap(i64),
    #[error("subcomplex is not a direct summand in degree {0}")]
    NotSplit(i64),
    #[error("induced map is not an automorphism in degree {0}")]
    NotAutomorphism(i64),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("defect for filtration index {0} does not lie in the image of the differential")]
    DefectNotInImage(usize),
    #[error("characteristic polynomial needs an extension of degree {degree}")]
    NeedsExtension { degree: usize },
    #[error("top component is not bijective")]
    NotBijective,
    #[error("field too large for order computations")]
    FieldTooLarge,
    #[error("{path}: {reason}")]
    Decode { path: String, reason: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
