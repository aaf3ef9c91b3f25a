use thiserror::Error;

/// Errors produced by quiverforge operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("empty quiver")]
    EmptyQuiver,
    #[error("vertex {0} out of range")]
    InvalidVertex(usize),
    #[error("edge {0} out of range")]
    InvalidEdge(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("edges are not parallel: {0}")]
    NotParallel(String),
    #[error("path enumeration would exceed the bound of {0} paths")]
    TooManyPaths(usize),
    #[error("operands live on different quivers")]
    MixedQuivers,
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
    #[error("zero dimension vector")]
    ZeroDimension,
    #[error("representation is not thin (all dimensions must be 0 or 1)")]
    NotThin,
    #[error("support of {0} vertices exceeds the enumeration cap of {1}")]
    TooManyVertices(usize, usize),
    #[error("rank-deficient subspace basis at vertex {0}")]
    RankDeficient(usize),
    #[error("stability parameter is not balanced: theta'.d = {0}")]
    UnbalancedTheta(f64),
    #[error("non-finite values encountered: {0}")]
    NonFinite(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("matrices do not commute (commutator norm {0:e})")]
    NotCommuting(f64),
    #[error("generic linear combination is defective; no usable eigenbasis")]
    DefectiveCombination,
    #[error("zero eigenvalue: tuple is not in the invertible locus")]
    ZeroEigenvalue,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("polynomial is not invariant under the required action")]
    NotInvariant,
    #[error("all invariants vanish; input is not a stable point")]
    DegenerateInvariants,
    #[error("operation does not match its correspondence record: {0}")]
    CorrespondenceMismatch(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
