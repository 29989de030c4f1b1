use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graphon document: {0}")]
    Syntax(String),
    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),
    #[error("unknown catalog graphon {0:?} (expected one of fig1, a..k)")]
    UnknownGraphon(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension q = {0}: facet hyperplanes need q >= 2")]
    UnsupportedDimension(usize),
    #[error("skeleton graph is disconnected; classify each component separately")]
    DisconnectedSkeleton,
    #[error("point is off the affine hyperplane 1'w = 1 (sum = {sum})")]
    OffAffineHyperplane { sum: f64 },
    #[error("Omega* undefined: x* outside edge cone")]
    OmegaStarUndefined,
    #[error("vertex {vertex} has degree {degree} < 2")]
    LowDegree { vertex: usize, degree: usize },
    #[error("graph has {0} nodes; the brute-force oracle accepts at most 12")]
    OracleTooLarge(usize),
    #[error("invalid edge list: {0}")]
    EdgeList(String),
    #[error("x* is not a positive probability vector")]
    NotProbabilityVector,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("{0}")]
    Precondition(String),
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error("invalid CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
