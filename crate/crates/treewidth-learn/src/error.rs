use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable set must contain at least one variable")]
    EmptyVarSet,
    #[error("cardinality {0} is invalid; every variable needs at least two states")]
    InvalidCardinality(usize),
    #[error("table would hold {cells} cells, above the hard cap of {cap}")]
    TableTooLarge { cells: u128, cap: usize },
    #[error("probability vector has {got} entries but the variable set implies {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("negative probability {0} at cell {1}")]
    NegativeProbability(f64, usize),
    #[error("probabilities sum to {0}, not 1 within 1e-9")]
    NotNormalized(f64),
    #[error("subset contains id {id} outside the valid range 0..{n}")]
    InvalidSubset { id: usize, n: usize },
    #[error("subset ids must be strictly increasing, saw {0} after {1}")]
    UnsortedSubset(usize, usize),
    #[error("sets passed to a mutual-information query must be pairwise disjoint")]
    OverlappingSets,
    #[error("tables have different shapes")]
    ShapeMismatch,
    #[error("sample set must contain at least one row")]
    EmptySampleSet,
    #[error("sample row {row} has value {value} for a variable with cardinality {card}")]
    SampleOutOfRange { row: usize, value: usize, card: usize },
    #[error("estimator budget is invalid: {0}")]
    InvalidBudget(String),
    #[error("ground set must contain at least two elements")]
    GroundTooSmall,
    #[error("ground set of {0} elements is too large for exhaustive minimization")]
    GroundTooLarge(usize),
    #[error("conditioning set leaves no residual variables")]
    EmptyResidual,
    #[error("partitions are over different ground sets")]
    GroundMismatch,
    #[error("partition blocks must be nonempty, disjoint and cover the ground set")]
    MalformedPartition,
    #[error("bag edges do not form a tree over the bags")]
    NotATree,
    #[error("vertex {0} is not covered by any bag")]
    CoverageGap(usize),
    #[error("vertex {0} violates the running-intersection property")]
    RunningIntersectionViolation(usize),
    #[error("edge separator {0:?} exceeds the width bound {1} or has no family entry")]
    SeparatorTooLarge(Vec<usize>, usize),
    #[error("graph is not chordal")]
    NotChordal,
    #[error("no tree-decomposition of the requested width is compatible with the family")]
    NoDecomposition,
    #[error("factorized model marginals disagree on shared variables")]
    InconsistentModel,
    #[error("generator spec is invalid: {0}")]
    InvalidSpec(String),
    #[error("distribution and tree-decomposition are too large to measure: {0}")]
    TooLarge(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
