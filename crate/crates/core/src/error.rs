use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("convex hull of an empty point set")]
    EmptyHull,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("scale factor must be non-negative")]
    InvalidScale,
    #[error("expected {expected} bodies, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("operation needs a full-dimensional body")]
    DegenerateBody,
    #[error("halfspace system is unbounded")]
    Unbounded,

    #[error("flag rays do not form a lattice basis (|det| = {0})")]
    NotUnimodular(String),
    #[error("invalid flag: {0}")]
    InvalidFlag(String),
    #[error("zero section has no valuation")]
    ZeroSection,
    #[error("restriction to the flag curve vanished identically")]
    FlagDegeneracy,
    #[error("section does not fit its degree bound: {0}")]
    DegreeBound(String),

    #[error("no sections in degrees 1..={0}")]
    NoSections(u32),
    #[error("incompatible series backends: {0}")]
    BackendMismatch(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("divisor polytope is unbounded (divisor not big)")]
    NotBig,
    #[error("divisor has no global sections (empty polytope)")]
    EmptyLinearSystem,
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("model carries no metric")]
    MissingMetric,
    #[error("partial body has zero volume")]
    ZeroVolume,
    #[error("divisor is not nef: {0}")]
    NotNef(String),
    #[error("models live on different fans")]
    FanMismatch,
    #[error("divisor must be integral here")]
    NonIntegralDivisor,

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("subadditive table has no entry at {0}")]
    IncompleteTable(String),
    #[error("point lies outside the polytope")]
    OutOfPolytope,

    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}
