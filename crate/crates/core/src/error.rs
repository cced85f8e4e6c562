use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the kinematic and algebraic routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("grade error: {0}")]
    Grade(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate axis: direction vectors are linearly dependent")]
    DegenerateAxis,

    #[error("degenerate line: zero direction")]
    DegenerateLine,

    #[error("lines are parallel; common perpendicular is not unique")]
    ParallelLines,

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("this map requires an end frame with k = {expected}, chain has k = {found}")]
    WrongMap { expected: usize, found: usize },

    #[error("configuration has {found} angles, chain needs {expected}")]
    ConfigurationLength { expected: usize, found: usize },

    #[error("configuration is off the fiber: closure residual {residual:e} exceeds {tol:e}")]
    NotOnFiber { residual: f64, tol: f64 },

    #[error("flex direction is not a unit tangent vector of the fiber")]
    InvalidDirection,

    #[error("cycle is infinitesimally rigid at this configuration (empty kernel)")]
    RigidCycle,

    #[error("fiber projection did not converge after {iterations} iterations (residual {residual:e})")]
    ProjectionFailure { iterations: usize, residual: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("cycle is not generic at axis window starting at {window}: {reason}")]
    NonGeneric { window: usize, reason: String },

    #[error("degenerate simplex for body {body}")]
    DegenerateSimplex { body: usize },

    #[error("degenerate leg {leg}: coincident endpoints")]
    DegenerateLeg { leg: usize },

    #[error("linkage is not canonical: {0}")]
    Provenance(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid scenario parameters: {0}")]
    ScenarioParameters(String),

    #[error("non-rational input: {0}")]
    NotRational(String),

    #[error("{path}: {source}")]
    Scenario { path: String, source: Box<Error> },

    #[error("path point {index}: {source}")]
    PathPoint { index: usize, source: Box<Error> },
}

impl Error {
    /// Whether the error signals a genericity or degeneracy failure of the
    /// input geometry, as opposed to malformed input.
    pub fn is_degeneracy(&self) -> bool {
        match self {
            Error::DegenerateAxis
            | Error::DegenerateLine
            | Error::ParallelLines
            | Error::RigidCycle
            | Error::ProjectionFailure { .. }
            | Error::NonGeneric { .. }
            | Error::DegenerateSimplex { .. }
            | Error::DegenerateLeg { .. } => true,
            Error::PathPoint { source, .. } => source.is_degeneracy(),
            _ => false,
        }
    }

    pub fn is_internal(&self) -> bool {
        match self {
            Error::InternalConsistency(_) => true,
            Error::PathPoint { source, .. } => source.is_internal(),
            _ => false,
        }
    }
}
