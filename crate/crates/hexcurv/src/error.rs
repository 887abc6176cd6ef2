//! Error type shared by the library.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector precondition violated: {0}")]
    Precondition(String),
    #[error("pair of vectors does not span a plane")]
    DegenerateSpan,
    #[error("the two planes coincide")]
    CoincidentPlanes,

    #[error("degenerate hexagon: edge length {0} is below tolerance")]
    DegenerateHexagon(f64),
    #[error("no hexagon with the given boundary lengths")]
    NoSolution,
    #[error("Gram matrix has the wrong signature")]
    GramSignature,
    #[error("ratio {rho} has no real split of an edge of length {l}")]
    InconsistentRatio { l: f64, rho: f64 },
    #[error("edge center is not a point of the hyperbolic plane")]
    NoRealCenter,
    #[error("edge perpendiculars do not meet (residual {0:e})")]
    IncompatibleSplits(f64),
    #[error("sign vector {0} matches no domain")]
    UnclassifiableSigns(String),
    #[error("dual edge center on boundary {0} is not a point of the hyperbolic plane")]
    DualCenterOutside(usize),
    #[error("face center lies on an edge geodesic; the space-like height formula is singular")]
    SingularHeight,

    #[error("edge {edge} is not admissible (cosh l = {cosh_l})")]
    NotAdmissible { edge: usize, cosh_l: f64 },
    #[error("value outside its domain: {0}")]
    DomainViolation(String),
    #[error("unsupported weight range: {0}")]
    UnsupportedWeightRange(String),

    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown {kind} id {id}")]
    DanglingReference {
        line: usize,
        kind: &'static str,
        id: u64,
    },
    #[error("family constraint violated: {0}")]
    FamilyConstraint(String),
    #[error("index {0} out of range")]
    OutOfRange(usize),

    #[error("face {face}: {source}")]
    Face {
        face: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid target curvature: {0}")]
    InvalidTarget(String),
    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NotConverged {
        iterations: usize,
        residual: f64,
        best_f: Vec<f64>,
    },
    #[error("segment leaves the admissible space")]
    PathLeavesDomain,
    #[error("no admissible starting point after {0} sweeps")]
    NoFeasibleStart(usize),
}

impl Error {
    /// Attach a face index.
    pub fn at_face(self, face: usize) -> Error {
        match self {
            e @ Error::Face { .. } => e,
            e => Error::Face {
                face,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, stripping face context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Face { source, .. } => source.root(),
            e => e,
        }
    }
}
