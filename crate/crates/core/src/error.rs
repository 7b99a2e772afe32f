use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every module of the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level {level} exceeds the base-change cap {cap}")]
    LevelCapExceeded { level: u64, cap: u64 },
    #[error("context level too small, needs at least {min_level}")]
    NeedsBaseChange { min_level: u64 },
    #[error("both homogeneous forms are zero")]
    BothFormsZero,
    #[error("direction class meets more than one multiplicity part; refine it first")]
    AmbiguousClass,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("target coincides with the base point")]
    SamePoint,
    #[error("degenerate map: numerator and denominator share a root or the degree drops")]
    DegenerateMap,
    #[error("iterate degree {degree} exceeds the cap {cap}")]
    IterationCapExceeded { degree: u64, cap: u64 },
    #[error("direction is not defined over Q; finite differences need a rational class")]
    IrrationalDirection,
    #[error("difference quotients did not stabilise before the level cap")]
    PiecewiseBoundaryUnresolved,
    #[error("breakpoint could not be certified below denominator bound {bound}")]
    BreakpointUnresolved { bound: u64 },
    #[error("descent direction {0} is not defined over Q")]
    NeedsExtension(String),
    #[error("totally invariant point: the depth sequence is only defined at points that are not totally invariant")]
    TotallyInvariantPoint,
    #[error("a coefficient has a pole at the specialisation value")]
    CoefficientPole,
    #[error("specialised map is ill-conditioned (relative resultant {0:e})")]
    IllConditioned(f64),
    #[error("root finding failed at level {level} for target {target}")]
    RootFindingFailed { level: usize, target: String },
    #[error("targets overlap at scale {0}")]
    TargetsOverlap(f64),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
