use thiserror::Error;

/// Every failure mode of the library. Variants carry a short human-readable
/// context string where the bare name would be ambiguous.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pole at {0}")]
    PoleAtPoint(String),
    #[error("pole of order {order} at {at}")]
    HigherOrderPole { at: String, order: i64 },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("entry grows at infinity")]
    PoleAtInfinity,
    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("non-generic data: {0}")]
    NonGeneric(String),
    #[error("frame {frame} has kind {found}, expected {expected}")]
    FrameKindMismatch {
        frame: usize,
        found: String,
        expected: String,
    },
    #[error("no ledger value recorded at lattice position {0:?}")]
    MissingPath(Vec<i64>),
    #[error("zero denominator in tau ratio")]
    ZeroDenominator,
    #[error("Gram matrix is singular (basic assumption fails)")]
    BasicAssumptionFails,
    #[error("brute-force sum needs {terms} terms, cap is {cap}")]
    InfeasibleSize { terms: u128, cap: u128 },
    #[error("bundle is not trivial")]
    NotTrivial,
    #[error("degenerate formal type: {0}")]
    DegenerateFormalType(String),
    #[error("degenerate moduli point: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("singular step: {0}")]
    SingularStep(String),
    #[error("internal mismatch: {0}")]
    InternalMismatch(String),
    #[error("coincident points: {0}")]
    CoincidentPoints(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
