use thiserror::Error;

use crate::history::FamilyViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not hermitian: max |A - A^dagger| = {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    #[error("operator is not unitary: max |U^dagger U - I| = {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("operator is not a projector: max |P^2 - P| = {idempotency:.3e}, max |P - P^dagger| = {asymmetry:.3e}")]
    NotProjector { idempotency: f64, asymmetry: f64 },

    #[error("state vector has a non-finite or zero norm")]
    InvalidState,

    #[error("invalid factor signature: {0}")]
    Signature(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("invalid projector family: {0}")]
    Family(FamilyViolation),

    #[error("history grid has no projector families")]
    EmptyGrid,

    #[error("grid times must be strictly increasing (family {index} at t={time} follows t={previous})")]
    TimesNotIncreasing { index: usize, time: f64, previous: f64 },

    #[error("history {history:?} is outside the grid index space {shape:?}")]
    HistoryOutOfRange { history: Vec<usize>, shape: Vec<usize> },

    #[error("schrodinger-chain evaluation needs equal time steps; step {index} is {step} but the first is {first}")]
    UnequalSpacing { index: usize, step: f64, first: f64 },

    #[error("grid enumerates {count} histories, above the cap of {cap}; coarse-grain the families or raise the cap")]
    HistoryCapExceeded { count: u128, cap: usize },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("history set is not decoherent: max |D_ab| = {max_offdiag:.3e} exceeds epsilon = {epsilon:.3e}")]
    NotCertified { max_offdiag: f64, epsilon: f64 },

    #[error("conditioning event has probability {probability:.3e}, at or below the floor {floor:.1e}")]
    NullCondition { probability: f64, floor: f64 },

    #[error("invalid condition: {0}")]
    Condition(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no graining candidates to score")]
    NoCandidates,
}
