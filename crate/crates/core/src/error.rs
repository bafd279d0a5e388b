use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("target {target} out of range for {count} subsystems")]
    TargetOutOfRange { target: usize, count: usize },
    #[error("target {0} listed more than once")]
    DuplicateTarget(usize),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (max |U†U - I| = {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (max |H - H†| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("invalid basis label {0:?}")]
    InvalidLabel(String),
    #[error("register too large: {0} subsystems (max {max})", max = crate::state::MAX_SUBSYSTEMS)]
    TooLarge(usize),
    #[error("state has weight {0:e} outside the decoherence-free code space")]
    OutsideCodeSpace(f64),
    #[error("invalid trap parameters: {0}")]
    InvalidParams(String),
    #[error("outside perturbative regime: validity ratio {ratio} exceeds {limit}")]
    OutsidePerturbativeRegime { ratio: f64, limit: f64 },
    #[error("no oscillation detected: transfer probability peaks at {max_transfer}")]
    NoOscillation { max_transfer: f64 },
    #[error("empty outcome distribution")]
    EmptyDistribution,
    #[error("invalid gate schedule: {0}")]
    InvalidSchedule(String),
    #[error("malformed register: {0}")]
    InvalidRegister(String),
    #[error("expected {expected} phases, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid dephasing spec: {0}")]
    InvalidSpec(String),
    #[error("correction search failed for outcome {outcome}: {candidates} candidates fit")]
    CorrectionSearch { outcome: String, candidates: usize },
}
