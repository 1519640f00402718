use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular model (discriminant is zero)")]
    SingularModel,

    #[error("{0} is not a square-free nonzero integer")]
    NotSquareFree(String),

    #[error("bad reduction at p = {0}")]
    BadReduction(u64),

    #[error("good reduction at p = {0}")]
    GoodReduction(u64),

    #[error("indeterminate at this precision ({0} p-adic digits)")]
    Indeterminate(u32),

    #[error("shape unreachable: {0}")]
    ShapeUnreachable(String),

    #[error("level mismatch: conductors {0} and {1} differ")]
    LevelMismatch(String, String),

    #[error("modular polynomial table not available for l = {0}")]
    TableUnavailable(u64),

    #[error("tolerance unreachable: requested {requested:e}, best attainable {attainable:e}")]
    ToleranceUnreachable { requested: f64, attainable: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate curve label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown curve label {0:?}")]
    UnknownLabel(String),

    #[error("point is not on the curve")]
    NotOnCurve,

    #[error("independent methods disagree: {0}")]
    MethodDisagreement(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
