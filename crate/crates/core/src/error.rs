use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    Sizing { dim: usize, cap: usize },

    #[error("level index {index} out of range for {levels}-level atoms")]
    LevelOutOfRange { index: usize, levels: usize },

    #[error("operators live on different bases")]
    BasisMismatch,

    #[error("g-table violates symmetry or support rules at {0:?}")]
    GTable(Vec<[usize; 4]>),

    #[error("transitions served by more than one mode: {0:?}")]
    Coupling(Vec<(usize, usize)>),

    #[error("unknown configuration `{0}`")]
    UnknownConfiguration(String),

    #[error("unknown g-row `{0}`")]
    UnknownGRow(String),

    #[error("phase branch violates r_s >= 0 for mode {mode}")]
    InadmissibleBranch { mode: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Everything except a numerical failure traces back to the caller's input
    /// or environment (including unreadable or unwritable paths).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}
