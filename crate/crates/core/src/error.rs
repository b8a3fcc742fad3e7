use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid register layout: {0}")]
    InvalidLayout(String),
    #[error("invalid basis label: {0}")]
    InvalidLabel(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("slot {slot} out of range for a register of {slots} slots")]
    SlotOutOfRange { slot: usize, slots: usize },
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid game tree: {0}")]
    InvalidTree(String),
    #[error("enumeration of {required} profiles exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("dense dimension {dimension} exceeds the oracle limit of {limit}")]
    DimensionTooLarge { dimension: usize, limit: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that indicate malformed input text rather than a bad model.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Json(_) | Error::Parse(_) | Error::InvalidLabel(_)
        )
    }
}
