use thiserror::Error;

use crate::twoplayer::ValueInterval;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("atom references dimension {dim} but the weights have {k} dimensions")]
    DimensionOutOfRange { dim: usize, k: usize },

    #[error("strategy is undefined at reachable state: {0}")]
    PartialStrategy(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configured work limit ran out. `best` holds the tightest sound
    /// interval known at that point, when one exists.
    #[error("budget exceeded: {what}")]
    Budget { what: String, best: Option<Box<ValueInterval>> },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn budget(what: impl Into<String>) -> Self {
        Error::Budget { what: what.into(), best: None }
    }
}
