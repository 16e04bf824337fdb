use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state space mismatch: expected {expected} states, found {found}")]
    SpaceMismatch { expected: usize, found: usize },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown primitive game `{0}`")]
    UnknownGame(String),

    #[error("unknown atomic proposition `{0}`")]
    UnknownAtom(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported fragment: {0}")]
    Unsupported(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("{what} has size {found}, limit is {limit}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        found: usize,
    },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("undecided: {0}")]
    Undecided(String),

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::SpaceMismatch { expected, found })
        }
    }
}
