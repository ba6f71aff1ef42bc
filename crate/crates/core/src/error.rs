use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },

    #[error("duplicate token id {id} for units {first:?} and {second:?}")]
    DuplicateId {
        id: u32,
        first: String,
        second: String,
    },

    #[error("merge result not in vocabulary: {left:?} + {right:?}")]
    MergeResultMissing { left: String, right: String },

    #[error("merge operand not in vocabulary: {0:?}")]
    MergeOperandMissing(String),

    #[error("invalid pretokenizer pattern: {0}")]
    Pattern(String),

    #[error("text {0:?} cannot be covered by vocabulary units")]
    Uncoverable(String),

    #[error("unknown token id {0}")]
    UnknownId(u32),

    #[error("token {0:?} has no valid segmentation")]
    NoSegmentation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not enough qualifying vocabulary tokens: need {needed}, found {found}")]
    InsufficientTokens { needed: usize, found: usize },

    #[error("grammar provider: {0}")]
    Provider(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
