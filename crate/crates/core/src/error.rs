use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large for exact solver `{solver}`: {detail}")]
    TooLargeForExact { solver: &'static str, detail: String },

    #[error("missing descriptor (file {file}, subset {subset})")]
    MissingDescriptor { file: usize, subset: usize },

    #[error("user {user} is not a recipient of this codeword")]
    NotARecipient { user: usize },

    #[error("user {user} cache lacks descriptor (file {file}, subset {subset})")]
    PlacementViolation { user: usize, file: usize, subset: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
