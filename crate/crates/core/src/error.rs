use thiserror::Error;

/// Errors surfaced by the library. Precondition failures carry the name of
/// the operation and the violated constraint so the CLI can echo them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: precondition violated: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("{op}: refused: {detail}")]
    Refused { op: &'static str, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(op: &'static str, detail: impl Into<String>) -> Result<T> {
    Err(Error::Precondition {
        op,
        detail: detail.into(),
    })
}

pub(crate) fn refused<T>(op: &'static str, detail: impl Into<String>) -> Result<T> {
    Err(Error::Refused {
        op,
        detail: detail.into(),
    })
}
