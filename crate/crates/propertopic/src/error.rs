use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("profiles do not match for composition: {0}")]
    Composition(String),
    #[error("element belongs to `{found}`, expected `{expected}`")]
    Owner { expected: String, found: String },
    #[error("unknown color `{0}`")]
    UnknownColor(String),
    #[error("not an element of `{prop}`: {detail}")]
    NotMember { prop: String, detail: String },
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("parse error at {at}: {detail}")]
    Parse { at: String, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("orbit closure exceeded the cap of {0} states")]
    CapExceeded(usize),
    #[error("not a weak-{n} algebra: {detail}")]
    NotWeak { n: usize, detail: String },
}

impl Error {
    pub fn parse(at: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parse {
            at: at.into(),
            detail: detail.into(),
        }
    }

    pub fn invalid(detail: impl Into<String>) -> Self {
        Error::Invalid(detail.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
