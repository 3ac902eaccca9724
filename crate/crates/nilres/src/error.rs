use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("inconsistent presentation: {0}")]
    Inconsistent(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input<S: Into<String>>(msg: S) -> Self {
        Error::Input(msg.into())
    }
    pub fn resource<S: Into<String>>(msg: S) -> Self {
        Error::Resource(msg.into())
    }
    pub fn inconsistent<S: Into<String>>(msg: S) -> Self {
        Error::Inconsistent(msg.into())
    }
}
