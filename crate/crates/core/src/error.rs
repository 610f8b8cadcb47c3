use std::fmt;

/// Failure modes shared by every transform and command.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("missing input: {0}")]
    Missing(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn size(msg: impl fmt::Display) -> Self {
        Error::Size(msg.to_string())
    }

    pub fn param(msg: impl fmt::Display) -> Self {
        Error::Param(msg.to_string())
    }

    pub fn format(msg: impl fmt::Display) -> Self {
        Error::Format(msg.to_string())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Missing(_) => 2,
            Error::Io(e) if e.kind() == std::io::ErrorKind::NotFound => 2,
            Error::Format(_) | Error::Io(_) => 3,
            Error::Size(_) => 4,
            Error::Param(_) | Error::Parse(_) => 5,
        }
    }
}
