use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("scenario {0}x{1} is outside the supported range 1..=8")]
    ScenarioRange(usize, usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("relabeling incompatible with scenario: {0}")]
    Incompatible(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
