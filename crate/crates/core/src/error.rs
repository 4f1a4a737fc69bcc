use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("unsaturated at radius {radius}: {detail}")]
    Unsaturated { radius: usize, detail: String },
    #[error("resource cap: {what} needs {requested}, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("unresolved: {0}")]
    Unresolved(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Unresolved(_) => 1,
            Error::Validation(_) => 2,
            Error::Unsaturated { .. } => 3,
            Error::ResourceCap { .. } => 4,
            Error::Numeric(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
