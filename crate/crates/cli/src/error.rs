use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] crashskew::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: crashskew::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }

    pub(crate) fn context(context: impl Into<String>) -> impl FnOnce(crashskew::Error) -> Self {
        let context = context.into();
        move |source| CliError::Context { context, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Process outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// The report was written but an optimizer did not converge.
    NotConverged,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::NotConverged => 2,
        }
    }
}
