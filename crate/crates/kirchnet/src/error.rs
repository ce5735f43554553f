use kirchnet_core::error::{Error, KirchhoffError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("network is not globally solvable: {0}")]
    Unsolvable(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 0 ok, 1 globally unsolvable, 2 validation (and I/O), 3 parse.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unsolvable(_) => 1,
            CliError::Validation(_) | CliError::Io { .. } | CliError::Csv(_) => 2,
            CliError::Parse(_) => 3,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Kirchhoff(
                k @ (KirchhoffError::GloballyUnsolvable { .. }
                | KirchhoffError::LocallyUnsolvable { .. }),
            ) => CliError::Unsolvable(k.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<KirchhoffError> for CliError {
    fn from(e: KirchhoffError) -> Self {
        Error::from(e).into()
    }
}
