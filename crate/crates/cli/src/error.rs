use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration; `field` is the dotted path of the offending key.
    #[error("{file}: {field}: {message}")]
    Config {
        file: PathBuf,
        field: String,
        message: String,
    },

    #[error("{}:{line}:{column}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{}: {message}", file.display())]
    Matrix { file: PathBuf, message: String },

    #[error("{0}")]
    Io(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Model(#[from] lindbladlab::Error),
}

impl CliError {
    /// 1 for anything the user can fix in the input, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        use lindbladlab::Error as E;
        match self {
            CliError::Numerical(_) => 3,
            CliError::Model(
                E::Decomposition(_) | E::NonSemisimpleZero(_) | E::NoStationaryState | E::NotAnAlgebra(_),
            ) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
