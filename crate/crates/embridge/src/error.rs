use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Row {
        line: usize,
        #[source]
        source: embridge_core::Error,
    },
    #[error(transparent)]
    Core(#[from] embridge_core::Error),
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit status for an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Input = 2,
    Consistency = 3,
    NoConvergence = 4,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    /// Names the file a parse or row error came from.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ (Error::Parse { .. } | Error::Row { .. }) => Error::File { path: path.into(), source: Box::new(e) },
            other => other,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        use embridge_core::Error as C;
        let core = match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Usage(_) => return ExitCode::Input,
            Error::File { source, .. } => return source.exit_code(),
            Error::Row { source, .. } | Error::Core(source) => source,
        };
        match core {
            C::NoConvergence { .. } => ExitCode::NoConvergence,
            C::DimensionMismatch { .. } | C::ShapeMismatch { .. } | C::ZeroRow(_) | C::ZeroVector | C::NonFinite => {
                ExitCode::Consistency
            }
            _ => ExitCode::Input,
        }
    }
}
