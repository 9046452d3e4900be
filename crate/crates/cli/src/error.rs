use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit status: 1 configuration, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Numeric(_) => 2,
            Self::Io { .. } => 3,
        }
    }
}

impl From<tricrystal::Error> for CliError {
    fn from(e: tricrystal::Error) -> Self {
        use tricrystal::Error as E;
        match e {
            E::Configuration(m) => Self::Config(m),
            E::InvalidArgument(_) | E::OutOfRange(_) | E::Shape(_) => Self::Config(e.to_string()),
            E::Numeric(_) | E::Inconclusive(_) => Self::Numeric(e.to_string()),
        }
    }
}
