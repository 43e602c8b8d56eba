use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot parse {origin}: {msg}")]
    Parse { origin: String, msg: String },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("invalid `{key}`: {msg}")]
    Domain { key: String, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] ustash_core::Error),
}

impl HarnessError {
    /// Process exit status. Usage errors from the argument parser exit with 2.
    pub fn exit_code(&self) -> u8 {
        use ustash_core::Error as E;
        match self {
            HarnessError::Parse { .. } => 3,
            HarnessError::UnknownKey(_) => 4,
            HarnessError::Domain { .. } => 5,
            HarnessError::Io { .. } => 6,
            HarnessError::Core(e) => match e {
                E::Csv(_) | E::Json(_) => 3,
                E::Io(_) => 6,
                E::Domain { .. } | E::Unit(_) | E::UnknownContent(_) | E::UnknownStrategy(_) | E::UnknownScenario(_) => 5,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
