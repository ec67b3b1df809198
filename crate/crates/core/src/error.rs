use std::path::PathBuf;

/// Errors produced by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed data file.
    #[error("load error: {0}")]
    Load(String),
    /// The distribution matcher ran out of input bits.
    #[error("matcher underflow: needed {needed} info bits, {available} available")]
    Underflow { needed: usize, available: usize },
    /// A received word is not a valid matcher codeword.
    #[error("decode error: {0}")]
    Decode(String),
    /// Two numerical routes disagreed beyond tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The parameter optimiser could not satisfy the request.
    #[error("optimization error: {0}")]
    Optimization(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
