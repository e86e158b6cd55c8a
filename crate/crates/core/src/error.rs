use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("threshold k={k} out of range [{min}, {max}] for n={n}")]
    KOutOfRange {
        k: usize,
        n: usize,
        min: usize,
        max: usize,
    },

    #[error("estimate undefined: {0}")]
    Undefined(String),

    #[error("empty sample")]
    EmptySample,

    #[error("invalid model spec `{spec}`: field `{field}`: {reason}")]
    ModelSpec {
        spec: String,
        field: String,
        reason: String,
    },

    #[error("{path}: line {line}, field `{field}`: {reason}")]
    Parse {
        path: String,
        line: usize,
        field: String,
        reason: String,
    },

    #[error("degenerate null model: {0}")]
    DegenerateNull(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Checks `min <= k <= max`, reporting `n` for context.
pub(crate) fn check_k(k: usize, n: usize, min: usize, max: usize) -> Result<()> {
    if k < min || k > max {
        return Err(Error::KOutOfRange { k, n, min, max });
    }
    Ok(())
}
