use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin label {0}: 2k must be a non-negative integer")]
    InvalidSpin(f64),

    #[error("spin triple has no exact representation")]
    InexactSpinTriple,

    #[error("spin triple violates the spin algebra: {0}")]
    SpinAlgebraViolation(String),

    #[error("wavevector must be nonzero and finite")]
    ZeroWaveVector,

    #[error("helicity {0} is not allowed here (expected +1 or -1)")]
    InvalidHelicity(i32),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("mode {index:?} is at or beyond the Nyquist limit of grid {dims:?}")]
    Aliased { index: [i64; 3], dims: [usize; 3] },

    #[error("phase advance per step {0:.6} rad is too large to resolve (must stay below pi)")]
    TemporalAliasing(f64),

    #[error("time step {dt} exceeds the leapfrog stability bound {bound}")]
    Unstable { dt: f64, bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("malformed snapshot {path}: {msg}")]
    Snapshot { path: PathBuf, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
