use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by grid construction, field validation, file I/O and the
/// seminorm/verification operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: need 1 <= d <= 3 and n >= 2, got d={d}, n={n}")]
    InvalidGrid { d: usize, n: usize },

    #[error("value buffer has {got} entries, grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    #[error("delta must lie in (0, 1], got {0}")]
    BadDelta(f64),

    #[error("empty value set")]
    EmptyValues,

    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("cylinder (t0={t0}, x0={x0:?}, k={k}) does not fit the base box in base access mode")]
    CylinderOutOfRange { t0: i64, x0: Vec<i64>, k: usize },

    #[error("no admissible cylinder: rho0={rho0} is below the grid step h={h}")]
    NoAdmissibleCylinder { rho0: f64, h: f64 },

    #[error("extended value disagrees with base lookup at t={t}, x={x:?}")]
    RestrictionViolated { t: usize, x: Vec<usize> },

    #[error("field depends on t: slice {slice} differs from slice 0")]
    TimeDependent { slice: usize },

    #[error("unknown generator kind {0:?}")]
    UnknownGenerator(String),

    #[error("invalid generator parameter: {0}")]
    BadGeneratorParam(String),

    #[error("manifest line {line}: {msg}")]
    ManifestParse { line: usize, msg: String },

    // PBMO file format errors, each distinct so callers can tell a corrupt
    // header from a short payload.
    #[error("{path}: bad magic, not a PBMO file")]
    BadMagic { path: PathBuf },

    #[error("{path}: unsupported PBMO version {version}")]
    VersionMismatch { path: PathBuf, version: u8 },

    #[error("{path}: truncated payload, expected {expected} bytes after the header, got {got}")]
    Truncated {
        path: PathBuf,
        expected: usize,
        got: usize,
    },

    #[error("{path}: {extra} trailing bytes after the payload")]
    TrailingData { path: PathBuf, extra: usize },

    #[error("{path}: non-finite value in record {index}")]
    NonFinitePayload { path: PathBuf, index: usize },

    #[error("{path}: invalid value kind {kind}")]
    BadValueKind { path: PathBuf, kind: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
