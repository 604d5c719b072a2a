//! PBMO container: a minimal binary format for grid-sampled fields.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size  content
//!      0     4  magic "PBMO"
//!      4     1  version, 0x01
//!      5     4  u32 d
//!      9     4  u32 n
//!     13     4  u32 value kind (0 scalar, 1 symmetric matrix)
//!     17     8  f64 delta (0 for scalar fields)
//!     25     -  n^2 * n^d records of comps f64 each, t-major, x^1 fastest
//! ```
//!
//! Matrix records store the upper triangle row-major, d(d+1)/2 values. The
//! payload order equals the in-memory order of [`Field`], so load and store
//! are single passes with no reshuffling.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Field, ValueKind};
use crate::grid::GridSpec;

const MAGIC: &[u8; 4] = b"PBMO";
const VERSION: u8 = 0x01;
const HEADER_LEN: usize = 25;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Serialize a field to PBMO bytes.
pub fn to_bytes(field: &Field) -> Vec<u8> {
    let spec = field.spec();
    let mut buf = Vec::with_capacity(HEADER_LEN + field.data().len() * 8);
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    buf.extend_from_slice(&(spec.d() as u32).to_le_bytes());
    buf.extend_from_slice(&(spec.n() as u32).to_le_bytes());
    buf.extend_from_slice(&field.kind().code().to_le_bytes());
    buf.extend_from_slice(&field.delta().to_le_bytes());
    for v in field.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

/// Parse a field from PBMO bytes; `path` is only used in error messages.
pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Field> {
    let p = || path.to_path_buf();
    if bytes.len() < 5 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic { path: p() });
    }
    if bytes[4] != VERSION {
        return Err(Error::VersionMismatch {
            path: p(),
            version: bytes[4],
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            path: p(),
            expected: HEADER_LEN - 5,
            got: bytes.len() - 5,
        });
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let d = u32_at(5) as usize;
    let n = u32_at(9) as usize;
    let kind_code = u32_at(13);
    let delta = f64::from_le_bytes(bytes[17..25].try_into().unwrap());

    let spec = GridSpec::new(d, n)?;
    let kind = ValueKind::from_code(kind_code).ok_or(Error::BadValueKind {
        path: p(),
        kind: kind_code,
    })?;
    let comps = kind.comps(d);
    let expected = spec.cells() * comps * 8;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() < expected {
        return Err(Error::Truncated {
            path: p(),
            expected,
            got: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::TrailingData {
            path: p(),
            extra: payload.len() - expected,
        });
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinitePayload {
            path: p(),
            index: idx / comps,
        });
    }
    match kind {
        ValueKind::Scalar => Field::scalar(spec, values),
        ValueKind::Matrix => Field::matrix(spec, delta, values),
    }
}

/// Write a field to a PBMO file.
pub fn write_field(path: impl AsRef<Path>, field: &Field) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_bytes(field)).map_err(|e| io_err(path, e))
}

/// Read a field from a PBMO file.
pub fn read_field(path: impl AsRef<Path>) -> Result<Field> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    from_bytes(&bytes, path)
}
