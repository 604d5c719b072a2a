//! Batch verification of the extension bounds over a manifest of generated
//! fields.
//!
//! A manifest is a small CSV (`d,n,kind,seed,rho_max`) naming fields to
//! synthesize; the corpus runner generates each one, verifies both extension
//! bounds, and emits one result row per manifest row, in manifest order. Rows
//! are independent and run in parallel; the output is deterministic for a
//! given manifest.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::generate::{generate, GeneratorKind};
use crate::grid::GridSpec;
use crate::seminorm::MatrixNorm;
use crate::verify::{verify_bounds, BoundReport};

pub const MANIFEST_HEADER: &str = "d,n,kind,seed,rho_max";
pub const RESULT_HEADER: &str =
    "d,n,generator,seed,base,ext,ratio,constant,small_rho_ratio,small_rho_constant,pass";

/// Fields generated for the corpus carry this band parameter; it only
/// matters for the SPD generator.
pub const CORPUS_DELTA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifestRow {
    pub d: usize,
    pub n: usize,
    pub kind: GeneratorKind,
    pub seed: u64,
    pub rho_max: f64,
}

/// One verified corpus entry: the manifest coordinates plus the bound report.
#[derive(Debug, Clone)]
pub struct CorpusRow {
    pub kind: GeneratorKind,
    pub seed: u64,
    pub report: BoundReport,
}

/// The built-in corpus: d in {1, 2} x n in {4, 8, 16} x six scalar
/// generators x seeds 0..5, all at the default family cap rho_max = 4.
pub fn default_manifest() -> Vec<ManifestRow> {
    const KINDS: [GeneratorKind; 6] = [
        GeneratorKind::Constant,
        GeneratorKind::TimeOnly,
        GeneratorKind::LinearX,
        GeneratorKind::LogSingularity,
        GeneratorKind::Checkerboard,
        GeneratorKind::RandomPiecewise,
    ];
    let mut rows = Vec::with_capacity(180);
    for d in [1usize, 2] {
        for n in [4usize, 8, 16] {
            for kind in KINDS {
                for seed in 0..5u64 {
                    rows.push(ManifestRow {
                        d,
                        n,
                        kind,
                        seed,
                        rho_max: 4.0,
                    });
                }
            }
        }
    }
    rows
}

fn parse_field<T: std::str::FromStr>(raw: &str, line: usize, what: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::ManifestParse {
        line,
        msg: format!("bad {what}: {raw:?}"),
    })
}

/// Parse a manifest CSV. The header line is required unless the input is
/// entirely empty; an empty manifest is valid and yields no rows.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRow>> {
    let mut rows = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        None => return Ok(rows),
        Some((_, first)) if first.trim().is_empty() => return Ok(rows),
        Some((i, first)) => {
            if first.trim() != MANIFEST_HEADER {
                return Err(Error::ManifestParse {
                    line: i + 1,
                    msg: format!("expected header {MANIFEST_HEADER:?}, got {first:?}"),
                });
            }
        }
    }
    for (i, raw) in lines {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parts: Vec<&str> = trimmed.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::ManifestParse {
                line,
                msg: format!("expected 5 comma-separated fields, got {}", parts.len()),
            });
        }
        rows.push(ManifestRow {
            d: parse_field(parts[0], line, "dimension")?,
            n: parse_field(parts[1], line, "grid size")?,
            kind: parse_field::<GeneratorKind>(parts[2], line, "generator")?,
            seed: parse_field(parts[3], line, "seed")?,
            rho_max: parse_field(parts[4], line, "rho_max")?,
        });
    }
    Ok(rows)
}

/// Serialize rows back to the manifest format.
pub fn manifest_to_csv(rows: &[ManifestRow]) -> String {
    let mut out = String::from(MANIFEST_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.d, r.n, r.kind, r.seed, r.rho_max);
    }
    out
}

fn run_row(row: &ManifestRow) -> Result<CorpusRow> {
    let spec = GridSpec::new(row.d, row.n)?;
    let field: Field = generate(&spec, row.kind, row.seed, CORPUS_DELTA)?;
    let report = verify_bounds(&field, row.rho_max, MatrixNorm::L1)?;
    Ok(CorpusRow {
        kind: row.kind,
        seed: row.seed,
        report,
    })
}

/// Verify every manifest row. Rows run in parallel; results come back in
/// manifest order. `progress` is invoked with the number of completed rows
/// each time one finishes (from worker threads, in completion order).
pub fn run_corpus(
    rows: &[ManifestRow],
    progress: impl Fn(usize, usize) + Sync,
) -> Result<Vec<CorpusRow>> {
    let done = AtomicUsize::new(0);
    let total = rows.len();
    rows.par_iter()
        .map(|row| {
            let out = run_row(row);
            let completed = done.fetch_add(1, Ordering::Relaxed) + 1;
            progress(completed, total);
            out
        })
        .collect()
}

/// True when every row satisfied both bounds.
pub fn all_pass(rows: &[CorpusRow]) -> bool {
    rows.iter().all(|r| r.report.pass)
}

/// Serialize corpus results as CSV, one row per field, manifest order.
pub fn corpus_to_csv(rows: &[CorpusRow]) -> String {
    let mut out = String::from(RESULT_HEADER);
    out.push('\n');
    for r in rows {
        let b = &r.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            b.d,
            b.n,
            r.kind,
            r.seed,
            b.base,
            b.ext,
            b.ratio,
            b.constant,
            b.small_rho_ratio,
            b.small_rho_constant,
            b.pass
        );
    }
    out
}
