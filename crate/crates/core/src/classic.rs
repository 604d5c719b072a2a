//! Consistency with the classic (time-independent) case.
//!
//! When a field does not depend on time, every slice of a parabolic cylinder
//! contributes the same spatial mean absolute deviation, so the time average
//! collapses and the parabolic seminorm reduces to the classic BMO supremum
//! over spatial cubes. The check below computes both sides — the parabolic
//! value through the production scan, the cubic value through an independent
//! direct double sum over cube windows — and demands agreement to within
//! `1e-12 * (1 + value)`.

use crate::error::{Error, Result};
use crate::field::{Field, ValueKind};
use crate::grid::for_each_multi_index;
use crate::mad::{channel_weights, dist_frobenius, dist_l1, mad_direct_by};
use crate::seminorm::{seminorm, MatrixNorm, SeminormOptions};

/// Verify the field is constant along time: every slice equals slice 0
/// bitwise. Returns the first differing slice index otherwise.
pub fn check_time_independent(field: &Field) -> Result<()> {
    let first = field.slice(0);
    for t in 1..field.spec().n_t() {
        if field.slice(t) != first {
            return Err(Error::TimeDependent { slice: t });
        }
    }
    Ok(())
}

/// Classic BMO supremum of slice 0: the largest mean absolute deviation over
/// spatial cube windows of side `k` cells, `1 <= k <= n`, at every offset
/// inside the base grid. Computed by the direct double sum, independently of
/// the sorted-gap seminorm kernel.
pub fn cubic_bmo_sup(field: &Field, norm: MatrixNorm) -> f64 {
    let spec = field.spec();
    let (d, n) = (spec.d(), spec.n());
    let comps = field.comps();
    let slice = field.slice(0);
    let w = channel_weights(d);
    let dist = |a: &[f64], b: &[f64]| match (field.kind(), norm) {
        (ValueKind::Scalar, _) => (a[0] - b[0]).abs(),
        (ValueKind::Matrix, MatrixNorm::L1) => dist_l1(a, b, &w),
        (ValueKind::Matrix, MatrixNorm::Frobenius) => dist_frobenius(a, b, &w),
    };

    let mut sup = 0.0f64;
    let mut cells: Vec<usize> = Vec::new();
    for k in 1..=n {
        for_each_multi_index(n - k + 1, d, |x0| {
            cells.clear();
            for_each_multi_index(k, d, |dx| {
                let mut idx = 0usize;
                for axis in (0..d).rev() {
                    idx = idx * n + (x0[axis] + dx[axis]);
                }
                cells.push(idx);
            });
            let m = cells.len();
            let v = mad_direct_by(m, |i, j| {
                dist(
                    &slice[cells[i] * comps..(cells[i] + 1) * comps],
                    &slice[cells[j] * comps..(cells[j] + 1) * comps],
                )
            });
            if v > sup {
                sup = v;
            }
        });
    }
    sup
}

#[derive(Debug, Clone, Copy)]
pub struct ClassicReport {
    /// Parabolic seminorm in base mode with `rho0 = 1`.
    pub parabolic: f64,
    /// Classic BMO supremum over spatial cubes, computed directly.
    pub cubic: f64,
    pub abs_diff: f64,
    /// `abs_diff <= 1e-12 * (1 + cubic)`.
    pub pass: bool,
}

/// For a time-independent field, confirm the parabolic seminorm coincides
/// with the classic cubic BMO supremum. Errors if any slice differs from
/// slice 0.
pub fn classic_check(field: &Field, norm: MatrixNorm) -> Result<ClassicReport> {
    check_time_independent(field)?;
    let parabolic = seminorm(field, &SeminormOptions::base().with_norm(norm))?.value;
    let cubic = cubic_bmo_sup(field, norm);
    let abs_diff = (parabolic - cubic).abs();
    Ok(ClassicReport {
        parabolic,
        cubic,
        abs_diff,
        pass: abs_diff <= 1e-12 * (1.0 + cubic.abs()),
    })
}
