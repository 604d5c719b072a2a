//! Change-of-variables identity for the reflection extension.
//!
//! Summing a pairwise distance of the extension over an extended cylinder is
//! the same as summing over base cells weighted by fold multiplicities: each
//! extended index (t, x, y) contributes the base term at its folded image, so
//! grouping by image gives
//!
//! sum_{t,x,y in Q} dist(ahat(t,x), ahat(t,y))
//!   = sum_{t1, x1, y1 base} dist(a(t1,x1), a(t1,y1))
//!       * sigma_T(t1) * sigma_X(x1) * sigma_X(y1)
//!
//! with sigma_T the temporal window multiplicity and sigma_X the product of
//! per-axis spatial multiplicities. The identity is combinatorially exact;
//! the two evaluations below differ only by floating-point summation order.

use crate::error::Result;
use crate::field::{Field, ValueKind};
use crate::grid::{for_each_multi_index, GridSpec, ParabolicCylinder, MAX_DIM};
use crate::mad::{channel_weights, dist_frobenius, dist_l1};
use crate::seminorm::MatrixNorm;
use crate::sigma::axis_multiplicities;

#[derive(Debug, Clone, Copy)]
pub struct AreaCheck {
    /// Direct sum over the extended cylinder.
    pub lhs: f64,
    /// Multiplicity-weighted sum over base cells.
    pub rhs: f64,
    pub abs_diff: f64,
    /// |lhs - rhs| <= 1e-10 (1 + |lhs|).
    pub pass: bool,
}

fn record_dist(field: &Field, norm: MatrixNorm, chw: &[f64], i: usize, j: usize) -> f64 {
    match (field.kind(), norm) {
        (ValueKind::Scalar, _) => (field.record(i)[0] - field.record(j)[0]).abs(),
        (ValueKind::Matrix, MatrixNorm::L1) => dist_l1(field.record(i), field.record(j), chw),
        (ValueKind::Matrix, MatrixNorm::Frobenius) => {
            dist_frobenius(field.record(i), field.record(j), chw)
        }
    }
}

/// Product of per-axis multiplicities for every base spatial cell, in flat
/// spatial-index order.
fn spatial_multiplicities(spec: &GridSpec, cyl: &ParabolicCylinder) -> Vec<f64> {
    let (n, d) = (spec.n(), spec.d());
    let per_axis: Vec<Vec<usize>> = (0..d)
        .map(|ax| axis_multiplicities(cyl.x0[ax], cyl.k, n))
        .collect();
    let mut out = Vec::with_capacity(spec.spatial_cells());
    for_each_multi_index(n, d, |x| {
        let sigma: usize = x
            .iter()
            .enumerate()
            .map(|(ax, &xi)| per_axis[ax][xi])
            .product();
        out.push(sigma as f64);
    });
    out
}

/// Evaluate both sides of the identity for one extended cylinder.
///
/// The left side walks all k^2 * k^{2d} index triples of the cylinder, so
/// this is meant for moderate cylinder sizes.
pub fn area_check(field: &Field, cyl: &ParabolicCylinder, norm: MatrixNorm) -> Result<AreaCheck> {
    let spec = field.spec();
    let d = spec.d();
    let chw = channel_weights(d);
    let m = cyl.k.pow(d as u32);
    let l = cyl.t_cells();

    // Left side: direct sum through the extension.
    let mut cells: Vec<usize> = Vec::with_capacity(m);
    let mut lhs = 0.0;
    for dt in 0..l {
        let t = cyl.t0 + dt as i64;
        cells.clear();
        for_each_multi_index(cyl.k, d, |off| {
            let mut x = [0i64; MAX_DIM];
            for ax in 0..d {
                x[ax] = cyl.x0[ax] + off[ax] as i64;
            }
            cells.push(field.cell_ext(t, &x[..d]));
        });
        for &ci in &cells {
            for &cj in &cells {
                lhs += record_dist(field, norm, &chw, ci, cj);
            }
        }
    }

    // Right side: base cells weighted by fold multiplicities. Only the
    // support (positive multiplicity) participates.
    let sigma_t = axis_multiplicities(cyl.t0, l, spec.n_t());
    let sigma_x = spatial_multiplicities(spec, cyl);
    let support: Vec<(usize, f64)> = sigma_x
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(i, &s)| (i, s))
        .collect();
    let mut rhs = 0.0;
    for (t1, &st) in sigma_t.iter().enumerate() {
        if st == 0 {
            continue;
        }
        let base = t1 * spec.spatial_cells();
        let mut slice_sum = 0.0;
        for &(xi, sx) in &support {
            for &(yi, sy) in &support {
                slice_sum += record_dist(field, norm, &chw, base + xi, base + yi) * sx * sy;
            }
        }
        rhs += st as f64 * slice_sum;
    }

    let abs_diff = (lhs - rhs).abs();
    Ok(AreaCheck {
        lhs,
        rhs,
        abs_diff,
        pass: abs_diff <= 1e-10 * (1.0 + lhs.abs()),
    })
}
