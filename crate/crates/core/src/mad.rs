//! Mean absolute difference of a value set under the uniform (or a weighted)
//! measure: MAD(v) = (1/m^2) sum_{i,j} |v_i - v_j|.
//!
//! This equals twice the mean deviation from the median-ish center and is the
//! per-slice oscillation statistic the seminorm averages in time. Two
//! evaluation routes are kept deliberately:
//!
//! * `mad_direct` / `mad_direct_by`: the O(m^2) double sum, used as the
//!   reference oracle in tests and in the brute-force seminorm.
//! * `mad` / `weighted_mad_sorted`: sort once, then accumulate sorted gaps.
//!   Each gap g_j between consecutive order statistics is crossed by exactly
//!   j(m-j) ordered pairs, so sum |v_i - v_j| = 2 sum_j g_j j (m-j). All terms
//!   are nonnegative products of exact integers and gaps, so a constant input
//!   gives exactly 0.0 with no cancellation.

use crate::error::{Error, Result};

/// MAD of one scalar slice: the checked public entry point. A single value
/// has deviation 0; an empty slice is an error.
pub fn slice_mad(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    Ok(mad(values))
}

/// MAD of a list of symmetric d x d matrices, each given as its upper
/// triangle (d(d+1)/2 components, row-major), under the entrywise-L1 matrix
/// norm. Equals the sum over full-matrix entries of the scalar MAD of that
/// entry, which is how it is computed: one scalar MAD per stored component,
/// weighted by the component's multiplicity in the full matrix.
pub fn matrix_mad(records: &[f64], d: usize) -> Result<f64> {
    let comps = d * (d + 1) / 2;
    if d == 0 || !records.len().is_multiple_of(comps) {
        return Err(Error::DimensionMismatch(records.len(), comps));
    }
    if records.is_empty() {
        return Err(Error::EmptyValues);
    }
    let m = records.len() / comps;
    let weights = channel_weights(d);
    let mut total = 0.0;
    let mut channel = Vec::with_capacity(m);
    for (c, &w) in weights.iter().enumerate() {
        channel.clear();
        channel.extend((0..m).map(|r| records[r * comps + c]));
        total += w * mad(&channel);
    }
    Ok(total)
}

/// Direct O(m^2) double sum. Reference implementation.
pub fn mad_direct(values: &[f64]) -> f64 {
    mad_direct_by(values.len(), |i, j| (values[i] - values[j]).abs())
}

/// Direct double sum over an arbitrary pairwise distance.
pub fn mad_direct_by(m: usize, dist: impl Fn(usize, usize) -> f64) -> f64 {
    if m <= 1 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            s += dist(i, j);
        }
    }
    2.0 * s / (m as f64 * m as f64)
}

/// MAD via sorting and the gap form. Exact zero on constant input.
pub fn mad(values: &[f64]) -> f64 {
    let m = values.len();
    if m <= 1 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mf = m as f64;
    let mut s = 0.0;
    for j in 1..m {
        let gap = sorted[j] - sorted[j - 1];
        s += gap * (j as f64) * (mf - j as f64);
    }
    2.0 * s / (mf * mf)
}

/// Weighted MAD from (value, weight) pairs visited in nondecreasing value
/// order, with the total weight supplied by the caller.
///
/// MAD_w = (1/W^2) sum w_i w_j |v_i - v_j| = (2/W^2) sum_gaps g_j U_j (W - U_j)
/// where U_j is the weight accumulated strictly below the gap. Weights must be
/// nonnegative and sum to `total_weight`; in the seminorm kernel they are
/// small integers and W is the window volume, so every factor is exact.
pub fn weighted_mad_sorted(pairs: impl Iterator<Item = (f64, f64)>, total_weight: f64) -> f64 {
    let mut s = 0.0;
    let mut acc = 0.0; // weight below the current gap
    let mut prev = f64::NEG_INFINITY;
    for (v, w) in pairs {
        debug_assert!(v >= prev, "pairs must be sorted by value");
        if acc > 0.0 {
            s += (v - prev) * acc * (total_weight - acc);
        }
        acc += w;
        prev = v;
    }
    debug_assert!(acc == total_weight || total_weight == 0.0);
    if total_weight == 0.0 {
        0.0
    } else {
        2.0 * s / (total_weight * total_weight)
    }
}

/// Multiplicity of each upper-triangle component in the full matrix:
/// 1 on the diagonal, 2 off it (row-major upper-triangle order).
pub fn channel_weights(d: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(d * (d + 1) / 2);
    for row in 0..d {
        for col in row..d {
            w.push(if row == col { 1.0 } else { 2.0 });
        }
    }
    w
}

/// Entrywise L1 distance between two symmetric matrices given as upper
/// triangles: sum over the full matrix of |a_pq - b_pq|.
pub fn dist_l1(a: &[f64], b: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    debug_assert_eq!(a.len(), weights.len());
    a.iter()
        .zip(b)
        .zip(weights)
        .map(|((&x, &y), &w)| w * (x - y).abs())
        .sum()
}

/// Frobenius distance between two symmetric matrices given as upper triangles.
pub fn dist_frobenius(a: &[f64], b: &[f64], weights: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(weights)
        .map(|((&x, &y), &w)| w * (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
