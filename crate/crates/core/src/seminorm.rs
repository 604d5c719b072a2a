//! The parabolic BMO-in-x seminorm of a sampled field.
//!
//! For a grid-aligned parabolic cylinder Q of spatial side rho = k h (and thus
//! temporal extent k^2 cells), the oscillation of `a` over Q is the time
//! average, over the k^2 slices of Q, of the spatial mean absolute difference
//! of the k^d values in that slice. The seminorm is the supremum of this
//! oscillation over an admissible family of cylinders:
//!
//! * base access: cylinders inside the unit box with rho <= min(rho0, 1);
//! * extended access: cylinders anywhere in R^{d+1} with
//!   rho <= min(rho0, rho_max), evaluated through the reflection extension.
//!   Positions are enumerated over one full period (2 n^2 temporal cells,
//!   2 n cells per spatial axis); every other position repeats one of these.
//!
//! Two kernels compute the same supremum. [`seminorm`] sorts each time slice
//! once, then evaluates every window of every size against that shared order
//! with per-axis reflection-multiplicity weights and the sorted-gap form of
//! the mean absolute difference; temporal averaging is a prefix-sum over the
//! periodic slice-oscillation sequence. [`seminorm_brute`] re-derives every
//! cylinder average from scratch with the O(m^2) double sum and serves as the
//! oracle the fast kernel is tested against.
//!
//! Ties in the supremum are broken toward the smallest (k, t0, x0) in
//! lexicographic order, independent of evaluation order or thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, ValueKind};
use crate::grid::{for_each_multi_index, reflect_index, GridSpec, ParabolicCylinder, MAX_DIM};
use crate::mad::{channel_weights, dist_frobenius, dist_l1, mad_direct_by, weighted_mad_sorted};

/// Which cylinder family the supremum runs over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccessMode {
    /// Cylinders contained in the base box.
    Base,
    /// Cylinders anywhere, with spatial side up to `rho_max`, read through
    /// the reflection extension.
    Extended { rho_max: f64 },
}

/// Distance between matrix records; ignored for scalar fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixNorm {
    /// Entrywise L1 over the full matrix. Separable per component, so the
    /// fast kernel applies.
    L1,
    /// Frobenius norm. Not separable; always evaluated by the direct kernel.
    Frobenius,
}

#[derive(Debug, Clone, Copy)]
pub struct SeminormOptions {
    pub access: AccessMode,
    /// Only cylinders with rho <= rho0 are admissible.
    pub rho0: f64,
    pub norm: MatrixNorm,
}

impl SeminormOptions {
    /// Base access over all cylinder sizes that fit the box.
    pub fn base() -> Self {
        SeminormOptions {
            access: AccessMode::Base,
            rho0: 1.0,
            norm: MatrixNorm::L1,
        }
    }

    /// Extended access with sides up to `rho_max`.
    pub fn extended(rho_max: f64) -> Self {
        SeminormOptions {
            access: AccessMode::Extended { rho_max },
            rho0: rho_max,
            norm: MatrixNorm::L1,
        }
    }

    pub fn with_rho0(mut self, rho0: f64) -> Self {
        self.rho0 = rho0;
        self
    }

    pub fn with_norm(mut self, norm: MatrixNorm) -> Self {
        self.norm = norm;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SeminormResult {
    /// The supremum.
    pub value: f64,
    /// The cylinder attaining it, smallest (k, t0, x0) on exact ties.
    ///
    /// Ties are resolved within one kernel's arithmetic. The fast and direct
    /// kernels accumulate in different orders, so among cylinders whose
    /// oscillations agree only to rounding they may settle on different
    /// representatives; each argmax still attains the maximum to within the
    /// evaluation tolerance of either kernel.
    pub argmax: ParabolicCylinder,
    /// Largest admissible side in cells.
    pub k_max: usize,
}

/// Supremum of the oscillation over cylinders of side exactly k h, plus the
/// running supremum over sides <= k h (the modulus proper).
#[derive(Debug, Clone, Copy)]
pub struct ModulusPoint {
    pub k: usize,
    pub rho: f64,
    pub sup_at_k: f64,
    pub sup_cum: f64,
}

// ---------------------------------------------------------------------------
// Cylinder family
// ---------------------------------------------------------------------------

/// The admissible family shared by both kernels: sizes and position ranges.
struct Family {
    d: usize,
    n: usize,
    n_t: usize,
    k_max: usize,
    extended: bool,
}

impl Family {
    fn new(spec: &GridSpec, opts: &SeminormOptions) -> Result<Family> {
        let cap = match opts.access {
            AccessMode::Base => opts.rho0.min(1.0),
            AccessMode::Extended { rho_max } => opts.rho0.min(rho_max),
        };
        // Sides are k h <= cap; the slack absorbs decimal rho values like 0.3
        // that are meant to admit k = round(0.3 n).
        let k_max = (cap * spec.n() as f64 + 1e-9).floor();
        // Negated so a NaN cap (from a NaN rho0) lands in the error arm.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(k_max >= 1.0) {
            return Err(Error::NoAdmissibleCylinder {
                rho0: cap,
                h: spec.h(),
            });
        }
        Ok(Family {
            d: spec.d(),
            n: spec.n(),
            n_t: spec.n_t(),
            k_max: k_max as usize,
            extended: matches!(opts.access, AccessMode::Extended { .. }),
        })
    }

    /// Spatial positions along one axis (the definitional, full list).
    fn x_count(&self, k: usize) -> usize {
        if self.extended {
            2 * self.n
        } else {
            self.n - k + 1
        }
    }

    /// Temporal positions (full list).
    fn t_count(&self, k: usize) -> usize {
        if self.extended {
            2 * self.n_t
        } else {
            self.n_t - k * k + 1
        }
    }

    /// Spatial positions with mirror-image duplicates removed.
    ///
    /// In extended access the window starting at x0 and the one starting at
    /// (2n - k - x0) mod 2n read the same multiset of base cells (the
    /// reflection is symmetric under j -> 2n - 1 - j), so only the
    /// lexicographically smaller of each pair is scanned.
    fn x_canonical(&self, k: usize) -> Vec<usize> {
        if !self.extended {
            return (0..=self.n - k).collect();
        }
        let period = 2 * self.n as i64;
        (0..2 * self.n)
            .filter(|&x0| {
                let mirror = (period - k as i64 - x0 as i64).rem_euclid(period);
                (x0 as i64) <= mirror
            })
            .collect()
    }

    /// Temporal positions with mirror-image duplicates removed (same symmetry
    /// with period 2 n^2 and window length k^2).
    fn t_canonical(&self, k: usize) -> Vec<usize> {
        if !self.extended {
            return (0..self.t_count(k)).collect();
        }
        let period = 2 * self.n_t as i64;
        let l = (k * k) as i64;
        (0..2 * self.n_t)
            .filter(|&t0| {
                let mirror = (period - l - t0 as i64).rem_euclid(period);
                (t0 as i64) <= mirror
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Deterministic running maximum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    cyl: Option<ParabolicCylinder>,
}

impl Best {
    fn new() -> Self {
        Best {
            value: f64::NEG_INFINITY,
            cyl: None,
        }
    }

    fn consider(&mut self, value: f64, cyl: ParabolicCylinder) {
        let better = match &self.cyl {
            None => true,
            Some(c) => {
                value > self.value || (value == self.value && cyl.order_key() < c.order_key())
            }
        };
        if better {
            self.value = value;
            self.cyl = Some(cyl);
        }
    }

    fn merge(&mut self, other: &Best) {
        if let Some(c) = other.cyl {
            self.consider(other.value, c);
        }
    }
}

// ---------------------------------------------------------------------------
// Fast kernel
// ---------------------------------------------------------------------------

/// One time slice of one channel, sorted ascending by value.
struct SliceSorted {
    vals: Vec<f64>,
    coords: Vec<[u16; MAX_DIM]>,
}

/// Per-channel, per-slice sorted views plus the channel weights the slice
/// oscillation sums over (1.0 for scalar; matrix entry multiplicities for
/// entrywise-L1 matrix fields).
fn build_channels(field: &Field) -> (Vec<Vec<SliceSorted>>, Vec<f64>) {
    let spec = field.spec();
    let (n, d, n_t) = (spec.n(), spec.d(), spec.n_t());
    assert!(n <= u16::MAX as usize, "grid too fine for u16 coordinates");
    let m = spec.spatial_cells();
    let comps = field.comps();
    let chw = match field.kind() {
        ValueKind::Scalar => vec![1.0],
        ValueKind::Matrix => channel_weights(d),
    };

    let mut coords_all: Vec<[u16; MAX_DIM]> = Vec::with_capacity(m);
    for_each_multi_index(n, d, |x| {
        let mut c = [0u16; MAX_DIM];
        for (ax, &xi) in x.iter().enumerate() {
            c[ax] = xi as u16;
        }
        coords_all.push(c);
    });

    let channels: Vec<Vec<SliceSorted>> = (0..comps)
        .map(|ch| {
            (0..n_t)
                .map(|t| {
                    let slice = field.slice(t);
                    let mut idxs: Vec<u32> = (0..m as u32).collect();
                    idxs.sort_unstable_by(|&a, &b| {
                        slice[a as usize * comps + ch]
                            .total_cmp(&slice[b as usize * comps + ch])
                            .then(a.cmp(&b))
                    });
                    SliceSorted {
                        vals: idxs
                            .iter()
                            .map(|&i| slice[i as usize * comps + ch])
                            .collect(),
                        coords: idxs.iter().map(|&i| coords_all[i as usize]).collect(),
                    }
                })
                .collect()
        })
        .collect();
    (channels, chw)
}

/// Multiplicity table for windows of k cells along one axis: wt[x0 * n + c]
/// counts how many of the k window cells fold onto base cell c. Base access
/// uses the 0/1 inclusion table; extended access slides the count over the
/// 2n-periodic reflected index sequence.
fn axis_weight_table(n: usize, k: usize, fam: &Family, positions: &[usize]) -> Vec<f64> {
    let max_pos = positions.iter().copied().max().unwrap_or(0);
    let mut wt = vec![0.0; (max_pos + 1) * n];
    if !fam.extended {
        for &x0 in positions {
            for c in x0..x0 + k {
                wt[x0 * n + c] = 1.0;
            }
        }
        return wt;
    }
    // Counts for the window starting at 0, then slide one cell at a time.
    let mut cnt = vec![0.0f64; n];
    for j in 0..k {
        cnt[reflect_index(j as i64, n)] += 1.0;
    }
    let mut pos_iter = positions.iter().peekable();
    for x0 in 0..=max_pos {
        if pos_iter.peek() == Some(&&x0) {
            wt[x0 * n..(x0 + 1) * n].copy_from_slice(&cnt);
            pos_iter.next();
        }
        cnt[reflect_index(x0 as i64, n)] -= 1.0;
        cnt[reflect_index((x0 + k) as i64, n)] += 1.0;
    }
    wt
}

/// Slice oscillations for every canonical window of side k:
/// rows[t][w] = weighted MAD of slice t against window w.
fn spatial_table(
    channels: &[Vec<SliceSorted>],
    chw: &[f64],
    fam: &Family,
    k: usize,
    x_pos: &[usize],
    wt: &[f64],
) -> Vec<Vec<f64>> {
    let (n, d, n_t) = (fam.n, fam.d, fam.n_t);
    let n_pos = x_pos.len();
    let w_total = (k as f64).powi(d as i32);
    (0..n_t)
        .into_par_iter()
        .map(|t| {
            let mut row = vec![0.0; n_pos.pow(d as u32)];
            let mut widx = 0;
            for_each_multi_index(n_pos, d, |pi| {
                let mut total = 0.0;
                for (ch, &w_ch) in channels.iter().zip(chw) {
                    let ss = &ch[t];
                    let pairs = ss.vals.iter().zip(&ss.coords).filter_map(|(&v, c)| {
                        let mut w = wt[x_pos[pi[0]] * n + c[0] as usize];
                        if w == 0.0 {
                            return None;
                        }
                        for ax in 1..d {
                            let wa = wt[x_pos[pi[ax]] * n + c[ax] as usize];
                            if wa == 0.0 {
                                return None;
                            }
                            w *= wa;
                        }
                        Some((v, w))
                    });
                    total += w_ch * weighted_mad_sorted(pairs, w_total);
                }
                row[widx] = total;
                widx += 1;
            });
            row
        })
        .collect()
}

/// Time-average the slice oscillations over every admissible temporal window
/// and fold the results into the per-size best.
fn temporal_best(
    rows: &[Vec<f64>],
    fam: &Family,
    k: usize,
    x_pos: &[usize],
    t_pos: &[usize],
) -> Best {
    let (d, n_t) = (fam.d, fam.n_t);
    let l = k * k;
    let n_pos = x_pos.len();
    let mut best = Best::new();

    // Window spatial offsets, in the same order as the spatial table rows.
    let mut offsets: Vec<[i64; MAX_DIM]> = Vec::with_capacity(n_pos.pow(d as u32));
    for_each_multi_index(n_pos, d, |pi| {
        let mut x0 = [0i64; MAX_DIM];
        for ax in 0..d {
            x0[ax] = x_pos[pi[ax]] as i64;
        }
        offsets.push(x0);
    });

    if !fam.extended {
        let mut prefix = vec![0.0; n_t + 1];
        for (widx, x0) in offsets.iter().enumerate() {
            for t in 0..n_t {
                prefix[t + 1] = prefix[t] + rows[t][widx];
            }
            for &t0 in t_pos {
                let osc = (prefix[t0 + l] - prefix[t0]) / l as f64;
                best.consider(osc, ParabolicCylinder::new(t0 as i64, &x0[..d], k));
            }
        }
        return best;
    }

    // Extended: the slice-oscillation sequence is 2 n^2-periodic in t via the
    // temporal reflection; a window of l cells covers q whole periods plus a
    // partial stretch handled by a two-period prefix sum.
    let period = 2 * n_t;
    let q = (l / period) as f64;
    let r = l % period;
    let mut prefix = vec![0.0; 2 * period + 1];
    for (widx, x0) in offsets.iter().enumerate() {
        for t in 0..2 * period {
            prefix[t + 1] = prefix[t] + rows[reflect_index(t as i64, n_t)][widx];
        }
        let full = prefix[period];
        for &t0 in t_pos {
            let osc = (q * full + prefix[t0 + r] - prefix[t0]) / l as f64;
            best.consider(osc, ParabolicCylinder::new(t0 as i64, &x0[..d], k));
        }
    }
    best
}

fn scan_fast(field: &Field, opts: &SeminormOptions) -> Result<Vec<Best>> {
    let fam = Family::new(field.spec(), opts)?;
    let (channels, chw) = build_channels(field);
    let mut per_k = Vec::with_capacity(fam.k_max);
    for k in 1..=fam.k_max {
        let x_pos = fam.x_canonical(k);
        let t_pos = fam.t_canonical(k);
        let wt = axis_weight_table(fam.n, k, &fam, &x_pos);
        let rows = spatial_table(&channels, &chw, &fam, k, &x_pos, &wt);
        per_k.push(temporal_best(&rows, &fam, k, &x_pos, &t_pos));
    }
    Ok(per_k)
}

// ---------------------------------------------------------------------------
// Direct kernel (oracle)
// ---------------------------------------------------------------------------

/// Mean oscillation of a single cylinder, evaluated directly: every slice is
/// gathered cell by cell (through the reflection for extended access) and
/// reduced with the O(m^2) double sum.
pub fn cylinder_oscillation(
    field: &Field,
    cyl: &ParabolicCylinder,
    extended: bool,
    norm: MatrixNorm,
) -> Result<f64> {
    let spec = field.spec();
    let d = spec.d();
    if !extended && !cyl.fits_base(spec) {
        return Err(Error::CylinderOutOfRange {
            t0: cyl.t0,
            x0: cyl.x0[..d].to_vec(),
            k: cyl.k,
        });
    }
    let l = cyl.t_cells();
    let m = cyl.k.pow(d as u32);
    let chw = channel_weights(d);
    let mut cells: Vec<usize> = Vec::with_capacity(m);
    let mut acc = 0.0;
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
        let slice_mad = match (field.kind(), norm) {
            (ValueKind::Scalar, _) => mad_direct_by(m, |i, j| {
                (field.record(cells[i])[0] - field.record(cells[j])[0]).abs()
            }),
            (ValueKind::Matrix, MatrixNorm::L1) => mad_direct_by(m, |i, j| {
                dist_l1(field.record(cells[i]), field.record(cells[j]), &chw)
            }),
            (ValueKind::Matrix, MatrixNorm::Frobenius) => mad_direct_by(m, |i, j| {
                dist_frobenius(field.record(cells[i]), field.record(cells[j]), &chw)
            }),
        };
        acc += slice_mad;
    }
    Ok(acc / l as f64)
}

fn scan_brute(field: &Field, opts: &SeminormOptions) -> Result<Vec<Best>> {
    let fam = Family::new(field.spec(), opts)?;
    let d = fam.d;
    let mut per_k = Vec::with_capacity(fam.k_max);
    for k in 1..=fam.k_max {
        let mut best = Best::new();
        let xc = fam.x_count(k);
        for t0 in 0..fam.t_count(k) {
            let mut err = None;
            for_each_multi_index(xc, d, |x0| {
                if err.is_some() {
                    return;
                }
                let mut xi = [0i64; MAX_DIM];
                for ax in 0..d {
                    xi[ax] = x0[ax] as i64;
                }
                let cyl = ParabolicCylinder::new(t0 as i64, &xi[..d], k);
                match cylinder_oscillation(field, &cyl, fam.extended, opts.norm) {
                    Ok(v) => best.consider(v, cyl),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        per_k.push(best);
    }
    Ok(per_k)
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

fn fold(per_k: Vec<Best>) -> SeminormResult {
    let k_max = per_k.len();
    let mut best = Best::new();
    for b in &per_k {
        best.merge(b);
    }
    SeminormResult {
        value: best.value,
        argmax: best.cyl.expect("admissible family is nonempty"),
        k_max,
    }
}

/// Seminorm via the fast kernel. Matrix fields under the Frobenius norm are
/// not component-separable and fall back to the direct kernel.
pub fn seminorm(field: &Field, opts: &SeminormOptions) -> Result<SeminormResult> {
    let per_k = if field.kind() == ValueKind::Matrix && opts.norm == MatrixNorm::Frobenius {
        scan_brute(field, opts)?
    } else {
        scan_fast(field, opts)?
    };
    Ok(fold(per_k))
}

/// Seminorm via the direct kernel only. Cost grows like the sixth power of
/// the grid size; intended for validation on small grids.
pub fn seminorm_brute(field: &Field, opts: &SeminormOptions) -> Result<SeminormResult> {
    Ok(fold(scan_brute(field, opts)?))
}

fn to_points(per_k: &[Best], h: f64) -> Vec<ModulusPoint> {
    let mut cum = f64::NEG_INFINITY;
    per_k
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let k = i + 1;
            cum = cum.max(b.value);
            ModulusPoint {
                k,
                rho: k as f64 * h,
                sup_at_k: b.value,
                sup_cum: cum,
            }
        })
        .collect()
}

/// One scan yielding both the seminorm (with argmax) and the per-size
/// modulus; cheaper than calling [`seminorm`] and [`modulus`] separately.
pub fn seminorm_with_modulus(
    field: &Field,
    opts: &SeminormOptions,
) -> Result<(SeminormResult, Vec<ModulusPoint>)> {
    let per_k = if field.kind() == ValueKind::Matrix && opts.norm == MatrixNorm::Frobenius {
        scan_brute(field, opts)?
    } else {
        scan_fast(field, opts)?
    };
    let pts = to_points(&per_k, field.spec().h());
    Ok((fold(per_k), pts))
}

/// Oscillation modulus: for each admissible k, the supremum over cylinders of
/// side exactly k h, plus the running supremum over sides <= k h.
pub fn modulus(field: &Field, opts: &SeminormOptions) -> Result<Vec<ModulusPoint>> {
    Ok(seminorm_with_modulus(field, opts)?.1)
}
