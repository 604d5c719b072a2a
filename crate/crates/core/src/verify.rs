//! Numerical verification of the extension inequalities.
//!
//! For a field a on the base box, with ahat its reflection extension:
//!
//! * global bound: the extended seminorm over cylinders of side up to
//!   rho_max is at most 3^(2 + 2d) times the base seminorm;
//! * small-cylinder bound: restricted to extended cylinders of side at most
//!   1 (the box size), the constant sharpens to 2^(2d + 1);
//! * propagation: size by size, the extended modulus of oscillation is at
//!   most 2^(2d + 1) times the base modulus at the same size, so vanishing
//!   base oscillation is inherited by the extension.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{for_each_multi_index, ParabolicCylinder, MAX_DIM};
use crate::seminorm::{seminorm, seminorm_with_modulus, MatrixNorm, SeminormOptions};

/// 3^(2 + 2d): the global extension constant.
pub fn extension_constant(d: usize) -> f64 {
    3f64.powi(2 + 2 * d as i32)
}

/// 2^(2d + 1): the small-cylinder constant.
pub fn small_cylinder_constant(d: usize) -> f64 {
    2f64.powi(2 * d as i32 + 1)
}

/// Slack granted on the bound ratios: the inequalities are strict in exact
/// arithmetic, so anything beyond constant + SLACK is a genuine failure.
pub const BOUND_SLACK: f64 = 1e-9;

/// A base seminorm at or below this is treated as exactly zero: ratios are
/// not formed and the bounds demand a zero extension instead.
pub const DEGENERATE_BASE: f64 = 1e-14;

/// Comparison tolerance for modulus comparisons: 1e-12 (1 + reference).
fn bound_tol(reference: f64) -> f64 {
    1e-12 * (1.0 + reference)
}

/// Confirm the extension restricts to the field on the base box: every base
/// cell must fold to itself. Index-level identity, hence bitwise on values.
pub fn check_restriction(field: &Field) -> Result<()> {
    let spec = field.spec();
    let (d, n) = (spec.d(), spec.n());
    for t in 0..spec.n_t() {
        let mut bad: Option<Vec<usize>> = None;
        for_each_multi_index(n, d, |x| {
            if bad.is_some() {
                return;
            }
            let mut xi = [0i64; MAX_DIM];
            for ax in 0..d {
                xi[ax] = x[ax] as i64;
            }
            if field.cell_ext(t as i64, &xi[..d]) != spec.flat_index(t, x) {
                bad = Some(x.to_vec());
            }
        });
        if let Some(x) = bad {
            return Err(Error::RestrictionViolated { t, x });
        }
    }
    Ok(())
}

/// Both extension bounds evaluated on one field.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub d: usize,
    pub n: usize,
    /// Base seminorm (cylinders inside the box).
    pub base: f64,
    /// Extended seminorm over sides up to rho_max.
    pub ext: f64,
    /// Extended supremum restricted to sides <= 1.
    pub small_rho: f64,
    /// ext / base, or 0 when the base is degenerate.
    pub ratio: f64,
    pub constant: f64,
    pub small_rho_ratio: f64,
    pub small_rho_constant: f64,
    /// base <= DEGENERATE_BASE: both sides must vanish, no ratios formed.
    pub degenerate: bool,
    pub base_argmax: ParabolicCylinder,
    pub ext_argmax: ParabolicCylinder,
    pub pass: bool,
}

/// Measure base and extended seminorms and check both bounds. Also asserts
/// the extension restricts to the field on the base box.
pub fn verify_bounds(field: &Field, rho_max: f64, norm: MatrixNorm) -> Result<BoundReport> {
    let spec = field.spec();
    let (d, n) = (spec.d(), spec.n());
    check_restriction(field)?;

    let base = seminorm(field, &SeminormOptions::base().with_norm(norm))?;
    let (ext, pts) =
        seminorm_with_modulus(field, &SeminormOptions::extended(rho_max).with_norm(norm))?;
    // Supremum over extended cylinders with side <= 1: the running modulus at
    // k = n (or at the family cap when rho_max < 1).
    let small_idx = n.min(pts.len()) - 1;
    let small_rho = pts[small_idx].sup_cum;

    let constant = extension_constant(d);
    let small_rho_constant = small_cylinder_constant(d);
    let degenerate = base.value <= DEGENERATE_BASE;
    let (ratio, small_rho_ratio, pass) = if degenerate {
        let pass = ext.value <= DEGENERATE_BASE && small_rho <= DEGENERATE_BASE;
        (0.0, 0.0, pass)
    } else {
        let r = ext.value / base.value;
        let sr = small_rho / base.value;
        let pass = r <= constant + BOUND_SLACK && sr <= small_rho_constant + BOUND_SLACK;
        (r, sr, pass)
    };

    Ok(BoundReport {
        d,
        n,
        base: base.value,
        ext: ext.value,
        small_rho,
        ratio,
        constant,
        small_rho_ratio,
        small_rho_constant,
        degenerate,
        base_argmax: base.argmax,
        ext_argmax: ext.argmax,
        pass,
    })
}

/// Modulus comparison at one cylinder size.
#[derive(Debug, Clone, Copy)]
pub struct PropagationPoint {
    pub k: usize,
    pub rho: f64,
    /// Base modulus: sup over base cylinders of side <= k h.
    pub base_sup: f64,
    /// Extended modulus over the same sizes.
    pub ext_sup: f64,
}

#[derive(Debug, Clone)]
pub struct PropagationReport {
    pub constant: f64,
    pub points: Vec<PropagationPoint>,
    /// Largest value of ext_sup - constant * base_sup over all sizes.
    pub worst_excess: f64,
    pub pass: bool,
}

/// Size-by-size check that the extended modulus is controlled by the base
/// modulus with the small-cylinder constant. A field with vanishing base
/// oscillation at small scales therefore extends with vanishing oscillation.
pub fn propagation_check(field: &Field, norm: MatrixNorm) -> Result<PropagationReport> {
    let d = field.spec().d();
    let base_pts = crate::seminorm::modulus(field, &SeminormOptions::base().with_norm(norm))?;
    let ext_pts = crate::seminorm::modulus(field, &SeminormOptions::extended(1.0).with_norm(norm))?;
    debug_assert_eq!(base_pts.len(), ext_pts.len());

    let constant = small_cylinder_constant(d);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut pass = true;
    let points: Vec<PropagationPoint> = base_pts
        .iter()
        .zip(&ext_pts)
        .map(|(b, e)| {
            let excess = e.sup_cum - constant * b.sup_cum;
            worst_excess = worst_excess.max(excess);
            if excess > bound_tol(b.sup_cum) {
                pass = false;
            }
            PropagationPoint {
                k: b.k,
                rho: b.rho,
                base_sup: b.sup_cum,
                ext_sup: e.sup_cum,
            }
        })
        .collect();
    Ok(PropagationReport {
        constant,
        points,
        worst_excess,
        pass,
    })
}
