//! Preimage multiplicities of the reflection fold.
//!
//! An extended index window along one axis folds onto the base range [0, n);
//! the multiplicity of a base cell is how many window cells land on it. These
//! counts are the exact weights in the change-of-variables identity and obey
//! sharp a-priori bounds: a window of m or fewer periods-worth of cells hits
//! no cell more than m + 1 times, and for windows no longer than the axis
//! itself the count is at most 2.

use crate::grid::{GridSpec, ParabolicCylinder};
use crate::tent::preimage_count;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of integers j in [start, start + len) with j congruent to r mod p.
fn count_congruent(start: i64, len: i64, r: i64, p: i64) -> usize {
    debug_assert!(p > 0 && len >= 0);
    if len == 0 {
        return 0;
    }
    let first = start + (r - start).rem_euclid(p);
    if first < start + len {
        ((start + len - 1 - first) / p + 1) as usize
    } else {
        0
    }
}

/// Multiplicity of each base cell under the window [start, start + len) of
/// one folded axis with n base cells.
///
/// Cell c is hit by indices congruent to c or to 2n - 1 - c modulo 2n (the
/// ascending and descending passes of the fold), so each count is two
/// congruence counts; the result sums to `len`.
pub fn axis_multiplicities(start: i64, len: usize, n: usize) -> Vec<usize> {
    let p = 2 * n as i64;
    (0..n as i64)
        .map(|c| {
            count_congruent(start, len as i64, c, p)
                + count_congruent(start, len as i64, p - 1 - c, p)
        })
        .collect()
}

/// Sharp bound on any single multiplicity for a window of `len` cells on an
/// axis of `n` cells: ceil(len / n) + 1, and in particular 2 when len <= n.
pub fn multiplicity_bound(len: usize, n: usize) -> usize {
    len.div_ceil(n) + 1
}

/// Observed and bounded multiplicities for one extended cylinder.
#[derive(Debug, Clone)]
pub struct MultiplicityReport {
    /// Largest temporal multiplicity over base slices.
    pub temporal_max: usize,
    /// Bound ceil(k^2 / n^2) + 1; equals 2 for k <= n.
    pub temporal_bound: usize,
    /// Largest per-axis spatial multiplicity, one entry per axis.
    pub spatial_max: Vec<usize>,
    /// Bound ceil(k / n) + 1 for every axis; equals 2 for k <= n.
    pub spatial_bound: usize,
    pub pass: bool,
}

/// Count the fold multiplicities of `cyl`'s windows and compare against the
/// a-priori bounds.
pub fn multiplicity_report(spec: &GridSpec, cyl: &ParabolicCylinder) -> MultiplicityReport {
    let n = spec.n();
    let n_t = spec.n_t();
    let l = cyl.t_cells();

    let temporal = axis_multiplicities(cyl.t0, l, n_t);
    let temporal_max = temporal.into_iter().max().unwrap_or(0);
    let temporal_bound = multiplicity_bound(l, n_t);

    let spatial_bound = multiplicity_bound(cyl.k, n);
    let spatial_max: Vec<usize> = (0..spec.d())
        .map(|ax| {
            axis_multiplicities(cyl.x0[ax], cyl.k, n)
                .into_iter()
                .max()
                .unwrap_or(0)
        })
        .collect();

    let pass = temporal_max <= temporal_bound && spatial_max.iter().all(|&m| m <= spatial_bound);
    MultiplicityReport {
        temporal_max,
        temporal_bound,
        spatial_max,
        spatial_bound,
        pass,
    }
}

/// Continuous-scale analogue of [`MultiplicityReport`], produced by random
/// interval trials against the tent map itself.
#[derive(Debug, Clone, Copy)]
pub struct SigmaTrialReport {
    pub rho: f64,
    pub trials: usize,
    /// Largest preimage count seen in a temporal window of length rho^2.
    pub worst_temporal: usize,
    /// Largest preimage count seen in a spatial window of length rho.
    pub worst_spatial: usize,
    pub temporal_bound: usize,
    pub spatial_bound: usize,
    pub pass: bool,
}

/// A-priori preimage-count bounds for scale `rho`: both counts are at most 2
/// when `rho <= 1`; otherwise, with m = ceil(rho) so that rho is in
/// (m - 1, m], the window lengths rho^2 <= m^2 and rho <= m admit at most
/// m^2 + 1 and m + 1 preimages respectively.
pub fn sigma_trial_bounds(rho: f64) -> (usize, usize) {
    if rho <= 1.0 {
        (2, 2)
    } else {
        let m = rho.ceil() as usize;
        (m * m + 1, m + 1)
    }
}

/// Sample `trials` random (interval, target) pairs at scale `rho` — temporal
/// windows of length rho^2, spatial windows of length rho, offsets anywhere
/// in a few periods — and record the worst tent-map preimage counts against
/// the a-priori bounds.
pub fn sigma_bounds_check(rho: f64, trials: usize, seed: u64) -> SigmaTrialReport {
    debug_assert!(rho > 0.0, "scale must be positive");
    let (temporal_bound, spatial_bound) = sigma_trial_bounds(rho);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_temporal = 0usize;
    let mut worst_spatial = 0usize;
    for _ in 0..trials {
        let target: f64 = rng.random_range(0.0..=1.0);
        let t_off: f64 = rng.random_range(-4.0..4.0);
        let x_off: f64 = rng.random_range(-4.0..4.0);
        worst_temporal = worst_temporal.max(preimage_count(t_off, t_off + rho * rho, target));
        worst_spatial = worst_spatial.max(preimage_count(x_off, x_off + rho, target));
    }
    SigmaTrialReport {
        rho,
        trials,
        worst_temporal,
        worst_spatial,
        temporal_bound,
        spatial_bound,
        pass: worst_temporal <= temporal_bound && worst_spatial <= spatial_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::reflect_index;
    use proptest::prelude::*;

    /// Direct histogram: walk the window and count where each cell folds.
    fn histogram(start: i64, len: usize, n: usize) -> Vec<usize> {
        let mut h = vec![0usize; n];
        for j in start..start + len as i64 {
            h[reflect_index(j, n)] += 1;
        }
        h
    }

    #[test]
    fn window_inside_base_is_plain_indicator() {
        let m = axis_multiplicities(1, 2, 4);
        assert_eq!(m, vec![0, 1, 1, 0]);
    }

    #[test]
    fn window_across_face_folds_back() {
        // [3, 5) on n = 4 covers cells 3 and reflect(4) = 3: multiplicity 2.
        let m = axis_multiplicities(3, 2, 4);
        assert_eq!(m, vec![0, 0, 0, 2]);
    }

    #[test]
    fn full_period_hits_everything_twice() {
        let m = axis_multiplicities(-3, 8, 4);
        assert_eq!(m, vec![2, 2, 2, 2]);
    }

    #[test]
    fn four_periods_hit_everything_eight_times() {
        let m = axis_multiplicities(0, 32, 4);
        assert_eq!(m, vec![8, 8, 8, 8]);
    }

    #[test]
    fn report_small_cylinder() {
        let spec = GridSpec::new(2, 4).unwrap();
        // k = 3 <= n: all multiplicities bounded by 2.
        let cyl = ParabolicCylinder::new(14, &[-2, 3], 3);
        let r = multiplicity_report(&spec, &cyl);
        assert_eq!(r.temporal_bound, 2);
        assert_eq!(r.spatial_bound, 2);
        assert!(r.pass);
        assert!(r.temporal_max <= 2);
        assert!(r.spatial_max.iter().all(|&m| m <= 2));
    }

    #[test]
    fn report_large_cylinder() {
        let spec = GridSpec::new(1, 4).unwrap();
        // k = 16 = 4n: rho = 4, spatial bound 5, temporal bound 17.
        let cyl = ParabolicCylinder::new(0, &[0], 16);
        let r = multiplicity_report(&spec, &cyl);
        assert_eq!(r.spatial_bound, 5);
        assert_eq!(r.temporal_bound, 17);
        assert!(r.pass);
        // A 16-cell window over a period of 8 hits every cell exactly 4 times.
        assert_eq!(r.spatial_max, vec![4]);
    }

    #[test]
    fn trial_bounds_table() {
        assert_eq!(sigma_trial_bounds(0.25), (2, 2));
        assert_eq!(sigma_trial_bounds(1.0), (2, 2));
        assert_eq!(sigma_trial_bounds(1.5), (5, 3));
        assert_eq!(sigma_trial_bounds(2.0), (5, 3));
        assert_eq!(sigma_trial_bounds(2.5), (10, 4));
        assert_eq!(sigma_trial_bounds(4.0), (17, 5));
    }

    #[test]
    fn unit_scale_trials_stay_at_two() {
        let r = sigma_bounds_check(1.0, 3000, 0);
        assert!(r.pass);
        assert!(r.worst_temporal <= 2 && r.worst_spatial <= 2);
        // Length-1 windows do see doubled points near the fold creases.
        assert_eq!(r.worst_spatial, 2);
    }

    #[test]
    fn large_scale_trials_respect_coarse_bounds() {
        let r = sigma_bounds_check(4.0, 3000, 1);
        assert!(r.pass);
        // A length-16 window spans 8 periods: about two preimages each.
        assert!(r.worst_temporal >= 14 && r.worst_temporal <= 17);
        assert!(r.worst_spatial >= 3 && r.worst_spatial <= 5);
    }

    #[test]
    fn trial_report_is_deterministic() {
        let a = sigma_bounds_check(2.5, 500, 42);
        let b = sigma_bounds_check(2.5, 500, 42);
        assert_eq!(a.worst_temporal, b.worst_temporal);
        assert_eq!(a.worst_spatial, b.worst_spatial);
    }

    proptest! {
        #[test]
        fn random_scales_never_exceed_bounds(
            rho in 0.05f64..4.0,
            seed in 0u64..1000,
        ) {
            let r = sigma_bounds_check(rho, 60, seed);
            prop_assert!(r.pass);
        }
    }

    proptest! {
        #[test]
        fn closed_form_matches_histogram(
            start in -100i64..100,
            len in 0usize..120,
            n in 1usize..12,
        ) {
            prop_assert_eq!(axis_multiplicities(start, len, n), histogram(start, len, n));
        }

        #[test]
        fn counts_sum_to_window_length(
            start in -50i64..50,
            len in 0usize..80,
            n in 1usize..10,
        ) {
            let total: usize = axis_multiplicities(start, len, n).iter().sum();
            prop_assert_eq!(total, len);
        }

        #[test]
        fn bound_holds_and_small_windows_stay_below_two(
            start in -50i64..50,
            len in 1usize..80,
            n in 2usize..10,
        ) {
            let max = axis_multiplicities(start, len, n).into_iter().max().unwrap();
            prop_assert!(max <= multiplicity_bound(len, n));
            if len <= n {
                prop_assert!(max <= 2);
            }
        }
    }
}
