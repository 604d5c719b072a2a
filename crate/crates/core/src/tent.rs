//! The 2-periodic tent map used to reflect the base box across its faces.

/// Tent map: identity on [0,1], `2 - t` on [1,2], extended 2-periodically to R.
///
/// It is 1-Lipschitz, maps R onto [0,1], and restricts to the identity there.
pub fn tent(t: f64) -> f64 {
    let m = t.rem_euclid(2.0);
    if m <= 1.0 {
        m
    } else {
        2.0 - m
    }
}

/// Apply the tent map coordinatewise.
pub fn tent_point(p: &[f64]) -> Vec<f64> {
    p.iter().map(|&c| tent(c)).collect()
}

/// Number of solutions of `tent(t) = target` in the open interval `(lo, hi)`.
///
/// The preimage of `target` in [0,1] is the union of the two arithmetic
/// progressions `target + 2m` and `2 - target + 2m` over the integers; for
/// `target` equal to 0 or 1 the progressions coincide and are counted once.
/// Targets outside [0,1] have no preimage. Requires `lo < hi`.
pub fn preimage_count(lo: f64, hi: f64, target: f64) -> usize {
    debug_assert!(lo < hi, "interval must be nondegenerate");
    if !(0.0..=1.0).contains(&target) {
        return 0;
    }
    let branch = |anchor: f64| -> usize {
        // Integers m with lo < anchor + 2m < hi, both bounds strict.
        let lower = (lo - anchor) / 2.0;
        let upper = (hi - anchor) / 2.0;
        let m_min = lower.floor() as i64 + 1; // least integer strictly above
        let m_max = upper.ceil() as i64 - 1; // greatest integer strictly below
        (m_max - m_min + 1).max(0) as usize
    };
    if target == 0.0 || target == 1.0 {
        branch(target)
    } else {
        branch(target) + branch(2.0 - target)
    }
}
