//! Grid geometry for the unit parabolic box (0,1)^{d+1}.
//!
//! Time is resolved with n^2 cells and each spatial axis with n cells, so the
//! temporal step is exactly the square of the spatial step. A cylinder of
//! spatial side k cells then has temporal length exactly k^2 cells, which keeps
//! every parabolic cylinder grid-aligned with no rounding.

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Discretization of the unit box (0,1)^{d+1} with parabolic time/space coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    d: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d) || n < 2 {
            return Err(Error::InvalidGrid { d, n });
        }
        Ok(GridSpec { d, n })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Spatial cells per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Temporal cells, always n^2.
    pub fn n_t(&self) -> usize {
        self.n * self.n
    }

    /// Spatial step 1/n.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Temporal step 1/n^2 = h^2.
    pub fn h_t(&self) -> f64 {
        self.h() * self.h()
    }

    /// Cells in one time slice: n^d.
    pub fn spatial_cells(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Total cells: n^2 * n^d.
    pub fn cells(&self) -> usize {
        self.n_t() * self.spatial_cells()
    }

    /// Flat index of the spatial multi-index `x` (x[0] = x^1 varies fastest).
    pub fn spatial_index(&self, x: &[usize]) -> usize {
        debug_assert_eq!(x.len(), self.d);
        let mut idx = 0;
        for &xi in x.iter().rev() {
            debug_assert!(xi < self.n);
            idx = idx * self.n + xi;
        }
        idx
    }

    /// Flat cell index: t-major, then x_d ... x_1 with x^1 fastest.
    pub fn flat_index(&self, t: usize, x: &[usize]) -> usize {
        debug_assert!(t < self.n_t());
        t * self.spatial_cells() + self.spatial_index(x)
    }

    /// Center of temporal cell t: (t + 1/2) h_t.
    pub fn t_center(&self, t: usize) -> f64 {
        (t as f64 + 0.5) * self.h_t()
    }

    /// Center of spatial cell i along any axis: (i + 1/2) h.
    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }
}

/// Visit every spatial multi-index in [0, n)^d, first coordinate fastest.
///
/// Visit order matches `GridSpec::spatial_index`: the flat index increases by
/// one per call.
pub fn for_each_multi_index(n: usize, d: usize, mut f: impl FnMut(&[usize])) {
    debug_assert!(d <= MAX_DIM);
    let mut x = [0usize; MAX_DIM];
    loop {
        f(&x[..d]);
        let mut axis = 0;
        loop {
            if axis == d {
                return;
            }
            x[axis] += 1;
            if x[axis] < n {
                break;
            }
            x[axis] = 0;
            axis += 1;
        }
    }
}

/// Fold an arbitrary cell index onto [0, n) by the 2-periodic tent reflection.
///
/// With cell centers (i + 1/2)/n, the returned index j is the unique cell whose
/// center equals the tent map applied to the center of cell i: indices run up
/// 0..n-1, come back down n-1..0 over one period of 2n cells, and repeat.
pub fn reflect_index(i: i64, n: usize) -> usize {
    let two_n = 2 * n as i64;
    let m = i.rem_euclid(two_n);
    if m < n as i64 {
        m as usize
    } else {
        (two_n - 1 - m) as usize
    }
}

/// Grid-aligned parabolic cylinder (t0*h_t, t0*h_t + k^2*h_t) x prod_i (x0_i*h, x0_i*h + k*h).
///
/// Offsets may be negative or beyond the base box; those positions are only
/// meaningful under extended (reflection) access.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParabolicCylinder {
    pub t0: i64,
    pub x0: [i64; MAX_DIM],
    pub k: usize,
}

impl ParabolicCylinder {
    pub fn new(t0: i64, x0: &[i64], k: usize) -> Self {
        debug_assert!(k >= 1);
        debug_assert!(x0.len() <= MAX_DIM);
        let mut arr = [0i64; MAX_DIM];
        arr[..x0.len()].copy_from_slice(x0);
        ParabolicCylinder { t0, x0: arr, k }
    }

    /// Spatial side length rho = k h.
    pub fn rho(&self, spec: &GridSpec) -> f64 {
        self.k as f64 * spec.h()
    }

    /// Temporal extent in cells, exactly k^2.
    pub fn t_cells(&self) -> usize {
        self.k * self.k
    }

    /// Whether the cylinder lies inside the base box of `spec`.
    pub fn fits_base(&self, spec: &GridSpec) -> bool {
        let n = spec.n() as i64;
        let n_t = spec.n_t() as i64;
        if self.t0 < 0 || self.t0 + (self.t_cells() as i64) > n_t {
            return false;
        }
        self.x0[..spec.d()]
            .iter()
            .all(|&x| x >= 0 && x + self.k as i64 <= n)
    }

    /// Deterministic tie-break key: lexicographic (k, t0, x0).
    pub fn order_key(&self) -> (usize, i64, [i64; MAX_DIM]) {
        (self.k, self.t0, self.x0)
    }
}
