//! Symmetric d x d matrices (d <= 3), their eigendecomposition, and the
//! projection onto the elliptic band S_delta of symmetric matrices with
//! spectrum in [delta, 1/delta].
//!
//! The projection clamps each eigenvalue into the band and reconstructs.
//! In Frobenius norm this is the nearest-point projection onto a closed
//! convex set, so it is nonexpansive: |P(A) - P(B)|_F <= |A - B|_F. Since it
//! acts cellwise, it commutes with the reflection extension of a field.

use crate::error::{Error, Result};
use crate::field::{Field, ValueKind};
use crate::grid::MAX_DIM;
use crate::mad::channel_weights;

/// Symmetric matrix stored as its row-major upper triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat {
    d: usize,
    a: [f64; 6],
}

/// Upper-triangle flat index of entry (r, c), r <= c, for dimension d.
fn tri_index(d: usize, r: usize, c: usize) -> usize {
    debug_assert!(r <= c && c < d);
    // Row r starts after rows 0..r, which hold d + (d-1) + ... + (d-r+1) entries.
    r * d - r * (r + 1) / 2 + c
}

impl SymMat {
    pub fn zeros(d: usize) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&d));
        SymMat { d, a: [0.0; 6] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.set(i, i, 1.0);
        }
        m
    }

    /// From an upper-triangle record of d(d+1)/2 values.
    pub fn from_slice(d: usize, rec: &[f64]) -> Result<Self> {
        let len = d * (d + 1) / 2;
        if !(1..=MAX_DIM).contains(&d) || rec.len() != len {
            return Err(Error::DimensionMismatch(d, rec.len()));
        }
        if let Some(index) = rec.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mut a = [0.0; 6];
        a[..len].copy_from_slice(rec);
        Ok(SymMat { d, a })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a[..self.d * (self.d + 1) / 2]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        self.a[tri_index(self.d, r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        self.a[tri_index(self.d, r, c)] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        let w = channel_weights(self.d);
        self.as_slice()
            .iter()
            .zip(&w)
            .map(|(&x, &c)| c * x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn dist_frobenius(&self, other: &SymMat) -> f64 {
        debug_assert_eq!(self.d, other.d);
        let w = channel_weights(self.d);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .zip(&w)
            .map(|((&x, &y), &c)| c * (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    /// v^T A v.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for r in 0..self.d {
            for c in 0..self.d {
                s += v[r] * self.get(r, c) * v[c];
            }
        }
        s
    }
}

/// Eigendecomposition result: `values` ascending, `vectors[j]` the unit
/// eigenvector for `values[j]`.
#[derive(Debug, Clone, Copy)]
pub struct Eigen {
    pub d: usize,
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

/// Cyclic Jacobi eigensolver. For d <= 3 this converges in a handful of
/// sweeps; iteration stops when the off-diagonal Frobenius mass falls below
/// 1e-14 relative to the matrix scale.
// The rotations update rows and columns in lockstep (a[r][p] with a[p][r]);
// indexed loops keep that symmetry visible.
#[allow(clippy::needless_range_loop)]
pub fn eigh(m: &SymMat) -> Eigen {
    let d = m.d;
    let mut a = [[0.0f64; 3]; 3];
    let mut v = [[0.0f64; 3]; 3];
    for r in 0..d {
        v[r][r] = 1.0;
        for c in 0..d {
            a[r][c] = m.get(r, c);
        }
    }
    let scale = 1.0 + m.frobenius_norm();

    for _sweep in 0..50 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += 2.0 * a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for r in 0..d {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r][p];
                    let arq = a[r][q];
                    a[r][p] = arp - s * (arq + tau * arp);
                    a[p][r] = a[r][p];
                    a[r][q] = arq + s * (arp - tau * arq);
                    a[q][r] = a[r][q];
                }
                for r in 0..d {
                    let vrp = v[r][p];
                    let vrq = v[r][q];
                    v[r][p] = vrp - s * (vrq + tau * vrp);
                    v[r][q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    // Sort ascending, carrying eigenvectors along.
    let mut order = [0usize, 1, 2];
    order[..d].sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let mut values = [0.0; 3];
    let mut vectors = [[0.0; 3]; 3];
    for (slot, &idx) in order[..d].iter().enumerate() {
        values[slot] = a[idx][idx];
        for r in 0..d {
            vectors[slot][r] = v[r][idx];
        }
    }
    Eigen { d, values, vectors }
}

/// Nearest matrix (in Frobenius norm) with spectrum inside [delta, 1/delta]:
/// clamp each eigenvalue into the band and reconstruct.
pub fn project_to_band(m: &SymMat, delta: f64) -> Result<SymMat> {
    if !(delta > 0.0 && delta <= 1.0) || !delta.is_finite() {
        return Err(Error::BadDelta(delta));
    }
    let lo = delta;
    let hi = 1.0 / delta;
    let e = eigh(m);
    let mut out = SymMat::zeros(m.d);
    for j in 0..m.d {
        let lam = e.values[j].clamp(lo, hi);
        let u = &e.vectors[j];
        for r in 0..m.d {
            for c in r..m.d {
                let cur = out.get(r, c);
                out.set(r, c, cur + lam * u[r] * u[c]);
            }
        }
    }
    Ok(out)
}

/// Apply the band projection to every cell of a matrix field.
pub fn project_field(field: &Field, delta: f64) -> Result<Field> {
    if field.kind() != ValueKind::Matrix {
        return Err(Error::DimensionMismatch(field.spec().d(), 0));
    }
    let d = field.spec().d();
    let comps = field.comps();
    let mut data = Vec::with_capacity(field.data().len());
    for cell in 0..field.spec().cells() {
        let m = SymMat::from_slice(d, field.record(cell))?;
        let p = project_to_band(&m, delta)?;
        data.extend_from_slice(p.as_slice());
    }
    debug_assert_eq!(data.len(), field.spec().cells() * comps);
    Field::matrix(*field.spec(), delta, data)
}

/// Largest absolute eigenvalue-band violation of a matrix field: how far the
/// spectrum of any cell strays outside [delta, 1/delta]. Zero means the field
/// already lies in S_delta.
pub fn band_violation(field: &Field, delta: f64) -> Result<f64> {
    if field.kind() != ValueKind::Matrix {
        return Err(Error::DimensionMismatch(field.spec().d(), 0));
    }
    if !(delta > 0.0 && delta <= 1.0) || !delta.is_finite() {
        return Err(Error::BadDelta(delta));
    }
    let d = field.spec().d();
    let mut worst = 0.0f64;
    for cell in 0..field.spec().cells() {
        let e = eigh(&SymMat::from_slice(d, field.record(cell))?);
        for j in 0..d {
            let lam = e.values[j];
            worst = worst.max(delta - lam).max(lam - 1.0 / delta);
        }
    }
    Ok(worst.max(0.0))
}
