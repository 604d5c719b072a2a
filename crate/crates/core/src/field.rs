//! Grid-sampled fields on the parabolic box, with O(1) reflected access.
//!
//! A field stores one value record per cell, t-major with x^1 fastest — the
//! same order as the on-disk format, so I/O is a straight copy. Scalar records
//! hold one number; symmetric-matrix records hold the upper triangle row-major
//! (d(d+1)/2 numbers).
//!
//! The reflection extension to all of R^{d+1} is never materialized: extended
//! accessors fold each index back into the base box with `reflect_index`, so a
//! lookup anywhere costs the same as a base lookup.

use crate::error::{Error, Result};
use crate::grid::{for_each_multi_index, reflect_index, GridSpec};

/// What each cell record holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Scalar,
    /// Symmetric d x d matrix, upper triangle row-major.
    Matrix,
}

impl ValueKind {
    /// Components per cell record for dimension `d`.
    pub fn comps(&self, d: usize) -> usize {
        match self {
            ValueKind::Scalar => 1,
            ValueKind::Matrix => d * (d + 1) / 2,
        }
    }

    /// On-disk tag.
    pub fn code(&self) -> u32 {
        match self {
            ValueKind::Scalar => 0,
            ValueKind::Matrix => 1,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(ValueKind::Scalar),
            1 => Some(ValueKind::Matrix),
            _ => None,
        }
    }
}

/// A sampled field a(t, x) on the grid of `spec`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    kind: ValueKind,
    /// Ellipticity parameter recorded with matrix fields; 0 for scalar fields.
    delta: f64,
    comps: usize,
    data: Vec<f64>,
}

impl Field {
    /// Scalar field from cell values in flat-index order.
    pub fn scalar(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::with_kind(spec, ValueKind::Scalar, 0.0, values)
    }

    /// Matrix field from per-cell upper triangles in flat-index order.
    pub fn matrix(spec: GridSpec, delta: f64, values: Vec<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) || !delta.is_finite() {
            return Err(Error::BadDelta(delta));
        }
        Self::with_kind(spec, ValueKind::Matrix, delta, values)
    }

    pub fn with_kind(
        spec: GridSpec,
        kind: ValueKind,
        delta: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        let comps = kind.comps(spec.d());
        let expected = spec.cells() * comps;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: idx });
        }
        Ok(Field {
            spec,
            kind,
            delta,
            comps,
            data: values,
        })
    }

    /// Build a scalar field by evaluating `f(t, x)` at every cell.
    pub fn from_scalar_fn(
        spec: GridSpec,
        mut f: impl FnMut(usize, &[usize]) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(spec.cells());
        for t in 0..spec.n_t() {
            for_each_multi_index(spec.n(), spec.d(), |x| data.push(f(t, x)));
        }
        Self::scalar(spec, data)
    }

    /// Build a matrix field by evaluating `f(t, x)` into the upper triangle.
    pub fn from_matrix_fn(
        spec: GridSpec,
        delta: f64,
        mut f: impl FnMut(usize, &[usize], &mut [f64]),
    ) -> Result<Self> {
        let comps = ValueKind::Matrix.comps(spec.d());
        let mut data = Vec::with_capacity(spec.cells() * comps);
        let mut rec = [0.0f64; 6];
        for t in 0..spec.n_t() {
            for_each_multi_index(spec.n(), spec.d(), |x| {
                f(t, x, &mut rec[..comps]);
                data.extend_from_slice(&rec[..comps]);
            });
        }
        Self::matrix(spec, delta, data)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Components per cell record.
    pub fn comps(&self) -> usize {
        self.comps
    }

    /// Raw storage, cells * comps values in flat-index order.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Record at a flat cell index.
    pub fn record(&self, cell: usize) -> &[f64] {
        &self.data[cell * self.comps..(cell + 1) * self.comps]
    }

    /// Record at a base-box cell.
    pub fn value(&self, t: usize, x: &[usize]) -> &[f64] {
        self.record(self.spec.flat_index(t, x))
    }

    /// All records in time slice t (spatial_cells * comps values).
    pub fn slice(&self, t: usize) -> &[f64] {
        let w = self.spec.spatial_cells() * self.comps;
        &self.data[t * w..(t + 1) * w]
    }

    /// Flat cell index of the extension a(phi(t), phi(x)) at arbitrary indices.
    ///
    /// Each coordinate folds independently: time over period 2 n^2 cells, each
    /// spatial axis over period 2 n cells.
    pub fn cell_ext(&self, t: i64, x: &[i64]) -> usize {
        debug_assert_eq!(x.len(), self.spec.d());
        let n = self.spec.n();
        let tt = reflect_index(t, self.spec.n_t());
        let mut idx = 0;
        for &xi in x.iter().rev() {
            idx = idx * n + reflect_index(xi, n);
        }
        tt * self.spec.spatial_cells() + idx
    }

    /// Record of the reflection extension at arbitrary (possibly out-of-box) indices.
    pub fn value_ext(&self, t: i64, x: &[i64]) -> &[f64] {
        self.record(self.cell_ext(t, x))
    }

    /// Scalar value at a base cell (first component for matrix fields).
    pub fn scalar_at(&self, t: usize, x: &[usize]) -> f64 {
        self.value(t, x)[0]
    }

    /// Scalar value of the extension at arbitrary indices.
    pub fn scalar_at_ext(&self, t: i64, x: &[i64]) -> f64 {
        self.value_ext(t, x)[0]
    }
}
