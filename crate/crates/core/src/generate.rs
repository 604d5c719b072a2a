//! Deterministic test-field generators.
//!
//! Every generator is a pure function of (grid, kind, seed): randomness comes
//! from a ChaCha stream seeded with the given value, sampled in a fixed
//! order, so the same inputs always reproduce the same field bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::matproj::{project_to_band, SymMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// One value everywhere (drawn once from the seed).
    Constant,
    /// Depends on t only: an independent draw per time slice.
    TimeOnly,
    /// Sum of the spatial cell-center coordinates; no randomness.
    LinearX,
    /// min(K, ln(1/r)) with r the sup-norm distance of the cell center to the
    /// box center and K = ln(4n): the classic unbounded-but-BMO profile.
    LogSingularity,
    /// +-1 blocks of side n/4 cells (n/4 squared in time); no randomness.
    Checkerboard,
    /// Independent uniform draws on blocks of side n/4 cells.
    RandomPiecewise,
    /// A few random low-frequency cosine modes in space and time; smooth.
    RandomFourier,
    /// Symmetric-matrix field: random entries projected into the elliptic
    /// band, so every cell lies in S_delta by construction.
    RandomSpd,
}

pub const ALL_KINDS: [GeneratorKind; 8] = [
    GeneratorKind::Constant,
    GeneratorKind::TimeOnly,
    GeneratorKind::LinearX,
    GeneratorKind::LogSingularity,
    GeneratorKind::Checkerboard,
    GeneratorKind::RandomPiecewise,
    GeneratorKind::RandomFourier,
    GeneratorKind::RandomSpd,
];

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Constant => "constant",
            GeneratorKind::TimeOnly => "time-only",
            GeneratorKind::LinearX => "linear-x",
            GeneratorKind::LogSingularity => "log-singularity",
            GeneratorKind::Checkerboard => "checkerboard",
            GeneratorKind::RandomPiecewise => "random-piecewise",
            GeneratorKind::RandomFourier => "random-fourier",
            GeneratorKind::RandomSpd => "random-spd",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_KINDS
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(s.to_string()))
    }
}

/// Block side used by the piecewise generators: a quarter of the axis, at
/// least one cell.
fn block_side(n: usize) -> usize {
    (n / 4).max(1)
}

/// Build a field of the given kind. `delta` is the ellipticity parameter of
/// the `random-spd` output and is ignored by the scalar kinds.
pub fn generate(spec: &GridSpec, kind: GeneratorKind, seed: u64, delta: f64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, d, n_t) = (spec.n(), spec.d(), spec.n_t());
    match kind {
        GeneratorKind::Constant => {
            let c = rng.random_range(-1.0..1.0);
            Field::from_scalar_fn(*spec, |_, _| c)
        }
        GeneratorKind::TimeOnly => {
            let per_slice: Vec<f64> = (0..n_t).map(|_| rng.random_range(-1.0..1.0)).collect();
            Field::from_scalar_fn(*spec, |t, _| per_slice[t])
        }
        GeneratorKind::LinearX => {
            Field::from_scalar_fn(*spec, |_, x| x.iter().map(|&xi| spec.x_center(xi)).sum())
        }
        GeneratorKind::LogSingularity => {
            let cap = (4.0 * n as f64).ln();
            Field::from_scalar_fn(*spec, |_, x| {
                let r = x
                    .iter()
                    .map(|&xi| (spec.x_center(xi) - 0.5).abs())
                    .fold(0.0f64, f64::max);
                if r == 0.0 {
                    cap
                } else {
                    (1.0 / r).ln().min(cap)
                }
            })
        }
        GeneratorKind::Checkerboard => {
            let b = block_side(n);
            Field::from_scalar_fn(*spec, |t, x| {
                let parity = t / (b * b) + x.iter().map(|&xi| xi / b).sum::<usize>();
                if parity.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
        }
        GeneratorKind::RandomPiecewise => {
            let b = block_side(n);
            let bt = n_t.div_ceil(b * b);
            let bx = n.div_ceil(b);
            let blocks: Vec<f64> = (0..bt * bx.pow(d as u32))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            Field::from_scalar_fn(*spec, |t, x| {
                let mut idx = t / (b * b);
                for &xi in x.iter().rev() {
                    idx = idx * bx + xi / b;
                }
                blocks[idx]
            })
        }
        GeneratorKind::RandomFourier => {
            // Low-frequency modes: a(t, x) = sum_j A_j cos(2 pi (m_j . x + w_j t) + phi_j).
            struct Mode {
                amp: f64,
                freq_x: [f64; 3],
                freq_t: f64,
                phase: f64,
            }
            let modes: Vec<Mode> = (1..=5)
                .map(|j| Mode {
                    amp: rng.random_range(-1.0..1.0) / j as f64,
                    freq_x: [
                        rng.random_range(0..=3) as f64,
                        rng.random_range(0..=3) as f64,
                        rng.random_range(0..=3) as f64,
                    ],
                    freq_t: rng.random_range(0..=2) as f64,
                    phase: rng.random_range(0.0..std::f64::consts::TAU),
                })
                .collect();
            Field::from_scalar_fn(*spec, |t, x| {
                let tc = spec.t_center(t);
                modes
                    .iter()
                    .map(|m| {
                        let arg: f64 = x
                            .iter()
                            .enumerate()
                            .map(|(ax, &xi)| m.freq_x[ax] * spec.x_center(xi))
                            .sum::<f64>()
                            + m.freq_t * tc;
                        m.amp * (std::f64::consts::TAU * arg + m.phase).cos()
                    })
                    .sum()
            })
        }
        GeneratorKind::RandomSpd => {
            let mut scratch = SymMat::zeros(d);
            Field::from_matrix_fn(*spec, delta, |_, _, rec| {
                for r in 0..d {
                    for c in r..d {
                        scratch.set(r, c, rng.random_range(-2.0..2.0));
                    }
                }
                let p = project_to_band(&scratch, delta).expect("delta validated by Field::matrix");
                rec.copy_from_slice(p.as_slice());
            })
        }
    }
}
