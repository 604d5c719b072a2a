//! Shared fixtures for the kernel benchmarks in `benches/`.

use pbmo_core::{generate, Field, GeneratorKind, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rough deterministic scalar field: the worst realistic case for the
/// seminorm kernels (no structure the sort can exploit).
pub fn piecewise_field(d: usize, n: usize) -> Field {
    let spec = GridSpec::new(d, n).expect("benchmark grid is valid");
    generate(&spec, GeneratorKind::RandomPiecewise, 0, 0.5).expect("generator accepts the grid")
}

/// Deterministic sample vector for the slice-statistic benchmarks.
pub fn sample_values(m: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
    (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let f = piecewise_field(2, 4);
        assert_eq!(f.spec().d(), 2);
        assert_eq!(sample_values(64).len(), 64);
        // Same m, same vector: benchmarks must not drift between runs.
        assert_eq!(sample_values(64), sample_values(64));
    }
}
