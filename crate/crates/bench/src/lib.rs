//! Shared fixtures for the benchmarks.

use fptower::repro::ReproConfig;
use fptower::{IntMatrix, Presentation, Word};

/// The root presentation and the generators of the first tower group.
pub fn tower_root() -> (Presentation, Vec<Word>) {
    let cfg = ReproConfig::default();
    (cfg.gamma_bar, cfg.g1_generators)
}

/// A dense pseudo-random matrix with small entries, fixed by `seed`.
pub fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> IntMatrix {
    let mut state = seed;
    let dense: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 33) % 19) as i64 - 9
                })
                .collect()
        })
        .collect();
    IntMatrix::from_i64(&dense)
}
