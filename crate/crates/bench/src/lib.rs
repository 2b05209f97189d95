//! Shared fixtures for the benchmarks.

use rmln_core::{make_random_mask, synthetic::gaussian_low_rank, DenseMatrix, ObservationMask};

/// A rank-`rank` `n x n` matrix in `[0, 255]` with a random mask.
pub fn fixture(n: usize, rank: usize, mr: f64, seed: u64) -> (DenseMatrix, ObservationMask) {
    let truth = gaussian_low_rank(n, n, rank, (0.0, 255.0), seed).expect("valid fixture");
    let mask = make_random_mask(n, n, mr, seed).expect("valid ratio");
    (truth, mask)
}
