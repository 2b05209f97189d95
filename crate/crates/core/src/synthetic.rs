//! Seeded synthetic low-rank test matrices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectral::DenseMatrix;

/// `A B` with standard Gaussian factors `A: rows x rank`, `B: rank x cols`,
/// affinely rescaled so its entries span exactly `[lo, hi]`.
pub fn gaussian_low_rank(
    rows: usize,
    cols: usize,
    rank: usize,
    (lo, hi): (f64, f64),
    seed: u64,
) -> Result<DenseMatrix> {
    if rank == 0 || rank > rows.min(cols) {
        return Err(Error::invalid(
            "rank",
            format!("{rank} is outside 1..={}", rows.min(cols)),
        ));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::invalid("range", format!("({lo}, {hi}) is empty")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |r, c| {
        let data: Vec<f64> = (0..r * c)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        DenseMatrix::from_vec_unchecked(r, c, data)
    };
    let a = draw(rows, rank);
    let b = draw(rank, cols);
    let product = a.matmul(&b)?;
    let min = product
        .as_slice()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let max = product
        .as_slice()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = (max - min).max(f64::MIN_POSITIVE);
    Ok(product.map(|v| lo + (v - min) / span * (hi - lo)))
}
