use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::solver::ObservationMask;

/// A rectangle `[top, top + height) x [left, left + width)` of missing pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockRect {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaskKind {
    /// A fixed fraction of entries, drawn uniformly without replacement.
    Random { missing_ratio: f64 },
    /// The union of the rectangles is missing.
    Block { blocks: Vec<BlockRect> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskSpec {
    pub kind: MaskKind,
    pub seed: u64,
}

impl MaskSpec {
    pub fn random(missing_ratio: f64, seed: u64) -> Self {
        Self {
            kind: MaskKind::Random { missing_ratio },
            seed,
        }
    }

    pub fn build(&self, rows: usize, cols: usize) -> Result<ObservationMask> {
        match &self.kind {
            MaskKind::Random { missing_ratio } => {
                make_random_mask(rows, cols, *missing_ratio, self.seed)
            }
            MaskKind::Block { blocks } => make_block_mask(rows, cols, blocks),
        }
    }
}

/// Marks exactly `round(mr * rows * cols)` entries missing, chosen uniformly
/// without replacement by a ChaCha8 generator seeded with `seed`.
pub fn make_random_mask(rows: usize, cols: usize, mr: f64, seed: u64) -> Result<ObservationMask> {
    if !(0.0..1.0).contains(&mr) {
        return Err(Error::invalid("mr", format!("{mr} is outside [0, 1)")));
    }
    let total = rows * cols;
    let missing = ((mr * total as f64).round() as usize).min(total);
    let mut flags = vec![true; total];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in index::sample(&mut rng, total, missing) {
        flags[k] = false;
    }
    ObservationMask::from_flags(rows, cols, flags)
}

pub fn make_block_mask(rows: usize, cols: usize, blocks: &[BlockRect]) -> Result<ObservationMask> {
    let mut flags = vec![true; rows * cols];
    for b in blocks {
        if b.top + b.height > rows || b.left + b.width > cols {
            return Err(Error::invalid(
                "blocks",
                format!(
                    "rectangle {}x{} at ({}, {}) exceeds {rows}x{cols}",
                    b.height, b.width, b.top, b.left
                ),
            ));
        }
        for i in b.top..b.top + b.height {
            flags[i * cols + b.left..i * cols + b.left + b.width].fill(false);
        }
    }
    ObservationMask::from_flags(rows, cols, flags)
}
