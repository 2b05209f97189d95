use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use rmln_core::{scalar_surrogate_profile, write_profile_csv, ProfileRow, SurrogateParams};

/// `samples` equally spaced points on `[-bound, bound]`, endpoints included.
/// An odd count puts a sample exactly at zero.
pub fn profile_grid(bound: f64, samples: usize) -> Vec<f64> {
    let last = (samples - 1) as f64;
    (0..samples)
        .map(|i| bound * (2.0 * i as f64 - last) / last)
        .collect()
}

/// Writes the scalar surrogate comparison on a uniform grid as CSV.
pub fn emit_profile(
    params: &SurrogateParams,
    bound: f64,
    samples: usize,
    path: impl AsRef<Path>,
) -> Result<Vec<ProfileRow>> {
    ensure!(samples >= 2, "need at least 2 samples, got {samples}");
    let path = path.as_ref();
    let rows = scalar_surrogate_profile(&profile_grid(bound, samples), params, bound)?;
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_profile_csv(&rows, BufWriter::new(file))
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(rows)
}
