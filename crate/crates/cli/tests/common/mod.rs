#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rmln_cli::{load_image, save_image};
use rmln_core::DenseMatrix;

pub fn data_image(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/images")
        .join(name)
}

pub fn crop(m: &DenseMatrix, top: usize, left: usize, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |i, j| m[(top + i, left + j)])
}

/// Writes a `size x size` crop of a bundled image into `dir`.
pub fn small_copy(dir: &Path, name: &str, size: usize) -> PathBuf {
    let img = load_image(data_image(name)).unwrap();
    let channels: Vec<DenseMatrix> = img
        .channels
        .iter()
        .map(|c| crop(c, 0, 0, size, size))
        .collect();
    let out = dir.join(name);
    save_image(&out, &channels).unwrap();
    out
}
