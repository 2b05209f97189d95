use std::path::Path;

use anyhow::{bail, Context, Result};
use image::{DynamicImage, GrayImage, RgbImage};
use rmln_core::DenseMatrix;

/// An 8-bit raster split into real-valued channels.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedImage {
    /// One channel for grayscale, three (R, G, B) for colour.
    pub channels: Vec<DenseMatrix>,
    pub peak: f64,
}

impl LoadedImage {
    pub fn shape(&self) -> (usize, usize) {
        self.channels[0].shape()
    }
}

fn channel_from_bytes(
    rows: usize,
    cols: usize,
    bytes: &[u8],
    stride: usize,
    offset: usize,
) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |i, j| {
        bytes[(i * cols + j) * stride + offset] as f64
    })
}

/// Loads an 8-bit grayscale or RGB image. Alpha channels are dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<LoadedImage> {
    let path = path.as_ref();
    let img = image::open(path).with_context(|| format!("cannot read image {}", path.display()))?;
    let (cols, rows) = (img.width() as usize, img.height() as usize);
    let channels = match img {
        DynamicImage::ImageLuma8(g) => vec![channel_from_bytes(rows, cols, g.as_raw(), 1, 0)],
        DynamicImage::ImageLumaA8(_) => {
            let g = img.to_luma8();
            vec![channel_from_bytes(rows, cols, g.as_raw(), 1, 0)]
        }
        DynamicImage::ImageRgb8(c) => (0..3)
            .map(|k| channel_from_bytes(rows, cols, c.as_raw(), 3, k))
            .collect(),
        DynamicImage::ImageRgba8(c) => (0..3)
            .map(|k| channel_from_bytes(rows, cols, c.as_raw(), 4, k))
            .collect(),
        other => bail!(
            "unsupported pixel format {:?} in {} (expected 8-bit grayscale or RGB)",
            other.color(),
            path.display()
        ),
    };
    if rows == 0 || cols == 0 {
        bail!("image {} is empty", path.display());
    }
    Ok(LoadedImage {
        channels,
        peak: 255.0,
    })
}

/// Clamps to `[0, 255]` and rounds half away from zero.
#[inline]
pub fn quantize(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}

/// Writes one (grayscale) or three (RGB) channels as an 8-bit image; the
/// format follows the file extension.
pub fn save_image(path: impl AsRef<Path>, channels: &[DenseMatrix]) -> Result<()> {
    let path = path.as_ref();
    let Some(first) = channels.first() else {
        bail!("no channels to write to {}", path.display());
    };
    let (rows, cols) = first.shape();
    if channels.iter().any(|c| c.shape() != (rows, cols)) {
        bail!("channel shapes differ while writing {}", path.display());
    }
    let (w, h) = (cols as u32, rows as u32);
    let result = match channels.len() {
        1 => {
            let bytes = first.as_slice().iter().map(|&v| quantize(v)).collect();
            GrayImage::from_raw(w, h, bytes).map(|img| img.save(path))
        }
        3 => {
            let mut bytes = Vec::with_capacity(rows * cols * 3);
            for k in 0..rows * cols {
                bytes.extend(channels.iter().map(|c| quantize(c.as_slice()[k])));
            }
            RgbImage::from_raw(w, h, bytes).map(|img| img.save(path))
        }
        n => bail!("cannot write {n} channels to {}", path.display()),
    };
    result
        .expect("buffer length matches dimensions")
        .with_context(|| format!("cannot write image {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_rounds_half_away_from_zero() {
        assert_eq!(quantize(-3.0), 0);
        assert_eq!(quantize(0.5), 1);
        assert_eq!(quantize(1.49), 1);
        assert_eq!(quantize(254.5), 255);
        assert_eq!(quantize(300.0), 255);
    }

    #[test]
    fn grayscale_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        let m = DenseMatrix::from_fn(5, 7, |i, j| ((i * 37 + j * 11) % 256) as f64);
        save_image(&path, std::slice::from_ref(&m)).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back.channels, vec![m]);
        assert_eq!(back.peak, 255.0);
    }

    #[test]
    fn rgb_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.png");
        let chans: Vec<_> = (0..3)
            .map(|k| DenseMatrix::from_fn(4, 6, |i, j| ((i * 50 + j * 9 + k * 80) % 256) as f64))
            .collect();
        save_image(&path, &chans).unwrap();
        assert_eq!(load_image(&path).unwrap().channels, chans);
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_image("/nonexistent/thing.png").unwrap_err();
        assert!(format!("{err:#}").contains("/nonexistent/thing.png"));
    }

    #[test]
    fn rejects_sixteen_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        image::ImageBuffer::<image::Luma<u16>, _>::from_raw(2, 2, vec![0u16, 1, 2, 3])
            .unwrap()
            .save(&path)
            .unwrap();
        let err = load_image(&path).unwrap_err();
        assert!(err.to_string().contains("unsupported"));
    }
}
