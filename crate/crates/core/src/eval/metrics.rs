//! MSE, PSNR and single-scale SSIM.
//!
//! SSIM uses an 11x11 Gaussian window with standard deviation 1.5, stabilisers
//! `C1 = (0.01 L)^2` and `C2 = (0.03 L)^2` for peak `L`, and averages the
//! local index over all windows that fit entirely inside the image.

use crate::error::{Error, Result};
use crate::spectral::DenseMatrix;

/// PSNR reported for identical inputs.
pub const PSNR_CAP_DB: f64 = 99.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityScore {
    pub mse: f64,
    pub psnr_db: f64,
    pub ssim: f64,
}

pub fn mse(reference: &DenseMatrix, test: &DenseMatrix) -> Result<f64> {
    reference.ensure_same_shape(test)?;
    let n = reference.as_slice().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sum: f64 = reference
        .as_slice()
        .iter()
        .zip(test.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / n as f64)
}

fn check_peak(peak: f64) -> Result<()> {
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::invalid("peak", format!("{peak} must be positive")));
    }
    Ok(())
}

fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        PSNR_CAP_DB
    } else {
        (10.0 * (peak * peak / mse).log10()).min(PSNR_CAP_DB)
    }
}

/// `10 log10(peak^2 / MSE)`, never above [`PSNR_CAP_DB`] (reached exactly
/// when the inputs are equal).
pub fn psnr(reference: &DenseMatrix, test: &DenseMatrix, peak: f64) -> Result<f64> {
    check_peak(peak)?;
    Ok(psnr_from_mse(mse(reference, test)?, peak))
}

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let half = (SSIM_WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= total);
    k
}

/// Separable "valid" Gaussian filtering of a row-major image.
fn filter_valid(data: &[f64], rows: usize, cols: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let out_cols = cols - SSIM_WINDOW + 1;
    let out_rows = rows - SSIM_WINDOW + 1;
    let mut horiz = vec![0.0; rows * out_cols];
    for i in 0..rows {
        let row = &data[i * cols..(i + 1) * cols];
        for j in 0..out_cols {
            horiz[i * out_cols + j] = k.iter().zip(&row[j..]).map(|(w, v)| w * v).sum();
        }
    }
    let mut out = vec![0.0; out_rows * out_cols];
    for i in 0..out_rows {
        for (t, w) in k.iter().enumerate() {
            let src = &horiz[(i + t) * out_cols..(i + t + 1) * out_cols];
            for (o, v) in out[i * out_cols..(i + 1) * out_cols].iter_mut().zip(src) {
                *o += w * v;
            }
        }
    }
    out
}

/// Mean structural similarity of two images with dynamic range `peak`.
pub fn ssim(reference: &DenseMatrix, test: &DenseMatrix, peak: f64) -> Result<f64> {
    reference.ensure_same_shape(test)?;
    check_peak(peak)?;
    let (rows, cols) = reference.shape();
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            rows,
            cols,
            window: SSIM_WINDOW,
        });
    }
    let k = gaussian_kernel();
    let x = reference.as_slice();
    let y = test.as_slice();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();

    let mu_x = filter_valid(x, rows, cols, &k);
    let mu_y = filter_valid(y, rows, cols, &k);
    let e_xx = filter_valid(&xx, rows, cols, &k);
    let e_yy = filter_valid(&yy, rows, cols, &k);
    let e_xy = filter_valid(&xy, rows, cols, &k);

    let c1 = (0.01 * peak).powi(2);
    let c2 = (0.03 * peak).powi(2);
    let n = mu_x.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let vx = e_xx[i] - mx * mx;
            let vy = e_yy[i] - my * my;
            let cov = e_xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / n as f64)
}

pub fn score(reference: &DenseMatrix, test: &DenseMatrix, peak: f64) -> Result<QualityScore> {
    check_peak(peak)?;
    let mse = mse(reference, test)?;
    Ok(QualityScore {
        mse,
        psnr_db: psnr_from_mse(mse, peak),
        ssim: ssim(reference, test, peak)?,
    })
}
