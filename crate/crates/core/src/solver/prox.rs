//! Proximal operator of the weighted logarithmic penalty.
//!
//! For `min_X 1/2 ||X - Y||_F^2 + eta * sum_i w_i ln(sigma_i(X)^p + eps)` the
//! minimiser keeps the singular vectors of `Y` and solves one scalar problem
//! per singular value. Each scalar problem is a convex quadratic plus a
//! concave increasing term, so it is attacked by linearising the concave part
//! at the current iterate and solving the resulting shifted quadratic in
//! closed form.

use crate::error::{Error, Result};
use crate::spectral::{svd, DenseMatrix};
use crate::surrogate::{SurrogateParams, WeightVector};

/// Parameters of one proximal evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxParams {
    /// Penalty scale (`lambda / mu` inside ADMM).
    pub eta: f64,
    pub weights: WeightVector,
    pub surrogate: SurrogateParams,
    /// Difference-of-convex steps per singular value.
    pub inner_iters: usize,
}

impl ProxParams {
    pub fn new(
        eta: f64,
        weights: WeightVector,
        surrogate: SurrogateParams,
        inner_iters: usize,
    ) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::invalid("eta", format!("{eta} must be >= 0")));
        }
        surrogate.validate()?;
        Ok(Self {
            eta,
            weights,
            surrogate,
            inner_iters,
        })
    }
}

/// Scalar objective `1/2 (sigma - sigma_y)^2 + eta * w * ln(sigma^p + eps)`.
pub fn prox_objective(
    sigma: f64,
    sigma_y: f64,
    eta: f64,
    weight: f64,
    params: &SurrogateParams,
) -> f64 {
    0.5 * (sigma - sigma_y).powi(2) + eta * weight * params.log_term(sigma)
}

/// One difference-of-convex step on the scalar problem:
/// `max(sigma_y - eta * w * p * prev^(p-1) / (prev^p + eps), 0)`.
///
/// For `p < 1` the slope at `prev = 0` is infinite, so zero maps to zero.
pub fn dc_singular_update(
    sigma_y: f64,
    sigma_prev: f64,
    weight: f64,
    eta: f64,
    params: &SurrogateParams,
) -> f64 {
    if eta == 0.0 {
        return sigma_y;
    }
    if sigma_prev == 0.0 && params.p < 1.0 {
        return 0.0;
    }
    let slope = params.p * sigma_prev.powf(params.p - 1.0) / (params.pow(sigma_prev) + params.eps);
    (sigma_y - eta * weight * slope).max(0.0)
}

/// Runs `inner_iters` DC steps from `seed` for every singular value of the
/// centre; `seed(i, sigma_y_i)` picks the starting point of value `i`.
pub(crate) fn prox_rmln_seeded(
    y: &DenseMatrix,
    prox: &ProxParams,
    mut seed: impl FnMut(usize, f64) -> f64,
) -> Result<(DenseMatrix, Vec<f64>)> {
    let r = y.rank_bound();
    if prox.weights.len() != r {
        return Err(Error::LengthMismatch {
            expected: r,
            found: prox.weights.len(),
        });
    }
    let factors = svd(y)?;
    let shrunk: Vec<f64> = factors
        .singular_values
        .iter()
        .zip(prox.weights.as_slice())
        .enumerate()
        .map(|(i, (&sigma_y, &w))| {
            let mut s = seed(i, sigma_y);
            for _ in 0..prox.inner_iters {
                s = dc_singular_update(sigma_y, s, w, prox.eta, &prox.surrogate);
            }
            s
        })
        .collect();
    let out = factors.reconstruct_with(&shrunk)?;
    Ok((out, shrunk))
}

/// Approximate proximal operator: SVD of `y`, `inner_iters` DC steps per
/// singular value started from `sigma_init`, and reassembly on the singular
/// vectors of `y`. Returns the matrix and its new singular values (in the
/// order of `y`'s).
pub fn prox_rmln(
    y: &DenseMatrix,
    prox: &ProxParams,
    sigma_init: &[f64],
) -> Result<(DenseMatrix, Vec<f64>)> {
    if sigma_init.len() != y.rank_bound() {
        return Err(Error::LengthMismatch {
            expected: y.rank_bound(),
            found: sigma_init.len(),
        });
    }
    if let Some(s) = sigma_init.iter().find(|s| s.is_nan() || **s < 0.0) {
        return Err(Error::invalid("sigma_init", format!("{s} is negative")));
    }
    prox_rmln_seeded(y, prox, |i, _| sigma_init[i])
}
