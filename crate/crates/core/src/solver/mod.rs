//! ADMM matrix completion with an RMLN penalty.
//!
//! The model is
//!
//! ```text
//! min_X  lambda * sum_i w_i ln(sigma_i(X)^p + eps) + 1/2 ||P_obs(X - Y)||_F^2
//! ```
//!
//! split as `X = Z`. Each outer iteration performs a closed-form X-update,
//! a spectral Z-update (singular values of `X + Lambda / mu` shrunk by a few
//! difference-of-convex steps), then a dual ascent step with a geometrically
//! growing penalty `mu`.

mod admm;
mod prox;

pub use admm::{nnm_svt_baseline, run_admm, update_multiplier, update_x, RunTrace, TraceRecord};
pub use prox::{dc_singular_update, prox_objective, prox_rmln, ProxParams};

use crate::error::{Error, Result};
use crate::spectral::DenseMatrix;
use crate::surrogate::{SurrogateParams, WeightStrategy};

/// The set of observed entries of a `rows x cols` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObservationMask {
    rows: usize,
    cols: usize,
    observed: Vec<bool>,
}

impl ObservationMask {
    /// Every entry observed.
    pub fn full(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            observed: vec![true; rows * cols],
        }
    }

    /// Nothing observed.
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            observed: vec![false; rows * cols],
        }
    }

    /// Row-major observed flags.
    pub fn from_flags(rows: usize, cols: usize, observed: Vec<bool>) -> Result<Self> {
        if observed.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                len: observed.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            observed,
        })
    }

    /// Builds a mask from observed `(row, col)` pairs. Pairs must be in bounds
    /// and distinct.
    pub fn from_indices(rows: usize, cols: usize, indices: &[(usize, usize)]) -> Result<Self> {
        let mut mask = Self::empty(rows, cols);
        for &(row, col) in indices {
            if row >= rows || col >= cols {
                return Err(Error::IndexOutOfBounds {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
            let slot = &mut mask.observed[row * cols + col];
            if *slot {
                return Err(Error::DuplicateIndex { row, col });
            }
            *slot = true;
        }
        Ok(mask)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_observed(&self, row: usize, col: usize) -> bool {
        self.observed[row * self.cols + col]
    }

    /// Row-major observed flags.
    pub fn flags(&self) -> &[bool] {
        &self.observed
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    pub fn missing_count(&self) -> usize {
        self.observed.len() - self.observed_count()
    }

    /// Observed `(row, col)` pairs in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.observed
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(move |(k, _)| (k / cols, k % cols))
    }

    /// The complementary mask.
    pub fn complement(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            observed: self.observed.iter().map(|o| !o).collect(),
        }
    }

    pub(crate) fn ensure_matches(&self, m: &DenseMatrix) -> Result<()> {
        if self.shape() != m.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.shape(),
                found: m.shape(),
            });
        }
        Ok(())
    }
}

/// Keeps the observed entries and zeroes the rest when `keep_observed`,
/// otherwise the reverse.
pub fn project_omega(
    m: &DenseMatrix,
    mask: &ObservationMask,
    keep_observed: bool,
) -> Result<DenseMatrix> {
    mask.ensure_matches(m)?;
    let data = m
        .as_slice()
        .iter()
        .zip(mask.flags())
        .map(|(&v, &o)| if o == keep_observed { v } else { 0.0 })
        .collect();
    Ok(DenseMatrix::from_vec_unchecked(m.rows(), m.cols(), data))
}

/// Where the difference-of-convex iteration on each singular value starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DcSeed {
    /// `sigma_i(Z^(k))`, the previous auxiliary iterate. A value that was
    /// shrunk to zero stays at zero for all later outer iterations when
    /// `p < 1`.
    PreviousIterate,
    /// Like `PreviousIterate`, but a zero previous value restarts from the
    /// singular value of the current proximal centre.
    #[default]
    PreviousOrCenter,
    /// Always start from the singular value of the proximal centre.
    Center,
}

/// Hyperparameters of the ADMM solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Regularisation weight. Zero gives pure data fidelity.
    pub lambda: f64,
    /// Initial penalty.
    pub mu0: f64,
    /// Penalty growth factor, `> 1`.
    pub rho: f64,
    /// Number of outer ADMM iterations.
    pub outer_iters: usize,
    /// Difference-of-convex steps per singular value and outer iteration.
    pub inner_iters: usize,
    pub surrogate: SurrogateParams,
    pub strategy: WeightStrategy,
    /// The returned matrix is clipped to this range.
    pub value_range: (f64, f64),
    pub dc_seed: DcSeed,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 3e5,
            mu0: 1e-3,
            rho: 1.1,
            outer_iters: 100,
            inner_iters: 5,
            surrogate: SurrogateParams::default(),
            strategy: WeightStrategy::Reweighted,
            value_range: (0.0, 255.0),
            dc_seed: DcSeed::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.surrogate.validate()?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(
                "lambda",
                format!("{} must be >= 0", self.lambda),
            ));
        }
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return Err(Error::invalid(
                "mu0",
                format!("{} must be positive", self.mu0),
            ));
        }
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return Err(Error::invalid("rho", format!("{} must exceed 1", self.rho)));
        }
        if self.outer_iters == 0 {
            return Err(Error::invalid("outer_iters", "must be at least 1"));
        }
        if self.inner_iters == 0 {
            return Err(Error::invalid("inner_iters", "must be at least 1"));
        }
        // Keeps ln(sigma^p + eps) >= 0 and every weight base positive.
        if self.surrogate.eps < 1.0 {
            return Err(Error::invalid(
                "eps",
                format!("{} must be at least 1", self.surrogate.eps),
            ));
        }
        let (lo, hi) = self.value_range;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::invalid(
                "value_range",
                format!("({lo}, {hi}) is not an increasing interval"),
            ));
        }
        Ok(())
    }

    /// `mu^(k) = mu0 * rho^k`.
    pub fn mu_at(&self, k: usize) -> f64 {
        geometric_mu(self.mu0, self.rho, k)
    }
}

pub(crate) fn geometric_mu(mu0: f64, rho: f64, k: usize) -> f64 {
    mu0 * rho.powi(k as i32)
}

/// Iterates of the ADMM solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: DenseMatrix,
    pub z: DenseMatrix,
    pub lagrange: DenseMatrix,
    pub mu0: f64,
    pub mu: f64,
    pub iter: usize,
}

impl SolverState {
    /// `X = Z = P_obs(y)`, `Lambda = 0`, `mu = mu0`.
    pub fn initial(y: &DenseMatrix, mask: &ObservationMask, mu0: f64) -> Result<Self> {
        let observed = project_omega(y, mask, true)?;
        Ok(Self {
            x: observed.clone(),
            z: observed,
            lagrange: DenseMatrix::zeros(y.rows(), y.cols()),
            mu0,
            mu: mu0,
            iter: 0,
        })
    }

    pub(crate) fn ensure_consistent(&self) -> Result<()> {
        self.x.ensure_same_shape(&self.z)?;
        self.x.ensure_same_shape(&self.lagrange)?;
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid(
                "mu",
                format!("{} must be positive", self.mu),
            ));
        }
        Ok(())
    }
}
