//! Low-rank matrix completion with a reweighted matrix logarithmic norm.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: a row-major [`DenseMatrix`] and thin SVD services.
//! - [`surrogate`]: nuclear norm, matrix logarithmic norm (MLN), its
//!   reweighted variant (RMLN) and the weight strategies.
//! - [`solver`]: the ADMM solver with a difference-of-convex inner loop on
//!   singular values, plus a singular value thresholding baseline.
//! - [`eval`]: observation masks and PSNR / SSIM scoring.
//!
//! ```
//! use rmln_core::{make_random_mask, run_admm, DenseMatrix, SolverConfig};
//!
//! let truth = DenseMatrix::from_fn(12, 12, |i, j| (i + 2 * j) as f64);
//! let mask = make_random_mask(12, 12, 0.3, 7).unwrap();
//! let cfg = SolverConfig { outer_iters: 10, ..SolverConfig::default() };
//! let (completed, trace) = run_admm(&truth, &mask, &cfg).unwrap();
//! assert_eq!(completed.shape(), (12, 12));
//! assert_eq!(trace.records.len(), 10);
//! ```

mod error;
pub mod eval;
pub mod solver;
pub mod spectral;
pub mod surrogate;
pub mod synthetic;

pub use error::{Error, Result};
pub use eval::masks::{make_block_mask, make_random_mask, BlockRect, MaskKind, MaskSpec};
pub use eval::metrics::{mse, psnr, score, ssim, QualityScore, PSNR_CAP_DB};
pub use solver::{
    dc_singular_update, nnm_svt_baseline, project_omega, prox_objective, prox_rmln, run_admm,
    update_multiplier, update_x, ObservationMask, ProxParams, RunTrace, SolverConfig, SolverState,
    TraceRecord,
};
pub use spectral::{frobenius_distance, reconstruct, svd, DenseMatrix, SpectralFactors};
pub use surrogate::{
    compute_weights, mln_value, nuclear_norm, rmln_value, scalar_surrogate_profile,
    write_profile_csv, ProfileRow, SurrogateParams, WeightStrategy, WeightVector,
};
