use std::io::{self, Write};

use super::prox::{prox_rmln_seeded, ProxParams};
use super::{geometric_mu, project_omega, DcSeed, ObservationMask, SolverConfig, SolverState};
use crate::error::{Error, Result};
use crate::spectral::{frobenius_distance, svd, DenseMatrix};
use crate::surrogate::compute_weights;

/// Residuals recorded after outer iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    /// Penalty used during iteration `k`.
    pub mu: f64,
    /// `||X - Z||_F`.
    pub primal_residual: f64,
    /// `||P_obs(X - Y)||_F`.
    pub data_fit: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// `k,mu,primal_residual,data_fit` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,mu,primal_residual,data_fit")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{:e},{:e},{:e}",
                r.k, r.mu, r.primal_residual, r.data_fit
            )?;
        }
        Ok(())
    }
}

/// Closed-form X-update:
/// `P_miss(Z - Lambda/mu) + P_obs((Y + mu Z - Lambda) / (1 + mu))`.
pub fn update_x(
    state: &SolverState,
    y: &DenseMatrix,
    mask: &ObservationMask,
) -> Result<DenseMatrix> {
    state.ensure_consistent()?;
    mask.ensure_matches(&state.x)?;
    state.x.ensure_same_shape(y)?;
    let mu = state.mu;
    let data = state
        .z
        .as_slice()
        .iter()
        .zip(state.lagrange.as_slice())
        .zip(y.as_slice())
        .zip(mask.flags())
        .map(|(((&z, &l), &yv), &observed)| {
            if observed {
                (yv + mu * z - l) / (1.0 + mu)
            } else {
                z - l / mu
            }
        })
        .collect();
    Ok(DenseMatrix::from_vec_unchecked(y.rows(), y.cols(), data))
}

/// Dual ascent `Lambda += mu (X - Z)` followed by `mu = mu0 * rho^(k+1)`.
pub fn update_multiplier(mut state: SolverState, rho: f64) -> Result<SolverState> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Error::invalid("rho", format!("{rho} must exceed 1")));
    }
    state.ensure_consistent()?;
    let mu = state.mu;
    for ((l, &x), &z) in state
        .lagrange
        .as_mut_slice()
        .iter_mut()
        .zip(state.x.as_slice())
        .zip(state.z.as_slice())
    {
        *l += mu * (x - z);
    }
    state.iter += 1;
    state.mu = geometric_mu(state.mu0, rho, state.iter);
    Ok(state)
}

/// Shared outer loop. `z_update(centre, sigma_z, mu)` returns the new Z and
/// its singular values.
fn admm_loop(
    y: &DenseMatrix,
    mask: &ObservationMask,
    cfg: &SolverConfig,
    mut z_update: impl FnMut(&DenseMatrix, &[f64], f64) -> Result<(DenseMatrix, Vec<f64>)>,
) -> Result<(DenseMatrix, RunTrace)> {
    cfg.validate()?;
    mask.ensure_matches(y)?;
    let observed = project_omega(y, mask, true)?;
    let mut state = SolverState::initial(&observed, mask, cfg.mu0)?;
    let mut sigma_z = svd(&state.z)?.singular_values;
    let mut trace = RunTrace::default();

    for k in 0..cfg.outer_iters {
        let mu = state.mu;
        state.x = update_x(&state, &observed, mask)?;
        let centre = state.x.zip_map(&state.lagrange, |x, l| x + l / mu);
        let (z, mut sigmas) = z_update(&centre, &sigma_z, mu)?;
        state.z = z;
        sigmas.sort_by(|a, b| b.total_cmp(a));
        sigma_z = sigmas;
        state = update_multiplier(state, cfg.rho)?;

        let primal_residual = frobenius_distance(&state.x, &state.z)?;
        let data_fit = frobenius_distance(&project_omega(&state.x, mask, true)?, &observed)?;
        trace.records.push(TraceRecord {
            k,
            mu,
            primal_residual,
            data_fit,
        });
    }

    let (lo, hi) = cfg.value_range;
    Ok((state.x.clamp(lo, hi), trace))
}

/// Completes `y` on the unobserved entries of `mask` by RMLN-regularised
/// ADMM. Entries of `y` outside the mask are ignored.
///
/// Every outer iteration recomputes the weights from the singular values of
/// the previous auxiliary iterate `Z`, then shrinks the singular values of
/// `X + Lambda / mu` with `inner_iters` DC steps at `eta = lambda / mu`.
/// Exactly `outer_iters` iterations are run; the last `X`, clipped to
/// `cfg.value_range`, is returned with the residual trace.
pub fn run_admm(
    y: &DenseMatrix,
    mask: &ObservationMask,
    cfg: &SolverConfig,
) -> Result<(DenseMatrix, RunTrace)> {
    admm_loop(y, mask, cfg, |centre, sigma_z, mu| {
        let weights = compute_weights(sigma_z, &cfg.surrogate, cfg.strategy)?;
        let prox = ProxParams::new(cfg.lambda / mu, weights, cfg.surrogate, cfg.inner_iters)?;
        prox_rmln_seeded(centre, &prox, |i, sigma_c| match cfg.dc_seed {
            DcSeed::PreviousIterate => sigma_z[i],
            DcSeed::PreviousOrCenter if sigma_z[i] == 0.0 => sigma_c,
            DcSeed::PreviousOrCenter => sigma_z[i],
            DcSeed::Center => sigma_c,
        })
    })
}

/// Nuclear-norm baseline: the same ADMM skeleton with singular value soft
/// thresholding `max(sigma - lambda / mu, 0)` as the Z-update.
pub fn nnm_svt_baseline(
    y: &DenseMatrix,
    mask: &ObservationMask,
    cfg: &SolverConfig,
) -> Result<(DenseMatrix, RunTrace)> {
    admm_loop(y, mask, cfg, |centre, _, mu| {
        let factors = svd(centre)?;
        let tau = cfg.lambda / mu;
        let shrunk: Vec<f64> = factors
            .singular_values
            .iter()
            .map(|s| (s - tau).max(0.0))
            .collect();
        Ok((factors.reconstruct_with(&shrunk)?, shrunk))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::WeightStrategy;

    fn state(x: DenseMatrix, z: DenseMatrix, l: DenseMatrix, mu: f64) -> SolverState {
        SolverState {
            x,
            z,
            lagrange: l,
            mu0: mu,
            mu,
            iter: 0,
        }
    }

    #[test]
    fn x_update_with_zero_multiplier() {
        let z = DenseMatrix::from_fn(2, 2, |i, j| (i * 2 + j) as f64 + 1.0);
        let y = DenseMatrix::from_fn(2, 2, |_, _| 5.0);
        let mask = ObservationMask::from_indices(2, 2, &[(0, 0), (1, 1)]).unwrap();
        let s = state(
            DenseMatrix::zeros(2, 2),
            z.clone(),
            DenseMatrix::zeros(2, 2),
            1.0,
        );
        let x = update_x(&s, &y, &mask).unwrap();
        assert_eq!(x[(0, 1)], z[(0, 1)]);
        assert_eq!(x[(1, 0)], z[(1, 0)]);
        assert_eq!(x[(0, 0)], (5.0 + 1.0) / 2.0);
        assert_eq!(x[(1, 1)], (5.0 + 4.0) / 2.0);
    }

    #[test]
    fn x_update_scalar() {
        let one = |v| DenseMatrix::new(1, 1, vec![v]).unwrap();
        let s = state(one(0.0), one(4.0), one(0.0), 1.0);
        let x = update_x(&s, &one(2.0), &ObservationMask::full(1, 1)).unwrap();
        assert_eq!(x[(0, 0)], 3.0);
    }

    #[test]
    fn x_update_rejects_nonpositive_mu() {
        let s = state(
            DenseMatrix::zeros(1, 1),
            DenseMatrix::zeros(1, 1),
            DenseMatrix::zeros(1, 1),
            0.0,
        );
        assert!(update_x(&s, &DenseMatrix::zeros(1, 1), &ObservationMask::full(1, 1)).is_err());
    }

    #[test]
    fn multiplier_update_cases() {
        let x = DenseMatrix::from_fn(2, 3, |i, j| (i + j) as f64);
        let l = DenseMatrix::from_fn(2, 3, |i, j| (i * j) as f64);
        let s = update_multiplier(state(x.clone(), x.clone(), l.clone(), 2.0), 1.5).unwrap();
        assert_eq!(s.lagrange, l);
        assert_eq!(s.mu, 3.0);
        assert_eq!(s.iter, 1);

        let e = DenseMatrix::from_fn(2, 3, |i, j| i as f64 - j as f64);
        let z = x.sub(&e).unwrap();
        let s = update_multiplier(state(x, z, DenseMatrix::zeros(2, 3), 2.0), 1.1).unwrap();
        assert_eq!(s.lagrange, e.scale(2.0));

        let bad = state(
            DenseMatrix::zeros(1, 1),
            DenseMatrix::zeros(1, 1),
            DenseMatrix::zeros(1, 1),
            1.0,
        );
        assert!(update_multiplier(bad, 1.0).is_err());
    }

    #[test]
    fn geometric_penalty_schedule() {
        let mut s = state(
            DenseMatrix::zeros(1, 1),
            DenseMatrix::zeros(1, 1),
            DenseMatrix::zeros(1, 1),
            1e-3,
        );
        for k in 1..=100 {
            s = update_multiplier(s, 1.1).unwrap();
            assert_eq!(s.mu, 1e-3 * 1.1f64.powi(k));
        }
    }

    #[test]
    fn pure_fidelity_with_full_observation() {
        let y = DenseMatrix::from_fn(6, 5, |i, j| ((i * 5 + j) * 7 % 255) as f64);
        let mask = ObservationMask::full(6, 5);
        let cfg = SolverConfig {
            lambda: 0.0,
            outer_iters: 20,
            ..Default::default()
        };
        let (x, trace) = run_admm(&y, &mask, &cfg).unwrap();
        assert!(frobenius_distance(&x, &y).unwrap() < 1e-6);
        assert_eq!(trace.records.len(), 20);
        let (b, _) = nnm_svt_baseline(&y, &mask, &cfg).unwrap();
        assert!(frobenius_distance(&b, &x).unwrap() < 1e-6);
    }

    #[test]
    fn unobserved_input_values_are_ignored() {
        let truth = DenseMatrix::from_fn(8, 8, |i, j| 10.0 * (i as f64 + 1.0) + j as f64);
        let mask =
            ObservationMask::from_flags(8, 8, (0..64).map(|k| k % 3 != 0).collect()).unwrap();
        let mut garbage = truth.clone();
        for (k, v) in garbage.as_mut_slice().iter_mut().enumerate() {
            if k % 3 == 0 {
                *v = 1e6;
            }
        }
        let cfg = SolverConfig {
            outer_iters: 15,
            ..Default::default()
        };
        let a = run_admm(&truth, &mask, &cfg).unwrap();
        let b = run_admm(&garbage, &mask, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_config_fails_before_iterating() {
        let y = DenseMatrix::zeros(3, 3);
        let cfg = SolverConfig {
            rho: 0.9,
            ..Default::default()
        };
        assert!(run_admm(&y, &ObservationMask::full(3, 3), &cfg).is_err());
        assert!(run_admm(&y, &ObservationMask::full(3, 4), &SolverConfig::default()).is_err());
    }

    #[test]
    fn baseline_full_shrinkage_gives_zero_z() {
        // lambda / mu0 dwarfs every singular value, so Z^(1) = 0 and the trace
        // residual equals ||X^(1)||.
        let y = DenseMatrix::from_fn(5, 5, |i, j| (i + j) as f64);
        let cfg = SolverConfig {
            outer_iters: 1,
            strategy: WeightStrategy::Uniform,
            ..Default::default()
        };
        let (x, trace) = nnm_svt_baseline(&y, &ObservationMask::full(5, 5), &cfg).unwrap();
        let r = trace.last().unwrap();
        assert!((r.primal_residual - x.frobenius_norm()).abs() < 1e-9);
    }

    #[test]
    fn trace_csv_header() {
        let trace = RunTrace {
            records: vec![TraceRecord {
                k: 0,
                mu: 1e-3,
                primal_residual: 2.0,
                data_fit: 0.5,
            }],
        };
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "k,mu,primal_residual,data_fit\n0,1e-3,2e0,5e-1\n");
    }
}
