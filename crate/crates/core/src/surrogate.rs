//! Rank surrogates evaluated on singular values.
//!
//! All logarithms are natural. `0^p` is taken as `0` for every `p` in
//! `(0, 1]`, so a zero singular value contributes `ln(eps)`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spectral::{svd, DenseMatrix};

/// Parameters `(p, eps, gamma, c)` of the logarithmic surrogates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateParams {
    pub p: f64,
    pub eps: f64,
    pub gamma: f64,
    pub c: f64,
}

impl Default for SurrogateParams {
    /// `p = 0.8`, `eps = 800`, `gamma = 10`, `c = 1e-8`.
    fn default() -> Self {
        Self {
            p: 0.8,
            eps: 800.0,
            gamma: 10.0,
            c: 1e-8,
        }
    }
}

impl SurrogateParams {
    pub fn new(p: f64, eps: f64, gamma: f64, c: f64) -> Result<Self> {
        let params = Self { p, eps, gamma, c };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::invalid("p", format!("{} is outside (0, 1]", self.p)));
        }
        for (name, v) in [("eps", self.eps), ("gamma", self.gamma), ("c", self.c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        Ok(())
    }

    /// `sigma^p` with `0^p = 0`.
    #[inline]
    pub fn pow(&self, sigma: f64) -> f64 {
        if sigma == 0.0 {
            0.0
        } else {
            sigma.powf(self.p)
        }
    }

    /// `ln(sigma^p + eps)`.
    #[inline]
    pub fn log_term(&self, sigma: f64) -> f64 {
        (self.pow(sigma) + self.eps).ln()
    }
}

/// How the per-singular-value weights are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightStrategy {
    /// `w = 1`.
    Uniform,
    /// `w = gamma / (ln(sigma^p + eps) + c)`.
    LogInverse,
    /// `w = gamma * (ln(sigma^p + eps) + c)^(p - 1)`.
    #[default]
    Reweighted,
}

impl WeightStrategy {
    pub const ALL: [WeightStrategy; 3] = [Self::Uniform, Self::LogInverse, Self::Reweighted];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::LogInverse => "log_inverse",
            Self::Reweighted => "reweighted",
        }
    }
}

impl fmt::Display for WeightStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" | "a" => Ok(Self::Uniform),
            "log_inverse" | "log-inverse" | "b" => Ok(Self::LogInverse),
            "reweighted" | "c" => Ok(Self::Reweighted),
            other => Err(Error::invalid(
                "strategy",
                format!("unknown weight strategy `{other}`"),
            )),
        }
    }
}

/// Strictly positive weights, one per singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("weights", format!("{w} is not positive")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Weight for a single singular value.
pub fn weight_for(sigma: f64, params: &SurrogateParams, strategy: WeightStrategy) -> Result<f64> {
    if strategy == WeightStrategy::Uniform {
        return Ok(1.0);
    }
    let base = params.log_term(sigma) + params.c;
    if base.is_nan() || base <= 0.0 {
        return Err(Error::invalid(
            "eps",
            format!("ln(sigma^p + eps) + c = {base} is not positive at sigma = {sigma}"),
        ));
    }
    let exponent = match strategy {
        WeightStrategy::LogInverse => -1.0,
        _ => params.p - 1.0,
    };
    Ok(params.gamma * base.powf(exponent))
}

pub fn compute_weights(
    sigmas: &[f64],
    params: &SurrogateParams,
    strategy: WeightStrategy,
) -> Result<WeightVector> {
    params.validate()?;
    if let Some(s) = sigmas.iter().find(|s| s.is_nan() || **s < 0.0) {
        return Err(Error::invalid("sigmas", format!("{s} is negative")));
    }
    let weights = sigmas
        .iter()
        .map(|&s| weight_for(s, params, strategy))
        .collect::<Result<Vec<_>>>()?;
    WeightVector::new(weights)
}

pub fn nuclear_norm(m: &DenseMatrix) -> Result<f64> {
    Ok(svd(m)?.singular_values.iter().sum())
}

/// `sum_i ln(sigma_i^p + eps)` over the singular values of `m`.
pub fn mln_value(m: &DenseMatrix, params: &SurrogateParams) -> Result<f64> {
    params.validate()?;
    let sigmas = svd(m)?.singular_values;
    Ok(sigmas.iter().map(|&s| params.log_term(s)).sum())
}

/// `sum_i w_i ln(sigma_i^p + eps)` over the singular values of `m`.
pub fn rmln_value(m: &DenseMatrix, params: &SurrogateParams, w: &WeightVector) -> Result<f64> {
    params.validate()?;
    if w.len() != m.rank_bound() {
        return Err(Error::LengthMismatch {
            expected: m.rank_bound(),
            found: w.len(),
        });
    }
    let sigmas = svd(m)?.singular_values;
    Ok(sigmas
        .iter()
        .zip(w.as_slice())
        .map(|(&s, &wi)| wi * params.log_term(s))
        .sum())
}

/// One sample of the scalar comparison between rank and its surrogates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub x: f64,
    pub rank: f64,
    pub nuclear: f64,
    pub mln: f64,
    pub rmln: f64,
}

/// Evaluates rank, the convex envelope `|x| / bound`, MLN and RMLN at each
/// scalar `x` in `[-bound, bound]`. RMLN uses the reweighted weight at
/// `sigma = |x|`.
pub fn scalar_surrogate_profile(
    xs: &[f64],
    params: &SurrogateParams,
    bound: f64,
) -> Result<Vec<ProfileRow>> {
    params.validate()?;
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::invalid("bound", format!("{bound} must be positive")));
    }
    xs.iter()
        .map(|&x| {
            if !x.is_finite() || x.abs() > bound {
                return Err(Error::invalid(
                    "xs",
                    format!("{x} is outside [-{bound}, {bound}]"),
                ));
            }
            let a = x.abs();
            let mln = params.log_term(a);
            let w = weight_for(a, params, WeightStrategy::Reweighted)?;
            Ok(ProfileRow {
                x,
                rank: if x == 0.0 { 0.0 } else { 1.0 },
                nuclear: a / bound,
                mln,
                rmln: w * mln,
            })
        })
        .collect()
}

/// Formats `v` with 10 significant digits.
pub fn format_sig10(v: f64) -> String {
    format!("{v:.9e}")
}

/// Writes profile rows as `x,rank,nuclear,mln,rmln` CSV.
pub fn write_profile_csv<W: Write>(rows: &[ProfileRow], mut out: W) -> io::Result<()> {
    writeln!(out, "x,rank,nuclear,mln,rmln")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_sig10(r.x),
            format_sig10(r.rank),
            format_sig10(r.nuclear),
            format_sig10(r.mln),
            format_sig10(r.rmln)
        )?;
    }
    Ok(())
}
