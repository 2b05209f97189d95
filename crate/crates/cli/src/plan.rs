//! Experiment plans: a flat `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! inputs = data/images/camera.png, data/images/moon.png
//! mask = random
//! mr = 0.50, 0.65
//! seeds = 1, 2, 3
//! strategy = reweighted
//! sweep = 0.5, 0.8, 1.0
//! output_dir = out/ablation
//! lambda = 3e5
//! ```
//!
//! Arrays are comma-separated. Relative input and output paths are resolved
//! against the plan file's directory. Every key can also be set from the
//! command line through [`ExperimentPlan::set`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rmln_core::solver::DcSeed;
use rmln_core::{BlockRect, SolverConfig, WeightStrategy};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown plan key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("invalid plan: {0}")]
    Invalid(String),
    #[error("cannot read plan {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Which solver completes each channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    #[default]
    Rmln,
    /// Singular value thresholding on the nuclear norm.
    Nnm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Rmln => "rmln",
            Method::Nnm => "nnm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rmln" => Ok(Method::Rmln),
            "nnm" | "svt" => Ok(Method::Nnm),
            other => Err(format!("unknown method `{other}` (expected rmln or nnm)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaskPlan {
    /// One run per listed missing ratio.
    Random {
        ratios: Vec<f64>,
    },
    Block {
        blocks: Vec<BlockRect>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub inputs: Vec<PathBuf>,
    pub mask: MaskPlan,
    pub solver: SolverConfig,
    pub method: Method,
    /// One run per listed strategy.
    pub strategies: Vec<WeightStrategy>,
    /// Values of `p` to sweep; `None` runs the configured `p` only.
    pub sweep: Option<Vec<f64>>,
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    /// Record wall-clock time in reports. Disable for byte-reproducible CSVs.
    pub timing: bool,
    /// Write reconstructed and degraded images next to the CSVs.
    pub write_images: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            mask: MaskPlan::Random { ratios: vec![0.5] },
            solver: SolverConfig::default(),
            method: Method::Rmln,
            strategies: vec![WeightStrategy::Reweighted],
            sweep: None,
            output_dir: PathBuf::from("out"),
            seeds: vec![0],
            timing: true,
            write_images: true,
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, PlanError>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>().map_err(|e| PlanError::InvalidValue {
                key: key.to_string(),
                value: s.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

fn single<T: FromStr>(key: &str, value: &str) -> Result<T, PlanError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| PlanError::InvalidValue {
            key: key.to_string(),
            value: value.trim().to_string(),
            reason: e.to_string(),
        })
}

fn flag(key: &str, value: &str) -> Result<bool, PlanError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(PlanError::InvalidValue {
            key: key.to_string(),
            value: other.to_string(),
            reason: "expected true or false".into(),
        }),
    }
}

/// Parses `top:left:height:width`.
pub fn parse_block(s: &str) -> Result<BlockRect, String> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let [top, left, height, width] = parts.as_slice() else {
        return Err(format!("`{s}` is not top:left:height:width"));
    };
    let num = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok(BlockRect {
        top: num(top)?,
        left: num(left)?,
        height: num(height)?,
        width: num(width)?,
    })
}

pub fn parse_blocks(key: &str, value: &str) -> Result<Vec<BlockRect>, PlanError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            parse_block(s).map_err(|reason| PlanError::InvalidValue {
                key: key.to_string(),
                value: s.to_string(),
                reason,
            })
        })
        .collect()
}

impl ExperimentPlan {
    /// Sets one key. Keys accept `-` or `_` as word separators.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PlanError> {
        let norm = key.trim().to_ascii_lowercase().replace('-', "_");
        let s = &mut self.solver;
        match norm.as_str() {
            "inputs" | "input" => self.inputs = list::<PathBuf>(&norm, value)?,
            "mask" => {
                self.mask = match value.trim().to_ascii_lowercase().as_str() {
                    "random" => MaskPlan::Random { ratios: vec![0.5] },
                    "block" | "blocks" => MaskPlan::Block { blocks: Vec::new() },
                    other => {
                        return Err(PlanError::InvalidValue {
                            key: norm,
                            value: other.to_string(),
                            reason: "expected random or block".into(),
                        })
                    }
                }
            }
            "mr" | "mrs" => {
                self.mask = MaskPlan::Random {
                    ratios: list(&norm, value)?,
                }
            }
            "blocks" => {
                self.mask = MaskPlan::Block {
                    blocks: parse_blocks(&norm, value)?,
                }
            }
            "seeds" | "seed" => self.seeds = list(&norm, value)?,
            "method" => self.method = single(&norm, value)?,
            "strategy" | "strategies" => self.strategies = list(&norm, value)?,
            "sweep" => {
                let values: Vec<f64> = list(&norm, value)?;
                self.sweep = (!values.is_empty()).then_some(values);
            }
            "output_dir" | "out" => self.output_dir = PathBuf::from(value.trim()),
            "timing" => self.timing = flag(&norm, value)?,
            "write_images" => self.write_images = flag(&norm, value)?,
            "lambda" => s.lambda = single(&norm, value)?,
            "eps" => s.surrogate.eps = single(&norm, value)?,
            "mu0" => s.mu0 = single(&norm, value)?,
            "rho" => s.rho = single(&norm, value)?,
            "gamma" => s.surrogate.gamma = single(&norm, value)?,
            "c" => s.surrogate.c = single(&norm, value)?,
            "p" => s.surrogate.p = single(&norm, value)?,
            "outer_iters" | "k" => s.outer_iters = single(&norm, value)?,
            "inner_iters" | "t" => s.inner_iters = single(&norm, value)?,
            "dc_seed" => {
                s.dc_seed = match value.trim().to_ascii_lowercase().replace('-', "_").as_str() {
                    "previous" => DcSeed::PreviousIterate,
                    "previous_or_center" => DcSeed::PreviousOrCenter,
                    "center" => DcSeed::Center,
                    other => {
                        return Err(PlanError::InvalidValue {
                            key: norm,
                            value: other.to_string(),
                            reason: "expected previous, previous_or_center or center".into(),
                        })
                    }
                }
            }
            _ => return Err(PlanError::UnknownKey(key.trim().to_string())),
        }
        Ok(())
    }

    /// Parses plan text; relative paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, PlanError> {
        let mut plan = Self::default();
        let mut output_set = false;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(PlanError::Syntax {
                    line: n + 1,
                    message: format!("expected `key = value`, found `{line}`"),
                });
            };
            plan.set(key, value).map_err(|e| match e {
                PlanError::UnknownKey(_) | PlanError::InvalidValue { .. } => PlanError::Syntax {
                    line: n + 1,
                    message: e.to_string(),
                },
                other => other,
            })?;
            output_set |= matches!(
                key.trim().to_ascii_lowercase().replace('-', "_").as_str(),
                "output_dir" | "out"
            );
        }
        for p in &mut plan.inputs {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        }
        if output_set && plan.output_dir.is_relative() {
            plan.output_dir = base_dir.join(&plan.output_dir);
        }
        Ok(plan)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PlanError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| PlanError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.inputs.is_empty() {
            return Err(PlanError::Invalid(
                "at least one input image is required".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(PlanError::Invalid("at least one seed is required".into()));
        }
        if self.strategies.is_empty() {
            return Err(PlanError::Invalid(
                "at least one strategy is required".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if let Some(p) = sweep.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
                return Err(PlanError::Invalid(format!(
                    "sweep value {p} is outside (0, 1]"
                )));
            }
        }
        if let MaskPlan::Random { ratios } = &self.mask {
            if ratios.is_empty() {
                return Err(PlanError::Invalid(
                    "at least one missing ratio is required".into(),
                ));
            }
            if let Some(r) = ratios.iter().find(|r| !(0.0..1.0).contains(*r)) {
                return Err(PlanError::Invalid(format!(
                    "missing ratio {r} is outside [0, 1)"
                )));
            }
        }
        self.solver
            .validate()
            .map_err(|e| PlanError::Invalid(e.to_string()))
    }

    /// The `p` values to run.
    pub fn p_values(&self) -> Vec<f64> {
        self.sweep
            .clone()
            .unwrap_or_else(|| vec![self.solver.surrogate.p])
    }
}
