use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use rmln_core::{
    make_block_mask, make_random_mask, nnm_svt_baseline, project_omega, psnr, run_admm, ssim,
    DenseMatrix, ObservationMask, RunTrace, SolverConfig, WeightStrategy,
};

use crate::image_io::{load_image, save_image, LoadedImage};
use crate::plan::{ExperimentPlan, MaskPlan, Method};

pub const SUMMARY_HEADER: &str = "image,method,strategy,p,mr,seed,psnr_db,ssim,seconds,iters";

/// Scores of one completed image (channel metrics averaged).
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub image: String,
    /// `"mean"` for the channel aggregate.
    pub channel: String,
    pub method: Method,
    pub strategy: WeightStrategy,
    pub p: f64,
    /// Fraction of missing pixels.
    pub mr: f64,
    /// `"random"` or the block list.
    pub mask: String,
    pub seed: u64,
    pub psnr_db: f64,
    pub ssim: f64,
    pub seconds: f64,
    pub iterations: usize,
}

impl RunReport {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.4},{:.6},{:.3},{}",
            self.image,
            self.method,
            self.strategy,
            self.p,
            self.mr,
            self.seed,
            self.psnr_db,
            self.ssim,
            self.seconds,
            self.iterations
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageFailure {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct PlanOutcome {
    pub reports: Vec<RunReport>,
    pub failures: Vec<ImageFailure>,
    pub summary_path: Option<PathBuf>,
    /// Written only when the plan sweeps `p`.
    pub sweep_path: Option<PathBuf>,
}

pub fn solve_channel(
    channel: &DenseMatrix,
    mask: &ObservationMask,
    method: Method,
    cfg: &SolverConfig,
) -> Result<(DenseMatrix, RunTrace)> {
    Ok(match method {
        Method::Rmln => run_admm(channel, mask, cfg)?,
        Method::Nnm => nnm_svt_baseline(channel, mask, cfg)?,
    })
}

/// Runs the chosen method on each channel independently (in parallel) with a
/// shared mask. Results are in channel order.
pub fn complete_channels(
    channels: &[DenseMatrix],
    mask: &ObservationMask,
    method: Method,
    cfg: &SolverConfig,
) -> Result<Vec<(DenseMatrix, RunTrace)>> {
    channels
        .par_iter()
        .map(|c| solve_channel(c, mask, method, cfg))
        .collect()
}

/// Channel-mean PSNR and SSIM.
pub fn score_channels(
    reference: &[DenseMatrix],
    test: &[DenseMatrix],
    peak: f64,
) -> Result<(f64, f64)> {
    let n = reference.len() as f64;
    let mut total_psnr = 0.0;
    let mut total_ssim = 0.0;
    for (r, t) in reference.iter().zip(test) {
        total_psnr += psnr(r, t, peak)?;
        total_ssim += ssim(r, t, peak)?;
    }
    Ok((total_psnr / n, total_ssim / n))
}

struct WorkItem {
    mr_label: Option<f64>,
    seed: u64,
    strategy: WeightStrategy,
    p: f64,
}

fn tag(v: f64) -> String {
    format!("{v}").replace('.', "_")
}

fn image_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn build_mask(
    plan: &ExperimentPlan,
    rows: usize,
    cols: usize,
    item: &WorkItem,
) -> Result<ObservationMask> {
    Ok(match (&plan.mask, item.mr_label) {
        (MaskPlan::Random { .. }, Some(mr)) => make_random_mask(rows, cols, mr, item.seed)?,
        (MaskPlan::Block { blocks }, _) => make_block_mask(rows, cols, blocks)?,
        (MaskPlan::Random { .. }, None) => unreachable!("random items carry a ratio"),
    })
}

fn run_image(
    plan: &ExperimentPlan,
    path: &Path,
    image: &LoadedImage,
    items: &[WorkItem],
) -> Result<Vec<RunReport>> {
    let id = image_id(path);
    let (rows, cols) = image.shape();
    let mask_desc = match &plan.mask {
        MaskPlan::Random { .. } => "random".to_string(),
        MaskPlan::Block { blocks } => blocks
            .iter()
            .map(|b| format!("{}:{}:{}:{}", b.top, b.left, b.height, b.width))
            .collect::<Vec<_>>()
            .join(";"),
    };

    items
        .par_iter()
        .map(|item| {
            let mask = build_mask(plan, rows, cols, item)?;
            let mr = mask.missing_count() as f64 / (rows * cols) as f64;
            let mut cfg = plan.solver.clone();
            cfg.strategy = item.strategy;
            cfg.surrogate.p = item.p;

            let start = Instant::now();
            let completed: Vec<DenseMatrix> =
                complete_channels(&image.channels, &mask, plan.method, &cfg)?
                    .into_iter()
                    .map(|(x, _)| x)
                    .collect();
            let seconds = if plan.timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            };
            let (psnr_db, ssim) = score_channels(&image.channels, &completed, image.peak)?;

            if plan.write_images {
                let mr_tag = tag(item.mr_label.unwrap_or(mr));
                let stem = format!(
                    "{id}__{}_{}_p{}_mr{mr_tag}_seed{}",
                    plan.method,
                    item.strategy,
                    tag(item.p),
                    item.seed
                );
                save_image(plan.output_dir.join(format!("{stem}.png")), &completed)?;
                let degraded = image
                    .channels
                    .iter()
                    .map(|c| project_omega(c, &mask, true))
                    .collect::<rmln_core::Result<Vec<_>>>()?;
                let observed = plan
                    .output_dir
                    .join(format!("{id}__observed_mr{mr_tag}_seed{}.png", item.seed));
                save_image(observed, &degraded)?;
            }

            Ok(RunReport {
                image: id.clone(),
                channel: "mean".into(),
                method: plan.method,
                strategy: item.strategy,
                p: item.p,
                mr: item.mr_label.unwrap_or(mr),
                mask: mask_desc.clone(),
                seed: item.seed,
                psnr_db,
                ssim,
                seconds,
                iterations: cfg.outer_iters,
            })
        })
        .collect()
}

/// Executes every (image, missing ratio, seed, strategy, p) combination,
/// writes the reconstructed images and `summary.csv` into the output
/// directory, and returns the reports. An image that fails is recorded in
/// [`PlanOutcome::failures`] and skipped.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PlanOutcome> {
    plan.validate()?;
    fs::create_dir_all(&plan.output_dir)
        .with_context(|| format!("cannot create {}", plan.output_dir.display()))?;

    let ratios: Vec<Option<f64>> = match &plan.mask {
        MaskPlan::Random { ratios } => ratios.iter().copied().map(Some).collect(),
        MaskPlan::Block { .. } => vec![None],
    };
    let mut items = Vec::new();
    for &mr_label in &ratios {
        for &seed in &plan.seeds {
            for &strategy in &plan.strategies {
                for p in plan.p_values() {
                    items.push(WorkItem {
                        mr_label,
                        seed,
                        strategy,
                        p,
                    });
                }
            }
        }
    }

    let mut outcome = PlanOutcome::default();
    for path in &plan.inputs {
        let result = load_image(path).and_then(|img| run_image(plan, path, &img, &items));
        match result {
            Ok(reports) => outcome.reports.extend(reports),
            Err(e) => {
                let message = format!("{e:#}");
                eprintln!("skipping {}: {message}", path.display());
                outcome.failures.push(ImageFailure {
                    path: path.clone(),
                    message,
                });
            }
        }
    }

    let summary_path = plan.output_dir.join("summary.csv");
    fs::write(&summary_path, summary_csv(&outcome.reports))
        .with_context(|| format!("cannot write {}", summary_path.display()))?;
    outcome.summary_path = Some(summary_path);
    if plan.sweep.is_some() {
        let sweep_path = plan.output_dir.join("sweep.csv");
        fs::write(&sweep_path, sweep_csv(&outcome.reports))
            .with_context(|| format!("cannot write {}", sweep_path.display()))?;
        outcome.sweep_path = Some(sweep_path);
    }
    Ok(outcome)
}

/// Per-run rows followed by one `mean` row per configuration
/// (method, strategy, p, mr), averaged over images and seeds.
pub fn summary_csv(reports: &[RunReport]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    for group in configuration_means(reports) {
        let _ = writeln!(
            out,
            "mean,{},{},{},{},all,{:.4},{:.6},{:.3},{}",
            group.method,
            group.strategy,
            group.p,
            group.mr,
            group.psnr_db,
            group.ssim,
            group.seconds,
            group.iterations
        );
    }
    out
}

pub const SWEEP_HEADER: &str = "method,strategy,mr,p,psnr_db,ssim,best";

/// Mean PSNR per `p` for each (method, strategy, mr); `best` is 1 on the
/// highest-PSNR row of each group (first one on ties).
pub fn sweep_csv(reports: &[RunReport]) -> String {
    let means = configuration_means(reports);
    let mut out = format!("{SWEEP_HEADER}\n");
    let same_group = |a: &RunReport, b: &RunReport| {
        a.method == b.method && a.strategy == b.strategy && a.mr == b.mr
    };
    for r in &means {
        let best = means
            .iter()
            .filter(|g| same_group(g, r))
            .reduce(|a, b| if b.psnr_db > a.psnr_db { b } else { a })
            .is_some_and(|b| std::ptr::eq(b, r));
        let _ = writeln!(
            out,
            "{},{},{},{},{:.4},{:.6},{}",
            r.method,
            r.strategy,
            r.mr,
            r.p,
            r.psnr_db,
            r.ssim,
            u8::from(best)
        );
    }
    out
}

/// Means of PSNR / SSIM / time over images and seeds for each
/// (method, strategy, p, mr), in first-appearance order.
pub fn configuration_means(reports: &[RunReport]) -> Vec<RunReport> {
    let mut groups: Vec<(RunReport, usize)> = Vec::new();
    for r in reports {
        let key = |g: &RunReport| {
            g.method == r.method && g.strategy == r.strategy && g.p == r.p && g.mr == r.mr
        };
        match groups.iter_mut().find(|(g, _)| key(g)) {
            Some((g, n)) => {
                g.psnr_db += r.psnr_db;
                g.ssim += r.ssim;
                g.seconds += r.seconds;
                *n += 1;
            }
            None => {
                let mut g = r.clone();
                g.image = "mean".into();
                groups.push((g, 1));
            }
        }
    }
    groups
        .into_iter()
        .map(|(mut g, n)| {
            let n = n as f64;
            g.psnr_db /= n;
            g.ssim /= n;
            g.seconds /= n;
            g
        })
        .collect()
}
