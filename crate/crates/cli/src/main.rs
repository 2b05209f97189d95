use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rmln_cli::plan::{parse_blocks, PlanError};
use rmln_cli::runner::score_channels;
use rmln_cli::{
    complete_channels, emit_profile, load_image, run_plan, save_image, ExperimentPlan, MaskPlan,
};
use rmln_core::{make_block_mask, make_random_mask, DenseMatrix, ObservationMask};

#[derive(Parser)]
#[command(
    name = "rmln",
    version,
    about = "Matrix completion with reweighted logarithmic norm minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degrade one image with a mask and complete it.
    Complete(CompleteArgs),
    /// Run every configuration of a plan file and write CSV reports.
    Bench(BenchArgs),
    /// Write the scalar rank / surrogate comparison as CSV.
    Profile(ProfileArgs),
    /// Write an observation mask as a black (missing) / white image.
    Mask(MaskArgs),
}

/// Keys shared with plan files; each flag overrides one key.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    mu0: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    outer_iters: Option<String>,
    #[arg(long)]
    inner_iters: Option<String>,
    /// Missing ratio(s), comma-separated.
    #[arg(long)]
    mr: Option<String>,
    /// Mask seed(s), comma-separated.
    #[arg(long)]
    seed: Option<String>,
    /// uniform, log_inverse or reweighted (comma-separated for bench).
    #[arg(long)]
    strategy: Option<String>,
    /// rmln or nnm.
    #[arg(long)]
    method: Option<String>,
    /// Missing rectangles as top:left:height:width, comma-separated.
    #[arg(long)]
    blocks: Option<String>,
}

impl Overrides {
    fn apply(&self, plan: &mut ExperimentPlan) -> Result<(), PlanError> {
        let pairs = [
            ("lambda", &self.lambda),
            ("eps", &self.eps),
            ("mu0", &self.mu0),
            ("rho", &self.rho),
            ("gamma", &self.gamma),
            ("c", &self.c),
            ("p", &self.p),
            ("outer_iters", &self.outer_iters),
            ("inner_iters", &self.inner_iters),
            ("mr", &self.mr),
            ("seeds", &self.seed),
            ("strategy", &self.strategy),
            ("method", &self.method),
            ("blocks", &self.blocks),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                plan.set(key, v)?;
            }
        }
        Ok(())
    }
}

#[derive(Args)]
struct CompleteArgs {
    /// Input image (8-bit grayscale or RGB).
    input: PathBuf,
    /// Reconstructed image path.
    #[arg(long)]
    out: PathBuf,
    /// Optional plan file supplying defaults.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Also write the degraded input here.
    #[arg(long)]
    observed: Option<PathBuf>,
    /// Write the first channel's per-iteration residual trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    out: PathBuf,
    /// Half-width of the sampled interval.
    #[arg(long, default_value_t = 255.0)]
    bound: f64,
    #[arg(long, default_value_t = 1001)]
    samples: usize,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct MaskArgs {
    #[arg(long)]
    out: PathBuf,
    /// Take the mask dimensions from this image.
    #[arg(long, conflicts_with_all = ["rows", "cols"])]
    like: Option<PathBuf>,
    #[arg(long, requires = "cols")]
    rows: Option<usize>,
    #[arg(long, requires = "rows")]
    cols: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

fn base_plan(path: Option<&PathBuf>) -> Result<ExperimentPlan, PlanError> {
    match path {
        Some(p) => ExperimentPlan::from_file(p),
        None => Ok(ExperimentPlan::default()),
    }
}

fn first_mask(plan: &ExperimentPlan, rows: usize, cols: usize) -> Result<ObservationMask> {
    let seed = plan.seeds.first().copied().unwrap_or(0);
    Ok(match &plan.mask {
        MaskPlan::Random { ratios } => {
            let mr = ratios.first().copied().unwrap_or(0.5);
            make_random_mask(rows, cols, mr, seed)?
        }
        MaskPlan::Block { blocks } => make_block_mask(rows, cols, blocks)?,
    })
}

fn complete(args: CompleteArgs) -> Result<ExitCode> {
    let mut plan = base_plan(args.plan.as_ref())?;
    args.overrides.apply(&mut plan)?;
    plan.solver.strategy = plan.strategies[0];
    plan.solver.validate().map_err(anyhow::Error::from)?;

    let image = load_image(&args.input)?;
    let (rows, cols) = image.shape();
    let mask = first_mask(&plan, rows, cols)?;
    let (completed, traces): (Vec<DenseMatrix>, Vec<_>) =
        complete_channels(&image.channels, &mask, plan.method, &plan.solver)?
            .into_iter()
            .unzip();
    save_image(&args.out, &completed)?;
    if let Some(path) = &args.observed {
        let degraded: Vec<DenseMatrix> = image
            .channels
            .iter()
            .map(|c| rmln_core::project_omega(c, &mask, true))
            .collect::<rmln_core::Result<_>>()
            .map_err(anyhow::Error::from)?;
        save_image(path, &degraded)?;
    }
    if let Some(path) = &args.trace {
        let trace = &traces[0];
        let file = std::fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        trace
            .write_csv(std::io::BufWriter::new(file))
            .context("cannot write trace")?;
    }
    let (psnr_db, ssim) = score_channels(&image.channels, &completed, image.peak)?;
    println!(
        "{}: missing {:.4}, PSNR {psnr_db:.4} dB, SSIM {ssim:.6} -> {}",
        args.input.display(),
        mask.missing_count() as f64 / (rows * cols) as f64,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let mut plan = ExperimentPlan::from_file(&args.plan)?;
    args.overrides.apply(&mut plan)?;
    if let Some(out) = args.out {
        plan.output_dir = out;
    }
    plan.validate()?;
    let outcome = run_plan(&plan)?;
    for r in rmln_cli::runner::configuration_means(&outcome.reports) {
        println!(
            "{} {} p={} mr={}: PSNR {:.4} dB, SSIM {:.6}",
            r.method, r.strategy, r.p, r.mr, r.psnr_db, r.ssim
        );
    }
    if let Some(path) = &outcome.summary_path {
        println!("summary: {}", path.display());
    }
    if let Some(path) = &outcome.sweep_path {
        println!("sweep: {}", path.display());
    }
    if outcome.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} image(s) skipped", outcome.failures.len());
        Ok(ExitCode::from(2))
    }
}

fn profile(args: ProfileArgs) -> Result<ExitCode> {
    let mut plan = ExperimentPlan::default();
    args.overrides.apply(&mut plan)?;
    plan.solver
        .surrogate
        .validate()
        .map_err(anyhow::Error::from)?;
    if args.samples < 2 || args.bound.is_nan() || args.bound <= 0.0 {
        bail!("need --samples >= 2 and a positive --bound");
    }
    let rows = emit_profile(&plan.solver.surrogate, args.bound, args.samples, &args.out)?;
    println!("{} samples -> {}", rows.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn mask(args: MaskArgs) -> Result<ExitCode> {
    let mut plan = ExperimentPlan::default();
    args.overrides.apply(&mut plan)?;
    let (rows, cols) = match (&args.like, args.rows, args.cols) {
        (Some(path), _, _) => load_image(path)?.shape(),
        (None, Some(r), Some(c)) => (r, c),
        _ => bail!("give --like or --rows/--cols"),
    };
    if let Some(b) = &args.overrides.blocks {
        plan.mask = MaskPlan::Block {
            blocks: parse_blocks("blocks", b)?,
        };
    }
    let mask = first_mask(&plan, rows, cols)?;
    let img = DenseMatrix::new(
        rows,
        cols,
        mask.flags()
            .iter()
            .map(|&o| if o { 255.0 } else { 0.0 })
            .collect(),
    )
    .map_err(anyhow::Error::from)?;
    save_image(&args.out, &[img])?;
    println!(
        "{rows}x{cols} mask, {} missing -> {}",
        mask.missing_count(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Complete(a) => complete(a),
        Command::Bench(a) => bench(a),
        Command::Profile(a) => profile(a),
        Command::Mask(a) => mask(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
