//! `driftlab` — synthetic process-curve datasets and drift-detector
//! benchmarking from the command line.
//!
//! Four subcommands cover the workflow end to end: `generate` writes a
//! dataset directory, `detect` scores one detector over it, `score` turns a
//! score series plus ground truth into ranking metrics, and `bench` sweeps
//! detectors across datasets and seeds.
//!
//! Exit codes are a stable contract: 0 success, 2 usage or input error,
//! 3 numeric failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use driftlab_core::io::{self, MatrixFormat, MetricReport};
use driftlab_core::{
    emit_report, generate, preset, run_bench, score, threshold_curve, BenchSpec, CurveKind,
    DatasetSpec, DetectorSpec, Error, GroundTruth, Result,
};

#[derive(Parser)]
#[command(
    name = "driftlab",
    version,
    about = "Synthetic process-curve datasets and drift-detector benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset directory from a preset or a spec file
    Generate(GenerateArgs),
    /// Score one detector over a dataset directory
    Detect(DetectArgs),
    /// Evaluate ranking metrics for a score series against ground truth
    Score(ScoreArgs),
    /// Run a detector benchmark sweep and emit its report files
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output directory (created if missing; its parent must exist)
    out_dir: PathBuf,
    /// Dataset spec JSON file; mutually exclusive with --preset
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    spec: Option<PathBuf>,
    /// Built-in preset: dataset-1, dataset-2, or dataset-3
    #[arg(long, value_name = "NAME", required_unless_present = "spec")]
    preset: Option<String>,
    /// Execution-count multiplier applied to the preset
    #[arg(long, default_value_t = 1.0, conflicts_with = "spec")]
    scale: f64,
    /// Master seed for the preset
    #[arg(long, default_value_t = 0, conflicts_with = "spec")]
    seed: u64,
    /// On-disk matrix format for curves, grid, and latents
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct DetectArgs {
    /// Dataset directory produced by `generate`
    dataset_dir: PathBuf,
    /// Detector spec JSON file
    detector: PathBuf,
    /// Output path for the score series CSV (one value per line)
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Ground-truth JSON file
    ground_truth: PathBuf,
    /// Score series CSV (one value per execution)
    scores: PathBuf,
    /// Output path for the metric report JSON
    report: PathBuf,
    /// Also write threshold-curve points (fpr,value CSV) to this path
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
    /// Which threshold curve to export
    #[arg(long, value_enum, default_value_t = CurveArg::Ols, requires = "curve")]
    curve_kind: CurveArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark spec JSON file
    spec: PathBuf,
    /// Output directory; overrides `output_dir` from the spec
    out_dir: Option<PathBuf>,
}

/// On-disk matrix format flag.
#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    /// Plain-text CSV, diffable and language-neutral
    Csv,
    /// Little-endian binary rows behind a DRIFTBIN header
    Packed,
}

impl From<FormatArg> for MatrixFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Csv => MatrixFormat::Csv,
            FormatArg::Packed => MatrixFormat::Packed,
        }
    }
}

/// Threshold-curve selector for `score --curve`.
#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    /// Overlap-per-false-positive-rate curve
    Ols,
    /// Softened overlap curve
    Sols,
    /// True-positive-rate curve
    Tpr,
}

impl From<CurveArg> for CurveKind {
    fn from(value: CurveArg) -> Self {
        match value {
            CurveArg::Ols => CurveKind::Ols,
            CurveArg::Sols => CurveKind::Sols,
            CurveArg::Tpr => CurveKind::Tpr,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Score(args) => cmd_score(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut cause = std::error::Error::source(&err);
            while let Some(c) = cause {
                eprintln!("  caused by: {c}");
                cause = c.source();
            }
            ExitCode::from(exit_class(&err))
        }
    }
}

/// Map an error to the exit-code contract: 3 for numeric failures anywhere
/// in the chain, 2 for everything else (usage, configuration, input, I/O).
fn exit_class(err: &Error) -> u8 {
    match err {
        Error::NumericFailure { .. } => 3,
        Error::BenchTriple { source, .. } => exit_class(source),
        _ => 2,
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let spec: DatasetSpec = match (&args.spec, &args.preset) {
        (Some(path), None) => io::read_json(path)?,
        (None, Some(name)) => preset(name, args.scale, args.seed)?,
        _ => unreachable!("clap enforces exactly one dataset source"),
    };
    check_parent(&args.out_dir)?;
    let data = generate(&spec)?;
    io::write_dataset(&args.out_dir, &data, args.format.into())?;
    let max_residual = data.solver_report.iter().cloned().fold(0.0, f64::max);
    println!(
        "T={} m={} segments={} max_residual={max_residual:.3e}",
        data.curves.nrows(),
        data.curves.ncols(),
        data.ground_truth.segments().len(),
    );
    Ok(())
}

/// The dataset directory itself is created on demand, but a missing parent
/// is treated as a usage error rather than silently materialised.
fn check_parent(dir: &Path) -> Result<()> {
    match dir.parent() {
        Some(parent) if !parent.as_os_str().is_empty() && !parent.exists() => Err(Error::config(
            format!("parent directory {} does not exist", parent.display()),
        )),
        _ => Ok(()),
    }
}

fn cmd_detect(args: &DetectArgs) -> Result<()> {
    let dataset = io::read_dataset(&args.dataset_dir)?;
    let spec: DetectorSpec = io::read_json(&args.detector)?;
    let scores = score(&spec, dataset.curves.view(), dataset.sample_grids.view())?;
    io::write_scores(&args.out, &scores)?;
    println!("{spec}: wrote {} scores", scores.len());
    Ok(())
}

fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let gt: GroundTruth = io::read_json(&args.ground_truth)?;
    let scores = io::read_scores(&args.scores)?;
    let report = MetricReport::compute(&gt, &scores)?;
    io::write_json(&args.report, &report)?;
    if let Some(curve_path) = &args.curve {
        let curve = threshold_curve(&gt, &scores, args.curve_kind.into())?;
        let text = io::curve_points_csv(&curve.collapsed());
        std::fs::write(curve_path, text)
            .map_err(|e| Error::io(curve_path.display().to_string(), e))?;
    }
    println!(
        "tauc_step={:.6} tauc_trapezoid={:.6} stauc_step={:.6} stauc_trapezoid={:.6} auc={:.6}",
        report.tauc_step, report.tauc_trapezoid, report.stauc_step, report.stauc_trapezoid,
        report.auc,
    );
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let spec: BenchSpec = io::read_json(&args.spec)?;
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| spec.output_dir.clone())
        .ok_or_else(|| {
            Error::config("no output directory: pass one after the spec or set output_dir in it")
        })?;
    check_parent(&out_dir)?;
    let result = run_bench(&spec)?;
    emit_report(&result, &out_dir)?;
    println!(
        "{} result rows across {} datasets -> {}",
        result.rows.len(),
        result.correlations.len(),
        out_dir.display()
    );
    Ok(())
}
