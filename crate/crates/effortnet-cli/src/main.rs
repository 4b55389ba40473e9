//! `effortnet` runs effort-estimation experiments from the shell.
//!
//! Exit codes: 0 success, 1 validation error, 2 IO error, 3 numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use effortnet::cocomo::{
    compute_eaf, eaf_from_multipliers, effort_from_eaf, CostDriver, DevelopmentMode, RatingLevel,
    RatingSet,
};
use effortnet::dataset::{Dataset, FeatureEncoding, SplitPlan};
use effortnet::experiment::{
    run_experiment, ExperimentConfig, ExperimentError, ModelKind, ReportFormat,
};
use effortnet::rbnn::SolveStrategy;
use effortnet::report;

#[derive(Parser)]
#[command(name = "effortnet", version, about = "Software effort estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full comparison experiment and write reports.
    Run(RunArgs),
    /// One-off Intermediate COCOMO estimate.
    Cocomo(CocomoArgs),
    /// Print and check a split manifest.
    InspectSplit(InspectSplitArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Project data CSV.
    #[arg(long)]
    data: PathBuf,

    /// Number of training projects drawn from the dataset.
    #[arg(long, default_value_t = 53)]
    train_count: usize,

    /// Seed for the training draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Kernel width of the radial layer.
    #[arg(long, default_value_t = 0.94)]
    spread: f64,

    /// Network input features.
    #[arg(long, default_value = "size-eaf")]
    encoding: FeatureEncoding,

    /// Min-max scale features using training rows only.
    #[arg(long)]
    scale: bool,

    /// Models to run.
    #[arg(long, value_delimiter = ',', default_value = "cocomo,rbnn,grnn")]
    models: Vec<ModelKind>,

    /// Output directory for reports and manifests.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Report formats.
    #[arg(long, value_delimiter = ',', default_value = "csv,markdown")]
    format: Vec<ReportFormat>,

    /// Second-layer least-squares route for the exact-design network.
    #[arg(long, default_value_t = SolveStrategy::default())]
    solver: SolveStrategy,
}

#[derive(Args)]
struct CocomoArgs {
    /// Development mode: organic, semidetached or embedded.
    #[arg(long)]
    mode: DevelopmentMode,

    /// Project size in KDSI.
    #[arg(long)]
    size: f64,

    /// Symbolic rating, repeatable: DRIVER=LEVEL (e.g. RELY=high). Unrated
    /// drivers stay nominal.
    #[arg(long = "rating", value_name = "DRIVER=LEVEL")]
    ratings: Vec<String>,

    /// Fifteen numeric multipliers (comma separated, table row order);
    /// bypasses symbolic ratings.
    #[arg(long, value_delimiter = ',', conflicts_with = "ratings")]
    multipliers: Option<Vec<f64>>,
}

#[derive(Args)]
struct InspectSplitArgs {
    /// Path to a split.json manifest.
    #[arg(long)]
    manifest: PathBuf,

    /// Optional dataset to cross-check the manifest against.
    #[arg(long)]
    data: Option<PathBuf>,
}

fn main() -> ExitCode {
    // command-line misuse is a validation failure (exit 1), not clap's 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Cocomo(args) => cocomo(args),
        Command::InspectSplit(args) => inspect_split(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<ExperimentError>()
                .map(ExperimentError::exit_code)
                .unwrap_or(1);
            ExitCode::from(code as u8)
        }
    }
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let config = ExperimentConfig {
        data_path: args.data,
        train_count: args.train_count,
        seed: args.seed,
        spread: args.spread,
        encoding: args.encoding,
        scale: args.scale,
        models: args.models,
        output_dir: args.out,
        formats: args.format,
        solver: args.solver,
    };
    let artifacts = run_experiment(&config)?;
    let written = report::emit(&artifacts, &config.output_dir)?;

    for warning in &artifacts.warnings {
        eprintln!("warning: {warning}");
    }
    for run in &artifacts.runs {
        if run.non_positive_predictions > 0 {
            eprintln!(
                "warning: {}: {} non-positive prediction(s); excluded from BRE only",
                run.model, run.non_positive_predictions
            );
        }
    }

    println!("model      mare%    vare%  meanBRE    mmre%  pred40%");
    for run in &artifacts.runs {
        println!(
            "{:<8} {:>8} {:>8} {:>8} {:>8} {:>8}",
            run.model.name(),
            report::format_metric(run.report.mare_pct),
            report::format_metric(run.report.vare_pct),
            report::format_metric(run.report.mean_bre),
            report::format_metric(run.report.mmre_pct),
            report::format_metric(run.report.pred[&40]),
        );
    }
    println!("wrote {} files to {}", written.len(), config.output_dir.display());
    Ok(())
}

fn cocomo(args: CocomoArgs) -> anyhow::Result<()> {
    let eaf = match &args.multipliers {
        Some(values) => {
            if values.len() != 15 {
                anyhow::bail!("--multipliers needs exactly 15 values, got {}", values.len());
            }
            let mut multipliers = [0.0_f64; 15];
            multipliers.copy_from_slice(values);
            eaf_from_multipliers(&multipliers)
        }
        None => {
            let mut pairs = Vec::new();
            for raw in &args.ratings {
                let (driver, level) = raw.split_once('=').ok_or_else(|| {
                    anyhow::anyhow!("rating `{raw}` is not of the form DRIVER=LEVEL")
                })?;
                pairs.push((CostDriver::parse(driver)?, RatingLevel::parse(level)?));
            }
            compute_eaf(&RatingSet::from_pairs(&pairs)?)?
        }
    };
    let effort = effort_from_eaf(args.mode, args.size, eaf)?;
    let (a, b) = args.mode.coefficients();
    println!("mode:   {} (a={a}, b={b})", args.mode);
    println!("EAF:    {eaf:.2}");
    println!("effort: {effort:.2} man-months");
    Ok(())
}

fn inspect_split(args: InspectSplitArgs) -> anyhow::Result<()> {
    let plan = SplitPlan::load(&args.manifest).map_err(ExperimentError::Dataset)?;
    println!("seed:        {}", plan.seed);
    println!("generator:   {}", plan.generator);
    println!("train count: {}", plan.train_count);
    let ids: Vec<String> = plan.train_ids.iter().map(u32::to_string).collect();
    println!("train ids:   {}", ids.join(", "));

    if let Some(data) = &args.data {
        let dataset = Dataset::load_csv(data).map_err(ExperimentError::Dataset)?;
        for id in &plan.train_ids {
            if dataset.by_id(*id).is_none() {
                anyhow::bail!("manifest id {id} is not present in {}", data.display());
            }
        }
        println!("dataset:     {} projects, all manifest ids present", dataset.len());
        println!("test set:    all {} projects", dataset.len());
    }
    Ok(())
}
