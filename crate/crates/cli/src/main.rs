//! Command-line surface for rank fusion and evaluation.
//!
//! Subcommands: `fuse` merges TREC run files with a chosen algorithm,
//! `evaluate` scores a run against qrels, `experiment` runs the full
//! multi-group protocol from a config file, `sweep` tabulates coefficient
//! of variation across training sizes, and `curve` emits per-position
//! probability series. Data goes to stdout, diagnostics to stderr. Exit
//! codes: 0 success, 1 data error, 2 usage or config error.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use slidefuse_core::{
    build_profile, combmnz, evaluate_run, load_qrels, load_run_file, probfuse_fuse,
    probfuse_train, render_curve, render_run_file, run_experiment, segfuse_fuse, segfuse_train,
    split_queries, training_size_sweep, emit_probability_curve, Error, ExperimentConfig,
    FusedList, FusionEnsemble, MetricKind, Qrels, ResultList, SystemRun,
};

#[derive(Parser)]
#[command(name = "slidefuse", version, about = "Probabilistic rank fusion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuse TREC run files into a single run written to stdout.
    Fuse(FuseArgs),
    /// Score a run file against relevance judgments (MAP, bpref, P10).
    Evaluate(EvaluateArgs),
    /// Run the full multi-group experiment described by a config file.
    Experiment(ExperimentArgs),
    /// Coefficient-of-variation study across training-set sizes.
    Sweep(SweepArgs),
    /// Emit per-position relevance probability curves for run files.
    Curve(CurveArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Slidefuse,
    Combmnz,
    Probfuse,
    Segfuse,
}

impl AlgorithmArg {
    fn name(self) -> &'static str {
        match self {
            AlgorithmArg::Slidefuse => "slidefuse",
            AlgorithmArg::Combmnz => "combmnz",
            AlgorithmArg::Probfuse => "probfuse",
            AlgorithmArg::Segfuse => "segfuse",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Map,
    Bpref,
    P10,
}

impl From<MetricArg> for MetricKind {
    fn from(value: MetricArg) -> Self {
        match value {
            MetricArg::Map => MetricKind::Map,
            MetricArg::Bpref => MetricKind::Bpref,
            MetricArg::P10 => MetricKind::P10,
        }
    }
}

#[derive(Args)]
struct FuseArgs {
    /// Fusion algorithm.
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    /// Relevance judgments for training (required except for combmnz).
    #[arg(long)]
    qrels: Option<PathBuf>,
    /// Window halfwidth (slidefuse; default 5).
    #[arg(long)]
    w: Option<usize>,
    /// Segment count (probfuse; default 25).
    #[arg(long)]
    segments: Option<usize>,
    /// Fraction of queries used for training (default 0.1).
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Seed for the training-query shuffle (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Tag for the emitted run (defaults to the algorithm name).
    #[arg(long)]
    tag: Option<String>,
    /// TREC run files to fuse.
    #[arg(required = true)]
    runs: Vec<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// TREC run file to score.
    run: PathBuf,
    /// Relevance judgments.
    #[arg(long)]
    qrels: PathBuf,
    /// Also print one row per evaluated query.
    #[arg(long)]
    per_query: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config file (TOML).
    config: PathBuf,
    /// Report format.
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment config file (TOML).
    config: PathBuf,
    /// Training fractions to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5])]
    fractions: Vec<f64>,
    /// Measure to tabulate.
    #[arg(long, value_enum, default_value = "map")]
    metric: MetricArg,
    /// Report format.
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct CurveArgs {
    /// Relevance judgments used to estimate the probabilities.
    #[arg(long)]
    qrels: PathBuf,
    /// Window halfwidth; omit for the raw per-position series.
    #[arg(long)]
    w: Option<usize>,
    /// TREC run files to profile (every query counts as training).
    #[arg(required = true)]
    runs: Vec<PathBuf>,
}

enum CliError {
    /// Bad data in an input file: exit 1.
    Data(String),
    /// Bad flags or config: exit 2.
    Usage(String),
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        match &error {
            Error::Config(_) => CliError::Usage(error.to_string()),
            Error::File { source, .. } if matches!(**source, Error::Config(_)) => {
                CliError::Usage(error.to_string())
            }
            _ => CliError::Data(error.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fuse(args) => cmd_fuse(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Curve(args) => cmd_curve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn print_stdout(text: &str) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Data(format!("writing to stdout: {e}")))
}

fn load_runs(paths: &[PathBuf]) -> Result<Vec<SystemRun>, CliError> {
    paths
        .iter()
        .map(|p| load_run_file(p).map_err(CliError::from))
        .collect()
}

fn query_universe(runs: &[SystemRun]) -> Vec<String> {
    runs.iter()
        .flat_map(|run| run.query_ids())
        .map(String::from)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn cmd_fuse(args: FuseArgs) -> Result<(), CliError> {
    if args.algorithm == AlgorithmArg::Combmnz {
        let mut ignored = Vec::new();
        if args.train_fraction.is_some() {
            ignored.push("--train-fraction");
        }
        if args.seed.is_some() {
            ignored.push("--seed");
        }
        if args.w.is_some() {
            ignored.push("--w");
        }
        if args.segments.is_some() {
            ignored.push("--segments");
        }
        if args.qrels.is_some() {
            ignored.push("--qrels");
        }
        if !ignored.is_empty() {
            eprintln!(
                "warning: combmnz needs no training; ignoring {}",
                ignored.join(", ")
            );
        }
    }

    let runs = load_runs(&args.runs)?;
    let universe = query_universe(&runs);
    let tag = args
        .tag
        .clone()
        .unwrap_or_else(|| args.algorithm.name().to_string());

    let fused = match args.algorithm {
        AlgorithmArg::Combmnz => fuse_combmnz(&runs, &universe)?,
        trained => {
            let qrels_path = args.qrels.as_ref().ok_or_else(|| {
                CliError::Usage(format!(
                    "--qrels is required for {}",
                    args.algorithm.name()
                ))
            })?;
            let qrels = load_qrels(qrels_path)?;
            let fraction = args.train_fraction.unwrap_or(0.1);
            let seed = args.seed.unwrap_or(0);
            let (training, test) = split_queries(&universe, fraction, seed, 0)?;
            let training: BTreeSet<String> = training.into_iter().collect();
            fuse_trained(trained, &args, &runs, &qrels, &training, &test)?
        }
    };
    print_stdout(&render_run_file(&fused, &tag))
}

fn fuse_combmnz(
    runs: &[SystemRun],
    queries: &[String],
) -> Result<BTreeMap<String, FusedList>, CliError> {
    let mut fused = BTreeMap::new();
    for query_id in queries {
        let lists: Vec<&ResultList> = runs.iter().filter_map(|run| run.get(query_id)).collect();
        if lists.is_empty() {
            continue;
        }
        fused.insert(query_id.clone(), combmnz(&lists)?);
    }
    Ok(fused)
}

fn fuse_trained(
    algorithm: AlgorithmArg,
    args: &FuseArgs,
    runs: &[SystemRun],
    qrels: &Qrels,
    training: &BTreeSet<String>,
    test: &[String],
) -> Result<BTreeMap<String, FusedList>, CliError> {
    let mut fused = BTreeMap::new();
    match algorithm {
        AlgorithmArg::Slidefuse => {
            let w = args.w.unwrap_or(5);
            let profiles = runs
                .iter()
                .map(|run| build_profile(run, training, qrels))
                .collect::<Result<Vec<_>, _>>()?;
            let ensemble = FusionEnsemble::new(runs.iter().zip(profiles).collect())?;
            for query_id in test {
                fused.insert(query_id.clone(), ensemble.fuse(query_id, w));
            }
        }
        AlgorithmArg::Probfuse => {
            let segments = args.segments.unwrap_or(25);
            let profiles = runs
                .iter()
                .map(|run| probfuse_train(run, training, qrels, segments))
                .collect::<Result<Vec<_>, _>>()?;
            for query_id in test {
                let members: Vec<_> = runs
                    .iter()
                    .zip(&profiles)
                    .filter_map(|(run, profile)| run.get(query_id).map(|l| (l, profile)))
                    .collect();
                if members.is_empty() {
                    continue;
                }
                fused.insert(query_id.clone(), probfuse_fuse(&members)?);
            }
        }
        AlgorithmArg::Segfuse => {
            let profiles = runs
                .iter()
                .map(|run| segfuse_train(run, training, qrels))
                .collect::<Result<Vec<_>, _>>()?;
            for query_id in test {
                let members: Vec<_> = runs
                    .iter()
                    .zip(&profiles)
                    .filter_map(|(run, profile)| run.get(query_id).map(|l| (l, profile)))
                    .collect();
                if members.is_empty() {
                    continue;
                }
                fused.insert(query_id.clone(), segfuse_fuse(&members)?);
            }
        }
        AlgorithmArg::Combmnz => unreachable!("handled by the caller"),
    }
    Ok(fused)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let run = load_run_file(&args.run)?;
    let qrels = load_qrels(&args.qrels)?;
    let evaluation = evaluate_run(run.lists(), &qrels)?;
    let mut out = String::new();
    if args.per_query {
        out.push_str("query\tMAP\tbpref\tP10\n");
        for query_id in evaluation.map.per_query.keys() {
            out.push_str(&format!(
                "{query_id}\t{:.4}\t{:.4}\t{:.4}\n",
                evaluation.map.per_query[query_id],
                evaluation.bpref.per_query[query_id],
                evaluation.p10.per_query[query_id],
            ));
        }
        out.push_str(&format!(
            "mean\t{:.4}\t{:.4}\t{:.4}\n",
            evaluation.map.mean, evaluation.bpref.mean, evaluation.p10.mean
        ));
    } else {
        out.push_str(&format!("MAP\t{:.4}\n", evaluation.map.mean));
        out.push_str(&format!("bpref\t{:.4}\n", evaluation.bpref.mean));
        out.push_str(&format!("P10\t{:.4}\n", evaluation.p10.mean));
    }
    print_stdout(&out)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let config = ExperimentConfig::load(&args.config)?;
    let report = run_experiment(&config)?;
    let text = match args.format {
        OutputFormat::Text => report.render_text(),
        OutputFormat::Tsv => report.render_tsv(),
    };
    print_stdout(&text)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let config = ExperimentConfig::load(&args.config)?;
    for &fraction in &args.fractions {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(CliError::Usage(format!(
                "--fractions values must be in (0, 1), got {fraction}"
            )));
        }
    }
    let report = training_size_sweep(&config, &args.fractions, args.metric.into())?;
    let text = match args.format {
        OutputFormat::Text => report.render_text(),
        OutputFormat::Tsv => report.render_tsv(),
    };
    print_stdout(&text)
}

fn cmd_curve(args: CurveArgs) -> Result<(), CliError> {
    let qrels = load_qrels(&args.qrels)?;
    let runs = load_runs(&args.runs)?;
    let mut out = String::new();
    for run in &runs {
        let training: BTreeSet<String> = run.query_ids().map(String::from).collect();
        if training.is_empty() {
            return Err(CliError::Data(format!(
                "run {:?} contains no queries to profile",
                run.system_tag()
            )));
        }
        let profile = build_profile(run, &training, &qrels)?;
        out.push_str(&format!("# {}\n", run.system_tag()));
        out.push_str(&render_curve(&emit_probability_curve(&profile, args.w)));
    }
    print_stdout(&out)
}
