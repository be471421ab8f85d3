//! kinspan: genealogy data-mining pipeline.
//!
//! Subcommands chain over files or pipes: `synth` emits a profile stream,
//! `ingest` validates sources into the canonical JSON-lines schema, `graph
//! build` turns profiles into the cleaned kinship multigraph, `features
//! extract` computes the per-vertex feature table, and `stats`, `regress`,
//! and `learn` run the analyses over feature CSVs. Exit codes: 0 success,
//! 1 data error, 2 usage error.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kinspan", version, about = "Genealogy graph mining: features, lifespan statistics, regression, classifiers")]
struct Cli {
    /// Worker threads for parallel stages (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write a JSON run manifest (inputs, seed, output checksums) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a profile source into the canonical JSON-lines schema.
    Ingest(IngestArgs),
    /// Multigraph construction and persistence.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Feature extraction from a graph stream.
    Features {
        #[command(subcommand)]
        command: FeaturesCommand,
    },
    /// Lifespan variation statistics over a feature table.
    Stats {
        #[command(subcommand)]
        command: StatsCommand,
    },
    /// Simple and backward-stepwise linear regression.
    Regress {
        #[command(subcommand)]
        command: RegressCommand,
    },
    /// Classifiers: cross-validation and information-gain ranking.
    Learn {
        #[command(subcommand)]
        command: LearnCommand,
    },
    /// Generate a synthetic population with known ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Source file, or `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Source format.
    #[arg(long, value_parser = ["jsonl", "gedcom"], default_value = "jsonl")]
    format: String,
    /// Canonical JSON-lines output (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the parse report as JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Build the multigraph from a profile stream and clean it.
    Build(GraphBuildArgs),
}

#[derive(Args)]
struct GraphBuildArgs {
    /// Profile JSON-lines, or `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Stream the graph as JSON lines here (stdout when omitted and no --out-dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Persist vertices.csv, links.csv, and meta.json into this directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Skip the inconsistent-date cleaning rules.
    #[arg(long)]
    no_clean: bool,
}

#[derive(Subcommand)]
enum FeaturesCommand {
    /// Compute the per-vertex feature table from a graph stream.
    Extract(FeaturesExtractArgs),
}

#[derive(Args)]
struct FeaturesExtractArgs {
    /// Graph stream (from `graph build`), or `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Feature set selecting the table's columns.
    #[arg(long, value_parser = ["full", "all-numeric", "heritage", "nuclear-family"], default_value = "full")]
    set: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Age-of-death distribution of one quarter-century birth cohort.
    Dist(StatsDistArgs),
    /// Per-year mean/median lifespan trend.
    Trend(StatsTrendArgs),
}

#[derive(Args)]
struct StatsDistArgs {
    /// Feature table CSV, or `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Quarter start year: 1650, 1675, ..., 1875.
    #[arg(long)]
    quarter: i32,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct StatsTrendArgs {
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, default_value_t = 1650)]
    from: i32,
    #[arg(long, default_value_t = 1900)]
    to: i32,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum RegressCommand {
    /// Simple regressions of age of death on single features. Without --x,
    /// sweeps the extended-family, spouse, and children-number features over
    /// their reference datasets.
    Simple(RegressSimpleArgs),
    /// Backward stepwise multiple regression over a feature set.
    Stepwise(RegressStepwiseArgs),
}

#[derive(Args)]
struct RegressSimpleArgs {
    #[arg(default_value = "-")]
    input: String,
    /// Single feature to regress on (snake_case column name).
    #[arg(long)]
    x: Option<String>,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct RegressStepwiseArgs {
    #[arg(default_value = "-")]
    input: String,
    /// Predictor set.
    #[arg(long, value_parser = ["all-numeric", "heritage", "nuclear-family"])]
    set: String,
    /// Eliminate predictors while the worst p-value exceeds this.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum LearnCommand {
    /// Stratified k-fold cross-validation of one classifier.
    Cv(LearnCvArgs),
    /// Information-gain feature ranking.
    Rank(LearnRankArgs),
}

#[derive(Args)]
struct LearnCvArgs {
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_parser = ["one-r", "c45", "knn", "naive-bayes", "random-forest", "bagging"])]
    classifier: String,
    /// Neighbors for knn.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Members for random-forest and bagging.
    #[arg(long, default_value_t = 10)]
    trees: usize,
    /// OneR minimum majority count per interval.
    #[arg(long, default_value_t = 6)]
    min_bucket: usize,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Positive class: age_of_death at or above this.
    #[arg(long, default_value_t = 80.0)]
    positive_age: f64,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["json"], default_value = "json")]
    format: String,
}

#[derive(Args)]
struct LearnRankArgs {
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, default_value_t = 80.0)]
    positive_age: f64,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
}

/// Dataset selection: a named dataset plus predicate overrides.
///
/// Named datasets: all, us, all-10, us-10, all-50, us-50, male-10, female-10,
/// male-us-10, female-us-10, married, children-number-50,
/// male-children-number-50, female-children-number-50, no-missing-10,
/// no-missing-50. Every dataset keeps only rows with a present age_of_death;
/// us- names filter birth_country=united-states, -10/-50 filter minimum
/// lifespan, married filters spouse_number>=1, children-number requires that
/// feature, no-missing drops rows missing any column (unknown gender counts
/// as missing).
#[derive(Args, Clone)]
struct DatasetArgs {
    /// Named dataset (see long help: `--help`).
    #[arg(long)]
    dataset: Option<String>,
    /// Birth-country filter (alias or tag, e.g. "United States" or united-states).
    #[arg(long)]
    country: Option<String>,
    #[arg(long, value_parser = ["male", "female"])]
    gender: Option<String>,
    /// Minimum age of death.
    #[arg(long)]
    min_age: Option<f64>,
    /// Keep only rows married at least once.
    #[arg(long)]
    married: bool,
    /// Keep only rows where this feature is present.
    #[arg(long)]
    feature_present: Option<String>,
    /// Keep only rows with no missing value in any column.
    #[arg(long)]
    no_missing: bool,
    /// Keep only rows born in or before this year.
    #[arg(long)]
    max_birth_year: Option<i32>,
}

#[derive(Args)]
struct SynthArgs {
    /// JSON file with a full generator config; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    founders: Option<u32>,
    #[arg(long)]
    generations: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mean_children: Option<f64>,
    #[arg(long)]
    remarriage_rate: Option<f64>,
    #[arg(long)]
    missing_rate: Option<f64>,
    #[arg(long)]
    infant_mortality: Option<f64>,
    #[arg(long)]
    adult_mode: Option<f64>,
    #[arg(long)]
    adult_spread: Option<f64>,
    #[arg(long)]
    adult_skew: Option<f64>,
    #[arg(long)]
    parent_child_slope: Option<f64>,
    #[arg(long)]
    spouse_corr: Option<f64>,
    #[arg(long)]
    birth_year_start: Option<i32>,
    #[arg(long)]
    birth_year_span: Option<i32>,
    /// Birth location emitted on every profile.
    #[arg(long)]
    location: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("kinspan: could not configure {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest(args, cli.manifest.as_deref()),
        Command::Graph { command: GraphCommand::Build(args) } => {
            commands::graph_build(args, cli.manifest.as_deref())
        }
        Command::Features { command: FeaturesCommand::Extract(args) } => {
            commands::features_extract(args, cli.manifest.as_deref())
        }
        Command::Stats { command: StatsCommand::Dist(args) } => {
            commands::stats_dist(args, cli.manifest.as_deref())
        }
        Command::Stats { command: StatsCommand::Trend(args) } => {
            commands::stats_trend(args, cli.manifest.as_deref())
        }
        Command::Regress { command: RegressCommand::Simple(args) } => {
            commands::regress_simple(args, cli.manifest.as_deref())
        }
        Command::Regress { command: RegressCommand::Stepwise(args) } => {
            commands::regress_stepwise(args, cli.manifest.as_deref())
        }
        Command::Learn { command: LearnCommand::Cv(args) } => {
            commands::learn_cv(args, cli.manifest.as_deref())
        }
        Command::Learn { command: LearnCommand::Rank(args) } => {
            commands::learn_rank(args, cli.manifest.as_deref())
        }
        Command::Synth(args) => commands::synth(args, cli.manifest.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kinspan: {e:#}");
            ExitCode::from(1)
        }
    }
}
