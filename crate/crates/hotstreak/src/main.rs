use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hotstreak::parallel::par_batch_analyze;
use hotstreak::report::{
    bias_csv, significance_csv, summary_csv, to_json, BiasCell, HistogramDocument, HistogramRecord,
    PValueDocument, ResultRecord, ResultsDocument, SummaryDocument,
};
use hotstreak::shotlog::{parse_shot_log, Validation};
use hotstreak::output::write_atomic;
use hotstreak_core::analysis::{
    analyze_observation, null_component_histograms, null_histogram, pvalue_distribution_report,
    significance_counts, summarize_dataset, AnalysisError, ConfigGrid, ObservationKey,
    ObservationResult, Scope, TestedObservation, UntestableReason, Verdict, DEFAULT_BINS,
};
use hotstreak_core::resampling::{
    bernoulli_null, exact_null, null_mean_bias, p_value, NullModel, TestConfig, DEFAULT_ALPHA, DEFAULT_RESAMPLES,
    DEFAULT_SEED,
};
use hotstreak_core::{Depth, Error as CoreError, ShotString, Statistic};
use thiserror::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_UNTESTABLE: u8 = 3;
const EXIT_DATA: u8 = 4;
const EXIT_CAP: u8 = 5;

#[derive(Parser)]
#[command(name = "hotstreak", version, about = "Permutation tests for streaks in hit/miss sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a single shot string.
    Analyze(AnalyzeArgs),
    /// Test every observation of a shot log and write result files.
    Batch(BatchArgs),
    /// Tabulate the exact null mean of a statistic over (length, hits) cells.
    Bias(BiasArgs),
    /// Summarize the p-values in a results.json file.
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatArg {
    Tk,
    TkHit,
}

impl From<StatArg> for Statistic {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::Tk => Statistic::Tk,
            StatArg::TkHit => Statistic::TkHit,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NullArg {
    Perm,
    BernGame,
    BernSeason,
}

impl From<NullArg> for NullModel {
    fn from(n: NullArg) -> Self {
        match n {
            NullArg::Perm => NullModel::Permutation,
            NullArg::BernGame => NullModel::BernoulliGame,
            NullArg::BernSeason => NullModel::BernoulliSeason,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Human,
    Json,
}

fn parse_depth(s: &str) -> Result<Depth, String> {
    let k: usize = s.parse().map_err(|_| format!("`{s}` is not a positive integer"))?;
    Depth::new(k).map_err(|e| e.to_string())
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err("alpha must lie strictly between 0 and 1".into())
    }
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err("probability must lie in [0, 1]".into())
    }
}

fn parse_shots(s: &str) -> Result<ShotString, String> {
    let shots: ShotString = s.parse().map_err(|e: hotstreak_core::ParseShotsError| e.to_string())?;
    if shots.is_empty() {
        return Err("shot string is empty".into());
    }
    Ok(shots)
}

fn parse_bins(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err("bins must be a positive integer".into()),
    }
}

/// Inclusive range `A-B` or a single value.
fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('-').unwrap_or((s, s));
    let a: usize = a.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a, b))
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Shot string of 0s and 1s.
    #[arg(long, value_parser = parse_shots)]
    shots: ShotString,
    #[arg(long, default_value = "2", value_parser = parse_depth)]
    k: Depth,
    #[arg(long, value_enum, default_value = "tk")]
    stat: StatArg,
    #[arg(long = "null", value_enum, default_value = "perm")]
    null_model: NullArg,
    #[arg(long, default_value_t = DEFAULT_RESAMPLES, value_parser = clap::value_parser!(u64).range(1..))]
    resamples: u64,
    /// Enumerate every arrangement instead of sampling (permutation null only).
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA, value_parser = parse_alpha)]
    alpha: f64,
    /// Hit probability for Bernoulli nulls; defaults to the string's own rate
    /// for bern-game and is required for bern-season.
    #[arg(long, value_parser = parse_probability)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Also write null histograms (statistic and both components) as JSON.
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BINS, value_parser = parse_bins)]
    bins: usize,
}

#[derive(Args)]
struct BatchArgs {
    /// Shot log in `subject,date,opponent,scope,shots` CSV format.
    #[arg(long)]
    input: PathBuf,
    /// Directory for results.json, summary.json, summary.csv and significance.csv.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "2", value_parser = parse_depth)]
    k: Vec<Depth>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "tk")]
    stat: Vec<StatArg>,
    #[arg(long = "null", value_enum, value_delimiter = ',', default_value = "perm")]
    null_model: Vec<NullArg>,
    #[arg(long, default_value_t = DEFAULT_RESAMPLES, value_parser = clap::value_parser!(u64).range(1..))]
    resamples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA, value_parser = parse_alpha)]
    alpha: f64,
    /// Skip and report invalid rows instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct BiasArgs {
    /// String lengths, `A-B` inclusive.
    #[arg(long, value_parser = parse_range)]
    lengths: (usize, usize),
    /// Hit counts, `A-B` inclusive; defaults to 0..=L for each length.
    #[arg(long, value_parser = parse_range)]
    hits: Option<(usize, usize)>,
    #[arg(long, default_value = "1", value_parser = parse_depth)]
    k: Depth,
    #[arg(long, value_enum, default_value = "tk")]
    stat: StatArg,
    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// results.json from a batch run.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "2", value_parser = parse_depth)]
    k: Depth,
    #[arg(long, value_enum, default_value = "tk")]
    stat: StatArg,
    #[arg(long = "null", value_enum, default_value = "perm")]
    null_model: NullArg,
    /// Write the p-value distribution JSON here.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("untestable observation: {0}")]
    Untestable(UntestableReason),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Cap(CoreError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Untestable(_) => EXIT_UNTESTABLE,
            CliError::Data(_) | CliError::Io { .. } => EXIT_DATA,
            CliError::Cap(_) => EXIT_CAP,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::CapExceeded { .. } => CliError::Cap(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Untestable(r) => CliError::Untestable(r),
            AnalysisError::Invalid(e) => e.into(),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents.as_bytes()).map_err(|source| CliError::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let cfg = TestConfig {
        depth: args.k,
        statistic: args.stat.into(),
        null_model: args.null_model.into(),
        resamples: args.resamples,
        seed: args.seed,
        alpha: args.alpha,
    };
    if args.exact && cfg.null_model != NullModel::Permutation {
        return Err(CliError::Usage("--exact applies only to the permutation null".into()));
    }
    if cfg.null_model == NullModel::BernoulliSeason && args.p.is_none() {
        return Err(CliError::Usage("--null bern-season needs --p".into()));
    }
    if cfg.null_model == NullModel::Permutation && args.p.is_some() {
        return Err(CliError::Usage("--p applies only to Bernoulli nulls".into()));
    }

    let tested = if args.exact {
        let observed = cfg.statistic.evaluate(&args.shots, cfg.depth);
        if !observed.is_defined() {
            return Err(CliError::Untestable(UntestableReason::UndefinedStatistic));
        }
        let null = exact_null(&args.shots, &cfg)?;
        let p_value = p_value(observed, &null).expect("defined observation");
        TestedObservation {
            observed: observed.fraction().expect("defined"),
            significant: p_value.is_significant(cfg.alpha),
            p_value,
        }
    } else if let (NullModel::BernoulliGame | NullModel::BernoulliSeason, Some(rate)) = (cfg.null_model, args.p) {
        let observed = cfg.statistic.evaluate(&args.shots, cfg.depth);
        let Some(value) = observed.fraction() else {
            return Err(CliError::Untestable(UntestableReason::UndefinedStatistic));
        };
        let null = bernoulli_null(args.shots.len(), rate, &cfg)?;
        let p_value = p_value(observed, &null).expect("defined observation");
        TestedObservation {
            observed: value,
            significant: p_value.is_significant(cfg.alpha),
            p_value,
        }
    } else {
        analyze_observation(&args.shots, &cfg, None)?
    };

    let result = ObservationResult {
        key: ObservationKey {
            subject: "cli".into(),
            date: String::new(),
            opponent: String::new(),
            scope: Scope::Game,
        },
        shots: args.shots.len(),
        hits: args.shots.hits(),
        config: cfg,
        observed: tested.observed.into(),
        verdict: Verdict::Tested {
            p_value: tested.p_value,
            significant: tested.significant,
        },
    };

    if let Some(path) = &args.histogram {
        if cfg.null_model != NullModel::Permutation {
            return Err(CliError::Usage("--histogram needs the permutation null".into()));
        }
        let mut histograms = Vec::new();
        if args.exact {
            let null = exact_null(&args.shots, &cfg)?;
            let h = null_histogram(&null, tested.observed.into(), cfg.alpha, args.bins);
            histograms.push(HistogramRecord::new(cfg.statistic, cfg.depth, &h));
        } else {
            let c = null_component_histograms(&args.shots, &cfg, args.bins)?;
            for (stat, h) in [(Statistic::Tk, &c.tk), (Statistic::TkHit, &c.hit), (Statistic::TkMiss, &c.miss)] {
                histograms.push(HistogramRecord::new(stat, cfg.depth, h));
            }
        }
        write_file(path, &to_json(&HistogramDocument::new(args.shots.to_string(), histograms)))?;
    }

    match args.format {
        Format::Json => {
            let mut record = serde_json::to_value(ResultRecord::from(&result)).expect("serializable");
            let obj = record.as_object_mut().expect("object");
            for key in ["subject", "date", "opponent", "scope"] {
                obj.remove(key);
            }
            obj.insert("exact".into(), args.exact.into());
            println!("{}", serde_json::to_string_pretty(&record).expect("serializable"));
        }
        Format::Human => {
            let p = tested.p_value;
            println!("shots        {} (L={}, hits={})", args.shots, args.shots.len(), args.shots.hits());
            println!(
                "statistic    {} (k={}) = {} ({:.6})",
                cfg.statistic,
                cfg.depth,
                tested.observed,
                *tested.observed.numer() as f64 / *tested.observed.denom() as f64
            );
            let null = if args.exact {
                format!("exact permutation, {} arrangements", p.total_draws)
            } else {
                format!("{}, {} draws, seed {}", cfg.null_model, p.total_draws, cfg.seed)
            };
            println!("null         {null}");
            println!(
                "p-value      {:.6} ({} exceed, {} undefined)",
                p.value(),
                p.exceed_count,
                p.total_draws - p.defined_draws
            );
            println!(
                "verdict      {} at alpha = {}",
                if tested.significant { "significant" } else { "not significant" },
                cfg.alpha
            );
        }
    }
    Ok(())
}

fn run_batch(args: BatchArgs) -> Result<(), CliError> {
    let text = read_input(&args.input)?;
    let validation = if args.lenient { Validation::Lenient } else { Validation::Strict };
    let log = parse_shot_log(&text, validation)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    for skipped in &log.skipped {
        eprintln!("{}: skipped {skipped}", args.input.display());
    }
    let grid = ConfigGrid {
        statistics: args.stat.iter().map(|&s| s.into()).collect(),
        depths: args.k.clone(),
        null_models: args.null_model.iter().map(|&n| n.into()).collect(),
        resamples: args.resamples,
        master_seed: args.seed,
        alpha: args.alpha,
    };
    let results = par_batch_analyze(&log.observations, &grid, args.threads).map_err(|e| match e {
        CoreError::EmptyString => CliError::Data(e.to_string()),
        other => other.into(),
    })?;
    let summary = summarize_dataset(&log.observations);
    let table = significance_counts(&results, args.alpha);

    std::fs::create_dir_all(&args.output).map_err(|source| CliError::Io {
        context: format!("creating {}", args.output.display()),
        source,
    })?;
    write_file(&args.output.join("results.json"), &to_json(&ResultsDocument::new(&results)))?;
    write_file(&args.output.join("summary.json"), &to_json(&SummaryDocument::new(&summary, &table)))?;
    write_file(&args.output.join("summary.csv"), &summary_csv(&summary))?;
    write_file(&args.output.join("significance.csv"), &significance_csv(&table))?;

    let untestable = results
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Untestable(_)))
        .count();
    let line = format!(
        "{} observations, {} results, {} significant at {}, {} untestable, {} rows skipped",
        log.observations.len(),
        results.len(),
        table.total_significant(),
        args.alpha,
        untestable,
        log.skipped.len()
    );
    match args.format {
        Format::Human => println!("{line}"),
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "observations": log.observations.len(),
                "results": results.len(),
                "significant": table.total_significant(),
                "untestable": untestable,
                "skipped_rows": log.skipped.len(),
            })
        ),
    }
    Ok(())
}

fn run_bias(args: BiasArgs) -> Result<(), CliError> {
    let statistic: Statistic = args.stat.into();
    let mut cells = Vec::new();
    for length in args.lengths.0..=args.lengths.1 {
        let (lo, hi) = args.hits.unwrap_or((0, length));
        for hits in lo..=hi.min(length) {
            let mean = null_mean_bias(length, hits, args.k, statistic)?;
            cells.push(BiasCell {
                length,
                hits,
                depth: args.k,
                statistic,
                mean,
            });
        }
    }
    let table = bias_csv(&cells);
    match &args.output {
        Some(path) => write_file(path, &table),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn run_report(args: ReportArgs) -> Result<(), CliError> {
    let text = read_input(&args.input)?;
    let doc: ResultsDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let results = doc
        .results
        .iter()
        .map(ResultRecord::to_result)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Data(e.to_string()))?;
    let statistic: Statistic = args.stat.into();
    let null: NullModel = args.null_model.into();
    let groups = pvalue_distribution_report(&results, statistic, args.k, null);
    let report = PValueDocument::new(statistic, args.k, null, &groups);
    let json = to_json(&report);
    if let Some(path) = &args.output {
        write_file(path, &json)?;
    }
    match args.format {
        Format::Json => print!("{json}"),
        Format::Human => {
            println!("p-values for {statistic} (k={}) under {null}", args.k);
            println!("{:<16} {:>6} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8}", "subject", "tested", "untestable", "min", "q1", "median", "q3", "max");
            for s in &report.subjects {
                let f = |x: Option<f64>| x.map_or_else(|| "-".into(), |v| format!("{v:.4}"));
                println!(
                    "{:<16} {:>6} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8}",
                    s.subject,
                    s.tested,
                    s.untestable,
                    f(s.min),
                    f(s.q1),
                    f(s.median),
                    f(s.q3),
                    f(s.max)
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Batch(args) => run_batch(args),
        Command::Bias(args) => run_bias(args),
        Command::Report(args) => run_report(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hotstreak: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
