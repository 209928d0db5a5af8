use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sourcescope::analytics::{
    self, accumulate_with, media_report, ratio_report, topic_report, trend_report, AnalyticsError,
    KeywordLabeler, PresetOnly, RemoteLabeler, Summary, TopicLabeler,
};
use sourcescope::corpus::{
    ingest, stratified_sample, Corpus, CorpusError, IngestOptions, DEFAULT_SAMPLE_KEYWORDS,
};
use sourcescope::evaluator::{
    check_against_reference, compare, metrics, read_gold, read_reference_csv, write_report_csv,
};
use sourcescope::extractor::{extract_corpus, write_mentions, write_sentence_dump, SourceMention};
use sourcescope::jsonl::{read_jsonl, JsonlError};
use sourcescope::patterns::{PatternError, PatternSet};

#[derive(Parser, Debug)]
#[command(name = "sourcescope", version, about = "Find and classify social-media sources in news articles")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct RunConfig {
    /// Line-delimited article records.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Pattern file; the bundled set is used when omitted.
    #[arg(long, global = true)]
    patterns: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for extraction.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    parallel: u16,
    /// Sampling seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Stop at the first invalid corpus record.
    #[arg(long, global = true)]
    fail_fast: bool,
    #[arg(long, global = true, value_enum, default_value_t = LabelerMode::Preset)]
    labeler: LabelerMode,
    /// Endpoint for `--labeler remote`; token from SOURCESCOPE_LABELER_TOKEN.
    #[arg(long, global = true)]
    labeler_url: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LabelerMode {
    Preset,
    Keyword,
    Remote,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a corpus and report accepted/rejected records.
    Ingest,
    /// Write mentions.jsonl and sentences.jsonl.
    Extract,
    /// Score mentions against a gold file and write evaluation.csv.
    Evaluate {
        /// Hand-annotated mentions, one JSON object per line
        #[arg(long)]
        gold: PathBuf,
        /// Predicted mentions; extracted from --corpus when omitted.
        #[arg(long)]
        mentions: Option<PathBuf>,
        /// Published metric table to check the report against.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Write the usage tables, trend data and summary.json.
    Analyze {
        /// Topics per media type in the topic table.
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u16).range(1..))]
        k: u16,
    },
    /// Draw a keyword-stratified sample into sample.jsonl.
    Sample {
        /// Comma-separated stratification keywords [default: facebook,twitter,post,tweet]
        #[arg(long, value_delimiter = ',')]
        keywords: Vec<String>,
        /// Total sample size, split evenly across keywords
        #[arg(long, default_value_t = 400)]
        n: usize,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Labeler(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Labeler(_) => 3,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<PatternError> for CliError {
    fn from(e: PatternError) -> Self {
        match e {
            PatternError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<JsonlError> for CliError {
    fn from(e: JsonlError) -> Self {
        match e {
            JsonlError::Io(_) => CliError::Io(e.to_string()),
            JsonlError::Parse { .. } => CliError::Validation(e.to_string()),
        }
    }
}

impl From<AnalyticsError> for CliError {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::Labeler(_) => CliError::Labeler(e.to_string()),
            AnalyticsError::UnknownArticle(_) => CliError::Validation(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| {
        if e.is_io_error() {
            CliError::Io(format!("{}: {e}", path.display()))
        } else {
            CliError::Validation(format!("{}: {e}", path.display()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Ingest => cmd_ingest(cfg),
        Command::Extract => cmd_extract(cfg),
        Command::Evaluate {
            gold,
            mentions,
            compare,
        } => cmd_evaluate(cfg, gold, mentions.as_deref(), compare.as_deref()),
        Command::Analyze { k } => cmd_analyze(cfg, usize::from(*k)),
        Command::Sample { keywords, n } => cmd_sample(cfg, keywords, *n),
    }
}

fn corpus_path(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.corpus
        .as_deref()
        .ok_or_else(|| CliError::Validation("--corpus is required".into()))
}

fn load_corpus(cfg: &RunConfig) -> Result<Corpus, CliError> {
    let (corpus, report) = ingest(
        corpus_path(cfg)?,
        IngestOptions {
            fail_fast: cfg.fail_fast,
        },
    )?;
    if !report.rejected.is_empty() {
        log::warn!("{} corpus records rejected", report.rejected.len());
    }
    Ok(corpus)
}

fn load_patterns(cfg: &RunConfig) -> Result<PatternSet, CliError> {
    match &cfg.patterns {
        Some(p) => Ok(PatternSet::load(p)?),
        None => Ok(PatternSet::bundled()),
    }
}

fn create_out(cfg: &RunConfig, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    let path = cfg.out.join(name);
    let file = File::create(&path).map_err(io_err(&path))?;
    Ok((path, BufWriter::new(file)))
}

fn cmd_ingest(cfg: &RunConfig) -> Result<(), CliError> {
    let (corpus, report) = ingest(
        corpus_path(cfg)?,
        IngestOptions {
            fail_fast: cfg.fail_fast,
        },
    )?;
    println!("{} accepted, {} rejected", corpus.len(), report.rejected.len());
    for r in &report.rejected {
        println!("  line {}: {}", r.line, r.reason);
    }
    Ok(())
}

fn cmd_extract(cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = load_corpus(cfg)?;
    let set = load_patterns(cfg)?;
    let results = extract_corpus(&corpus, &set, usize::from(cfg.parallel));

    let (path, mut w) = create_out(cfg, "mentions.jsonl")?;
    write_mentions(&results, &mut w).map_err(io_err(&path))?;
    let (path, mut w) = create_out(cfg, "sentences.jsonl")?;
    write_sentence_dump(&corpus, &mut w).map_err(io_err(&path))?;

    let mentions: usize = results.iter().map(|r| r.mentions.len()).sum();
    println!(
        "{mentions} mentions in {} articles (patterns: {})",
        corpus.len(),
        set.version()
    );
    Ok(())
}

fn cmd_evaluate(
    cfg: &RunConfig,
    gold_path: &Path,
    mentions_path: Option<&Path>,
    reference: Option<&Path>,
) -> Result<(), CliError> {
    let gold = read_gold(gold_path)?;
    let predicted: Vec<SourceMention> = match mentions_path {
        Some(p) => read_jsonl(p)?,
        None => {
            let corpus = load_corpus(cfg)?;
            let set = load_patterns(cfg)?;
            extract_corpus(&corpus, &set, usize::from(cfg.parallel))
                .into_iter()
                .flat_map(|r| r.mentions)
                .collect()
        }
    };
    let counts = compare(&predicted, &gold).map_err(|e| CliError::Validation(e.to_string()))?;
    let report = metrics(&counts);

    let discrepancies = match reference {
        Some(p) => {
            let file = File::open(p).map_err(io_err(p))?;
            let rows = read_reference_csv(file).map_err(csv_err(p))?;
            Some(check_against_reference(&report, &rows))
        }
        None => None,
    };
    let (path, mut w) = create_out(cfg, "evaluation.csv")?;
    write_report_csv(&report, discrepancies.as_deref(), &mut w).map_err(csv_err(&path))?;
    drop(w);

    let mut stdout = std::io::stdout().lock();
    write_report_csv(&report, discrepancies.as_deref(), &mut stdout)
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

fn cmd_analyze(cfg: &RunConfig, k: usize) -> Result<(), CliError> {
    let corpus = load_corpus(cfg)?;
    let set = load_patterns(cfg)?;
    let labeler: Box<dyn TopicLabeler> = match cfg.labeler {
        LabelerMode::Preset => Box::new(PresetOnly),
        LabelerMode::Keyword => Box::new(KeywordLabeler::bundled()),
        LabelerMode::Remote => {
            let url = cfg.labeler_url.as_deref().ok_or_else(|| {
                CliError::Validation("--labeler remote requires --labeler-url".into())
            })?;
            Box::new(RemoteLabeler::from_env(url))
        }
    };

    let results = extract_corpus(&corpus, &set, usize::from(cfg.parallel));
    let acc = accumulate_with(&results, &corpus, labeler.as_ref())?;
    let summary = Summary {
        pattern_version: set.version().to_string(),
        media: media_report(&acc),
        ratio: ratio_report(&acc),
        trend: trend_report(&acc),
        topics: topic_report(&acc, k),
    };

    let (p, w) = create_out(cfg, "table2_media.csv")?;
    analytics::write_media_csv(&summary.media, w).map_err(csv_err(&p))?;
    let (p, w) = create_out(cfg, "table3_quotes.csv")?;
    analytics::write_ratio_csv(&summary.ratio, w).map_err(csv_err(&p))?;
    let (p, w) = create_out(cfg, "table4_topics.csv")?;
    analytics::write_topics_csv(&summary.topics, w).map_err(csv_err(&p))?;
    let (p, w) = create_out(cfg, "table5_topic_kinds.csv")?;
    analytics::write_topic_kinds_csv(&summary.topics, w).map_err(csv_err(&p))?;
    let (p, w) = create_out(cfg, "trend.tsv")?;
    analytics::write_trend_tsv(&summary.trend, w).map_err(io_err(&p))?;
    let (p, w) = create_out(cfg, "trend.csv")?;
    analytics::write_trend_csv(&summary.trend, w).map_err(csv_err(&p))?;
    let (p, mut w) = create_out(cfg, "summary.json")?;
    serde_json::to_writer_pretty(&mut w, &summary)
        .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err(&p))?;

    println!("wrote reports for {} articles to {}", corpus.len(), cfg.out.display());
    Ok(())
}

fn cmd_sample(cfg: &RunConfig, keywords: &[String], n: usize) -> Result<(), CliError> {
    let corpus = load_corpus(cfg)?;
    let keywords: Vec<String> = if keywords.is_empty() {
        DEFAULT_SAMPLE_KEYWORDS.iter().map(|s| s.to_string()).collect()
    } else {
        keywords.to_vec()
    };
    let sample = stratified_sample(&corpus, &keywords, n, cfg.seed)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let (path, mut w) = create_out(cfg, "sample.jsonl")?;
    sample.write_jsonl(&mut w).map_err(io_err(&path))?;
    println!("sampled {} of {} articles", sample.len(), corpus.len());
    Ok(())
}
