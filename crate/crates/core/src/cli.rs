//! Command-line surface. Every subcommand is deterministic for identical
//! inputs, flags, and seeds, including across worker counts.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bleu::{BleuSpec, Level, SmoothingMode, VariantPreset};
use crate::corpus::{
    build_vocab, deduplicate_test, exact_duplicates, oov_ratio, split_records,
    synthesize_duplication, OovWeighting, SplitBy, SplitSpec,
};
use crate::io::{
    corpus_to_records, read_records, records_to_corpus, records_to_pairs, text_files_to_pairs,
    write_records, InputError,
};
use crate::preprocess::{apply_combo, Operator, PreprocessCombo};
use crate::report::{
    matrix_to_csv, matrix_to_table, run_custom, run_presets, run_smoothing_report,
    run_variant_matrix, sentence_scores_parallel,
};
use crate::stats::{
    operator_effect_with, t_test_two_sided, wmw_test, ScoreSample, SignificanceRule,
};

pub const WORKERS_ENV: &str = "SUMEVAL_WORKERS";

#[derive(Parser)]
#[command(
    name = "sumeval",
    version,
    about = "Variant-explicit BLEU scoring and corpus tooling for code summarization"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score candidates against references under one or more BLEU variants
    Eval(EvalArgs),
    /// Score several systems under all variants as one matrix
    Matrix(MatrixArgs),
    /// Lex code and apply a pre-processing combination
    Preprocess(PreprocessArgs),
    /// Split a corpus into train/valid/test
    Split(SplitArgs),
    /// Detect (and optionally drop) exact test-set duplicates
    Dedup(DedupArgs),
    /// Synthesize a target duplication ratio into a test set
    Dupsynth(DupsynthArgs),
    /// Report the out-of-vocabulary ratio of a partition
    Oov(OovArgs),
    /// Significance tests over score samples or a 16-combo grid
    Stats(StatsArgs),
    /// Export smoothing curves as CSV
    SmoothingReport(SmoothingReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmulateMode {
    None,
    LegacyM0,
    LegacyM4,
    InflatedM4,
}

impl EmulateMode {
    fn smoothing(self) -> Option<SmoothingMode> {
        match self {
            EmulateMode::None => None,
            EmulateMode::LegacyM0 => Some(SmoothingMode::M0NonzeroOnly),
            EmulateMode::LegacyM4 => Some(SmoothingMode::m4_legacy()),
            EmulateMode::InflatedM4 => Some(SmoothingMode::m4_inflated()),
        }
    }

    fn tag(self) -> Option<&'static str> {
        match self {
            EmulateMode::None => None,
            EmulateMode::LegacyM0 => Some("legacy-m0"),
            EmulateMode::LegacyM4 => Some("legacy-m4"),
            EmulateMode::InflatedM4 => Some("inflated-m4"),
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Record file with candidate/references fields
    #[arg(long, conflicts_with_all = ["candidates", "references"])]
    corpus: Option<PathBuf>,
    /// Plain-text candidates, one tokenized sentence per line
    #[arg(long, requires = "references")]
    candidates: Option<PathBuf>,
    /// Plain-text references, aligned line-by-line with --candidates
    #[arg(long)]
    references: Option<PathBuf>,
    /// Comma-separated preset names, "all", or "custom"
    #[arg(long, default_value = "all")]
    variant: String,
    /// Level for --variant custom
    #[arg(long, value_enum, default_value = "sentence")]
    level: CliLevel,
    /// Smoothing mode for --variant custom (m0, m1..m7, m0-nonzero-only,
    /// m4-legacy, m4-inflated, laplace-all, laplace-from2, epsilon)
    #[arg(long, default_value = "m0")]
    smoothing: String,
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    /// Force a historical buggy smoothing behavior
    #[arg(long, value_enum, default_value = "none")]
    emulate: EmulateMode,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
    /// Also write per-sentence scores (CSV) here
    #[arg(long)]
    per_sentence: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliLevel {
    Sentence,
    Corpus,
}

impl From<CliLevel> for Level {
    fn from(l: CliLevel) -> Level {
        match l {
            CliLevel::Sentence => Level::Sentence,
            CliLevel::Corpus => Level::Corpus,
        }
    }
}

#[derive(Args)]
struct MatrixArgs {
    /// Record files, one per system; the file stem names the system
    #[arg(long, required = true, num_args = 1..)]
    corpus: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PreprocessArgs {
    /// 4-bit RSFL string, e.g. 1101
    #[arg(long)]
    ops: String,
    #[arg(long, name = "in")]
    r#in: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also tokenize summaries (whitespace/punctuation split)
    #[arg(long)]
    tokenize_summaries: bool,
    /// Keep summary casing when tokenizing
    #[arg(long, requires = "tokenize_summaries")]
    keep_summary_case: bool,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long, name = "in")]
    r#in: PathBuf,
    #[arg(long, value_parser = SplitBy::from_str)]
    by: SplitBy,
    /// Colon-separated ratios, e.g. 0.8:0.1:0.1
    #[arg(long, default_value = "0.8:0.1:0.1")]
    ratios: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes <prefix>.{train,valid,test}.jsonl and
    /// <prefix>.manifest.json
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct DedupArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// Write the deduplicated test set here
    #[arg(long, requires = "out")]
    drop: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DupsynthArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OovArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    vocab_cap: Option<usize>,
    /// Weight by distinct token types instead of occurrences
    #[arg(long)]
    by_types: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichTest {
    T,
    Wmw,
    Both,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, value_enum, default_value = "both")]
    test: WhichTest,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// First score file (one value per line)
    #[arg(long, requires = "b", conflicts_with = "grid")]
    a: Option<PathBuf>,
    /// Second score file
    #[arg(long)]
    b: Option<PathBuf>,
    /// 16-combo grid CSV: lines of "<RSFL bits>,<score>"
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Operator to analyze (R, S, F, L); default all four
    #[arg(long)]
    operator: Option<String>,
    /// Award significance when either test (not both) is below alpha
    #[arg(long)]
    either: bool,
}

#[derive(Args)]
struct SmoothingReportArgs {
    #[arg(long, default_value_t = 2)]
    min_len: usize,
    #[arg(long, default_value_t = 30)]
    max_len: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
    .max(1)
}

fn emit(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("write {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Matrix(args) => run_matrix(args),
        Command::Preprocess(args) => run_preprocess(args),
        Command::Split(args) => run_split(args),
        Command::Dedup(args) => run_dedup(args),
        Command::Dupsynth(args) => run_dupsynth(args),
        Command::Oov(args) => run_oov(args),
        Command::Stats(args) => run_stats(args),
        Command::SmoothingReport(args) => {
            let csv = run_smoothing_report(args.min_len, args.max_len)?;
            emit(&args.out, &csv)
        }
    }
}

fn load_pairs(args: &EvalArgs) -> anyhow::Result<Vec<crate::bleu::EvalPair>> {
    if let Some(corpus) = &args.corpus {
        let records = read_records(corpus)?;
        records_to_pairs(corpus, &records)
    } else if let (Some(cands), Some(refs)) = (&args.candidates, &args.references) {
        text_files_to_pairs(cands, refs)
    } else {
        bail!(InputError("need --corpus or --candidates/--references".into()));
    }
}

fn run_eval(args: EvalArgs) -> anyhow::Result<()> {
    let pairs = load_pairs(&args)?;
    let workers = resolve_workers(args.workers);
    let (report, sentence_specs) = if args.variant == "custom" {
        let smoothing = match args.emulate.smoothing() {
            Some(forced) => forced,
            None => SmoothingMode::from_str(&args.smoothing)?,
        };
        let spec = BleuSpec::new(args.max_n, args.level.into(), smoothing);
        spec.validate()?;
        let report = run_custom(&pairs, &spec, args.emulate.tag(), workers)?;
        let sentence = if spec.level == Level::Sentence {
            vec![("custom".to_string(), spec)]
        } else {
            Vec::new()
        };
        (report, sentence)
    } else {
        let presets: Vec<VariantPreset> = if args.variant == "all" {
            VariantPreset::all()
        } else {
            args.variant
                .split(',')
                .map(VariantPreset::by_name)
                .collect::<crate::error::Result<_>>()?
        };
        let report = run_presets(&pairs, &presets, workers)?;
        let sentence = presets
            .iter()
            .filter(|p| p.spec.level == Level::Sentence)
            .map(|p| (p.name.to_string(), p.spec.clone()))
            .collect();
        (report, sentence)
    };
    if let Some(path) = &args.per_sentence {
        let mut csv = String::from("index");
        let mut columns = Vec::new();
        for (name, spec) in &sentence_specs {
            csv.push_str(&format!(",{name}"));
            columns.push(sentence_scores_parallel(&pairs, spec, workers)?);
        }
        csv.push('\n');
        for i in 0..pairs.len() {
            csv.push_str(&i.to_string());
            for column in &columns {
                csv.push_str(&format!(",{:.6}", column[i]));
            }
            csv.push('\n');
        }
        fs::write(path, csv).with_context(|| format!("write {}", path.display()))?;
    }
    let rendered = match args.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Table => report.to_table(),
    };
    emit(&args.out, &rendered)
}

fn run_matrix(args: MatrixArgs) -> anyhow::Result<()> {
    let mut systems = Vec::new();
    for path in &args.corpus {
        let records = read_records(path)?;
        let pairs = records_to_pairs(path, &records)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        systems.push((name, pairs));
    }
    let presets = VariantPreset::all();
    let matrix = run_variant_matrix(&systems, &presets, resolve_workers(args.workers))?;
    let rendered = match args.format {
        OutputFormat::Table => matrix_to_table(&matrix, &presets),
        _ => matrix_to_csv(&matrix, &presets),
    };
    emit(&args.out, &rendered)
}

fn run_preprocess(args: PreprocessArgs) -> anyhow::Result<()> {
    let combo = PreprocessCombo::from_str(&args.ops)?;
    let records = read_records(&args.r#in)?;
    let mut corpus = records_to_corpus(&args.r#in, &records)?;
    for record in &mut corpus {
        record.code_tokens = apply_combo(combo, &record.code_tokens)?;
        if args.tokenize_summaries {
            let text = record.summary_tokens.render();
            record.summary_tokens =
                crate::lex::tokenize_summary_with(&text, !args.keep_summary_case);
        }
    }
    write_records(&args.out, &corpus_to_records(&corpus))
}

#[derive(Serialize)]
struct SplitManifest<'a> {
    by: &'a str,
    ratios: [f64; 3],
    seed: u64,
    input: String,
    counts: [usize; 3],
}

fn parse_ratios(text: &str) -> anyhow::Result<[f64; 3]> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| InputError(format!("bad ratios {text:?}")))?;
    if parts.len() != 3 {
        bail!(InputError(format!("need three ratios, got {text:?}")));
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn run_split(args: SplitArgs) -> anyhow::Result<()> {
    let ratios = parse_ratios(&args.ratios)?;
    let spec = SplitSpec::new(args.by, ratios, args.seed)?;
    let records = read_records(&args.r#in)?;
    let corpus = records_to_corpus(&args.r#in, &records)?;
    let result = split_records(&corpus, &spec)?;
    let prefix = args.out_prefix.display();
    for (part, name) in [
        (&result.train, "train"),
        (&result.valid, "valid"),
        (&result.test, "test"),
    ] {
        write_records(
            Path::new(&format!("{prefix}.{name}.jsonl")),
            &corpus_to_records(part),
        )?;
    }
    let manifest = SplitManifest {
        by: match args.by {
            SplitBy::Method => "method",
            SplitBy::Class => "class",
            SplitBy::Project => "project",
        },
        ratios,
        seed: args.seed,
        input: args.r#in.display().to_string(),
        counts: [result.train.len(), result.valid.len(), result.test.len()],
    };
    fs::write(
        format!("{prefix}.manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    println!(
        "split {} records into {}/{}/{}",
        corpus.len(),
        result.train.len(),
        result.valid.len(),
        result.test.len()
    );
    Ok(())
}

fn load_corpus(path: &Path) -> anyhow::Result<Vec<crate::corpus::CorpusRecord>> {
    let records = read_records(path)?;
    records_to_corpus(path, &records)
}

fn run_dedup(args: DedupArgs) -> anyhow::Result<()> {
    let train = load_corpus(&args.train)?;
    let test = load_corpus(&args.test)?;
    let report = exact_duplicates(&train, &test);
    println!(
        "{} of {} test records duplicated in training (ratio {:.4})",
        report.duplicate_pairs.len(),
        test.len(),
        report.duplication_ratio
    );
    if args.drop {
        let kept = deduplicate_test(&train, &test);
        if kept.is_empty() {
            eprintln!("warning: every test record was duplicated; output is empty");
        }
        let out = args.out.expect("clap enforces --out with --drop");
        write_records(&out, &corpus_to_records(&kept))?;
        println!("kept {} records -> {}", kept.len(), out.display());
    }
    Ok(())
}

fn run_dupsynth(args: DupsynthArgs) -> anyhow::Result<()> {
    if !(0.0..1.0).contains(&args.ratio) {
        bail!(InputError(format!("ratio must be in [0, 1), got {}", args.ratio)));
    }
    let train = load_corpus(&args.train)?;
    let test = load_corpus(&args.test)?;
    let synthesized = synthesize_duplication(&train, &test, args.ratio, args.seed)?;
    let achieved = exact_duplicates(&train, &synthesized).duplication_ratio;
    write_records(&args.out, &corpus_to_records(&synthesized))?;
    println!(
        "appended {} training records; achieved ratio {:.4}",
        synthesized.len() - test.len(),
        achieved
    );
    Ok(())
}

fn run_oov(args: OovArgs) -> anyhow::Result<()> {
    let train = load_corpus(&args.train)?;
    let records = load_corpus(&args.records)?;
    let vocab = build_vocab(&train, args.vocab_cap)?;
    let weighting = if args.by_types {
        OovWeighting::Types
    } else {
        OovWeighting::Occurrences
    };
    let ratio = oov_ratio(&vocab, &records, weighting)?;
    println!(
        "vocab size {}; OOV ratio {:.2}%",
        vocab.len(),
        ratio
    );
    Ok(())
}

fn read_score_file(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("open {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<f64>().map_err(|_| {
                InputError(format!("{}:{}: not a number: {l:?}", path.display(), i + 1)).into()
            })
        })
        .collect()
}

fn read_grid(path: &Path) -> anyhow::Result<HashMap<PreprocessCombo, f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("open {}", path.display()))?;
    let mut grid = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || InputError(format!("{}:{}: expected \"<RSFL>,<score>\"", path.display(), i + 1));
        let (combo, score) = line.split_once(',').ok_or_else(bad)?;
        let combo = PreprocessCombo::from_str(combo.trim())?;
        let score: f64 = score.trim().parse().map_err(|_| bad())?;
        grid.insert(combo, score);
    }
    Ok(grid)
}

fn run_stats(args: StatsArgs) -> anyhow::Result<()> {
    let rule = if args.either {
        SignificanceRule::Either
    } else {
        SignificanceRule::Both
    };
    if let Some(grid_path) = &args.grid {
        let grid = read_grid(grid_path)?;
        let operators: Vec<Operator> = match &args.operator {
            Some(op) => vec![Operator::from_str(op)?],
            None => Operator::ALL.to_vec(),
        };
        println!("operator  mean_without  mean_with       p_t     p_wmw  significant");
        for op in operators {
            let effect = operator_effect_with(&grid, op, args.alpha, rule)?;
            println!(
                "{:<8}  {:>12.2}  {:>9.2}  {:>8.4}  {:>8.4}  {}",
                effect.operator,
                effect.mean_without,
                effect.mean_with,
                effect.p_t,
                effect.p_wmw,
                if effect.significant { "*" } else { "-" }
            );
        }
        return Ok(());
    }
    let (a_path, b_path) = match (&args.a, &args.b) {
        (Some(a), Some(b)) => (a, b),
        _ => bail!(InputError("need --grid or --a/--b".into())),
    };
    let a = ScoreSample::new("a", read_score_file(a_path)?);
    let b = ScoreSample::new("b", read_score_file(b_path)?);
    match args.test {
        WhichTest::T => println!("t-test p = {:.6}", t_test_two_sided(&a, &b)?),
        WhichTest::Wmw => println!("wmw p = {:.6}", wmw_test(&a, &b)?),
        WhichTest::Both => {
            let p_t = t_test_two_sided(&a, &b)?;
            let p_w = wmw_test(&a, &b)?;
            let significant = match rule {
                SignificanceRule::Both => p_t < args.alpha && p_w < args.alpha,
                SignificanceRule::Either => p_t < args.alpha || p_w < args.alpha,
            };
            println!("t-test p = {p_t:.6}");
            println!("wmw p = {p_w:.6}");
            println!("significant at alpha {}: {}", args.alpha, significant);
        }
    }
    Ok(())
}
