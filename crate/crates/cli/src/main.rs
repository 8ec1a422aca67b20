use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toolreward_core::grpo::{curve_stats, PolicyModes, TrainingCurve, WindowStats};
use toolreward_core::harness::{
    evaluate_with, load_completions, load_dataset, parse_report_csv, parse_report_json, render_report, split_sample,
    write_completions, write_dataset, DatasetFormat, EvalOptions, EvalReport, FieldEncoding, MalformedRecord,
    ReportFormat, ValidityMode,
};
use toolreward_core::reward::{compute_reward, RewardWeights};
use toolreward_core::synth::{generate_universe_with, plant_corpus, ErrorMix, UniverseOptions};
use toolreward_core::toolcall::{calls_from_json, JsonValue};
use toolreward_core::{train_toy_policy, Error, Result, TrainerConfig};

/// Scores tool-call completions and runs the toy reinforcement-learning loop.
#[derive(Debug, Parser)]
#[command(name = "toolreward", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one completion against one expected answer and print the breakdown as JSON.
    Score(ScoreArgs),
    /// Score a completions file against a dataset and print a report.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic dataset with a planted-error completions file.
    GenSynth(GenSynthArgs),
    /// Train the toy tabular policy and write its reward curve.
    TrainToy(TrainToyArgs),
    /// Render a saved curve or evaluation report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct WeightsArg {
    /// Reward weights as json,name,args.
    #[arg(long, default_value = "0.125,0.375,0.5")]
    weights: RewardWeights,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Completion text, or `-` to read it from stdin.
    #[arg(long, conflicts_with = "completion_file", required_unless_present = "completion_file")]
    completion: Option<String>,
    #[arg(long)]
    completion_file: Option<PathBuf>,
    /// Expected answer as a JSON array of calls.
    #[arg(long, conflicts_with = "expected_file", required_unless_present = "expected_file")]
    expected: Option<String>,
    #[arg(long)]
    expected_file: Option<PathBuf>,
    #[command(flatten)]
    weights: WeightsArg,
    /// Pretty-print the JSON output.
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    completions: PathBuf,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Count JSON recoverable from surrounding text as valid.
    #[arg(long)]
    lenient: bool,
    /// Model name shown in the table.
    #[arg(long, default_value = "model")]
    label: String,
    /// Evaluate a seeded sample of this many test records.
    #[arg(long)]
    test_n: Option<usize>,
    /// Records reserved for training and excluded from the test sample.
    #[arg(long, default_value_t = 0, requires = "test_n")]
    train_n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    weights: WeightsArg,
}

#[derive(Debug, Args)]
struct GenSynthArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    tools: usize,
    #[arg(long, default_value_t = 3)]
    max_params: usize,
    #[arg(long, default_value_t = 12)]
    queries: usize,
    #[arg(long, default_value_t = 100)]
    records: usize,
    /// Planted behaviour fractions, e.g. `invalid-json=0.25,extra-call=0.1`. The rest is perfect.
    #[arg(long, default_value = "")]
    mix: ErrorMix,
    /// Directory receiving dataset.jsonl and completions.jsonl.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Store answers and tools as JSON strings inside each record.
    #[arg(long)]
    stringified: bool,
}

#[derive(Debug, Args)]
struct TrainToyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    universe_seed: u64,
    #[arg(long, default_value_t = 8)]
    tools: usize,
    #[arg(long, default_value_t = 3)]
    max_params: usize,
    #[arg(long, default_value_t = 8)]
    group_size: usize,
    #[arg(long, default_value_t = 0.5)]
    lr: f64,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    /// Curve output path (tab-separated).
    #[arg(long, default_value = "curve.tsv")]
    out: PathBuf,
    /// Steps per summary window.
    #[arg(long, default_value_t = 100)]
    window: usize,
    /// Disable the extraneous-text and call-count decisions.
    #[arg(long)]
    no_error_modes: bool,
    #[command(flatten)]
    weights: WeightsArg,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// A curve (.tsv), report (.json) or per-record report (.csv).
    input: PathBuf,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    #[arg(long, default_value_t = 100)]
    window: usize,
    #[arg(long, default_value = "model")]
    label: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Score(a) => score(a),
        Command::Evaluate(a) => evaluate(a),
        Command::GenSynth(a) => gen_synth(a),
        Command::TrainToy(a) => train_toy(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 3 })
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Error::io("<stdin>", e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn warn_malformed(source: &Path, malformed: &[MalformedRecord]) {
    for m in malformed {
        let id = m.id.map(|id| format!(" (id {id})")).unwrap_or_default();
        eprintln!("warning: {}: skipped entry {}{id}: {}", source.display(), m.position, m.reason);
    }
}

fn score(a: ScoreArgs) -> Result<()> {
    let completion = match (a.completion, a.completion_file) {
        (Some(text), _) if text == "-" => read_text(Path::new("-"))?,
        (Some(text), _) => text,
        (None, Some(path)) => read_text(&path)?,
        (None, None) => unreachable!("clap requires one completion source"),
    };
    let expected_text = match (a.expected, a.expected_file) {
        (Some(text), _) => text,
        (None, Some(path)) => read_text(&path)?,
        (None, None) => unreachable!("clap requires one expected source"),
    };
    let expected_json: JsonValue = expected_text
        .parse()
        .map_err(|e| Error::Validation(format!("expected answer is not JSON: {e}")))?;
    let expected = calls_from_json(&expected_json).map_err(|e| Error::Validation(format!("expected answer: {e}")))?;

    let breakdown = compute_reward(&completion, &expected, &a.weights.weights);
    let json = if a.pretty {
        serde_json::to_string_pretty(&breakdown)
    } else {
        serde_json::to_string(&breakdown)
    }
    .expect("breakdown serializes");
    write_out(None, &(json + "\n"))
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let dataset = load_dataset(&a.dataset, None)?;
    warn_malformed(&a.dataset, &dataset.malformed);
    let completions = load_completions(&a.completions)?;
    warn_malformed(&a.completions, &completions.malformed);

    let records = match a.test_n {
        Some(test_n) => split_sample(&dataset.records, a.train_n, test_n, a.seed)?.1,
        None => dataset.records,
    };
    let opts = EvalOptions {
        weights: a.weights.weights,
        validity: if a.lenient { ValidityMode::Lenient } else { ValidityMode::Strict },
    };
    let report = evaluate_with(&records, &completions.completions, &opts);
    if report.n_missing > 0 {
        eprintln!("warning: {} records have no completion and were scored as empty", report.n_missing);
    }
    write_out(a.out.as_deref(), &render_report(&report, a.format, &a.label))
}

fn gen_synth(a: GenSynthArgs) -> Result<()> {
    let opts = UniverseOptions {
        n_tools: a.tools,
        max_params: a.max_params,
        n_queries: a.queries,
        ..UniverseOptions::default()
    };
    let universe = generate_universe_with(a.seed, opts)?;
    let corpus = plant_corpus(&universe, a.seed.wrapping_add(1), a.records, &a.mix)?;

    fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let dataset_path = a.out_dir.join("dataset.jsonl");
    let completions_path = a.out_dir.join("completions.jsonl");
    let encoding = if a.stringified { FieldEncoding::Stringified } else { FieldEncoding::Inline };
    write_dataset(&dataset_path, &corpus.dataset(), DatasetFormat::JsonLines, encoding)?;
    write_completions(&completions_path, &corpus.completion_rows())?;

    println!("wrote {} records to {}", a.records, dataset_path.display());
    println!("wrote completions to {}", completions_path.display());
    for (tag, rate) in &corpus.rates {
        println!("  {tag}: {rate:.4}");
    }
    Ok(())
}

fn train_toy(a: TrainToyArgs) -> Result<()> {
    let opts = UniverseOptions { n_tools: a.tools, max_params: a.max_params, ..UniverseOptions::default() };
    let universe = generate_universe_with(a.universe_seed, opts)?;
    let config = TrainerConfig {
        group_size: a.group_size,
        learning_rate: a.lr,
        max_steps: a.steps,
        seed: a.seed,
        weights: a.weights.weights,
        modes: if a.no_error_modes { PolicyModes::none() } else { PolicyModes::default() },
    };
    let run = train_toy_policy(&config, &universe)?;
    run.curve.write_tsv(&a.out)?;
    let windows = curve_stats(&run.curve, a.window)?;
    print!("{}", render_curve_table(&windows));
    println!("curve written to {}", a.out.display());
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let text = read_text(&a.input)?;
    let ext = a.input.extension().and_then(|e| e.to_str()).unwrap_or("");
    let out = match ext {
        "tsv" => {
            let windows = curve_stats(&TrainingCurve::from_tsv(&text)?, a.window)?;
            render_curve(&windows, a.format)
        }
        "csv" => render_report(&parse_report_csv(&text)?, a.format, &a.label),
        "json" => render_report(&parse_report_json(&text)?, a.format, &a.label),
        _ => render_report(&sniff_report(&text)?, a.format, &a.label),
    };
    write_out(None, &out)
}

fn sniff_report(text: &str) -> Result<EvalReport> {
    if text.trim_start().starts_with('{') {
        parse_report_json(text)
    } else {
        parse_report_csv(text)
    }
}

fn render_curve(windows: &[WindowStats], format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => render_curve_table(windows),
        ReportFormat::Json => serde_json::to_string_pretty(windows).expect("windows serialize") + "\n",
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for w in windows {
                writer.serialize(w).expect("windows serialize");
            }
            String::from_utf8(writer.into_inner().expect("flush to Vec")).expect("CSV is UTF-8")
        }
    }
}

fn render_curve_table(windows: &[WindowStats]) -> String {
    let mut out = format!("{:>13}  {:>11}  {:>10}  {:>10}\n", "steps", "mean reward", "extraneous", "chars");
    for w in windows {
        let steps = format!("{}-{}", w.first_step, w.last_step);
        out.push_str(&format!(
            "{steps:>13}  {:>11.4}  {:>9.2}%  {:>10.1}\n",
            w.mean_reward,
            w.extraneous_rate * 100.0,
            w.mean_completion_chars
        ));
    }
    out
}
