use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toolreward")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const EXPECTED: &str = r#"[{"name": "password_generation_api", "arguments": {"length": 12, "include_special": true, "include_numbers": true}}]"#;
const OVER_GENERATED: &str = r#"[{"name": "password_generation_api", "arguments": {"length": 12, "include_special": true, "include_numbers": true, "custom_prefix": "Secure123"}}, {"name": "qr_code_generator", "arguments": {"text": "Secure123"}}]"#;

#[test]
fn score_prints_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["score", "--completion", OVER_GENERATED, "--expected", EXPECTED], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["r_final"], 0.5625);
    assert_eq!(v["outcome"], "calls");
    assert_eq!(v["match"]["scaling_factor"], 0.5);

    let wrapped = format!("This is the correct tool call: {EXPECTED}");
    let o = run(&["score", "--completion", &wrapped, "--expected", EXPECTED], dir.path());
    assert_eq!(json(&o)["r_final"], 0.0);
    assert_eq!(json(&o)["outcome"], "extraneous_text");
}

#[test]
fn score_reads_files_and_custom_weights() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.txt"), EXPECTED).unwrap();
    std::fs::write(dir.path().join("e.json"), EXPECTED).unwrap();
    let o = run(
        &["score", "--completion-file", "c.txt", "--expected-file", "e.json", "--weights", "0.5,0.25,0.25"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["r_json"], 0.5);
    assert_eq!(json(&o)["r_final"], 1.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(run(&["score"], p).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"], p).status.code(), Some(1));
    assert_eq!(run(&["score", "--completion", "x", "--expected", "[]", "--weights", "1,1"], p).status.code(), Some(1));
    assert_eq!(run(&["--help"], p).status.code(), Some(0));
    assert_eq!(run(&["evaluate", "--dataset", "missing.jsonl", "--completions", "c.jsonl"], p).status.code(), Some(2));
    assert_eq!(run(&["score", "--completion", "x", "--expected", "{"], p).status.code(), Some(3));
    assert_eq!(run(&["score", "--completion", "x", "--expected", "[{\"name\": 1}]"], p).status.code(), Some(3));
    std::fs::write(p.join("bad.tsv"), "step\tmean_reward\nx\ty\n").unwrap();
    assert_eq!(run(&["report", "bad.tsv"], p).status.code(), Some(3));
}

#[test]
fn synthetic_corpus_evaluates_to_planted_rates() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(&["gen-synth", "--records", "100", "--mix", "invalid-json=0.25", "--out-dir", "out"], p);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let args = ["evaluate", "--dataset", "out/dataset.jsonl", "--completions", "out/completions.jsonl"];
    let table = run(&args, p);
    assert!(stdout(&table).contains("JSON Validity") && stdout(&table).contains("Overall Accuracy"));
    assert!(stdout(&table).contains("75.00%"));

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json", "--out", "report.json"]);
    assert_eq!(run(&json_args, p).status.code(), Some(0));
    let first = std::fs::read(p.join("report.json")).unwrap();
    assert_eq!(run(&json_args, p).status.code(), Some(0));
    assert_eq!(std::fs::read(p.join("report.json")).unwrap(), first);
    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["json_validity"], 0.75);

    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv", "--out", "report.csv"]);
    assert_eq!(run(&csv_args, p).status.code(), Some(0));
    let back = run(&["report", "report.csv", "--format", "json"], p);
    assert_eq!(json(&back)["json_validity"], 0.75);
    assert_eq!(json(&back)["overall_accuracy"], 0.75);
}

#[test]
fn evaluate_on_a_sampled_split() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    run(&["gen-synth", "--records", "50", "--stringified", "--out-dir", "."], p);
    let o = run(
        &[
            "evaluate", "--dataset", "dataset.jsonl", "--completions", "completions.jsonl", "--train-n", "30",
            "--test-n", "20", "--format", "json",
        ],
        p,
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["n_records"], 20);
    assert_eq!(json(&o)["overall_accuracy"], 1.0);

    let too_many = run(
        &["evaluate", "--dataset", "dataset.jsonl", "--completions", "completions.jsonl", "--test-n", "51"],
        p,
    );
    assert_eq!(too_many.status.code(), Some(3));
}

#[test]
fn train_toy_writes_a_curve() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(&["train-toy", "--steps", "60", "--window", "20", "--out", "curve.tsv"], p);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let tsv = std::fs::read_to_string(p.join("curve.tsv")).unwrap();
    assert!(tsv.starts_with("step\tmean_reward\textraneous_rate\tmean_completion_chars"));
    assert_eq!(tsv.lines().count(), 61);

    let windows = run(&["report", "curve.tsv", "--window", "20", "--format", "json"], p);
    assert_eq!(json(&windows).as_array().unwrap().len(), 3);
    let flat = run(&["train-toy", "--steps", "10", "--lr", "0", "--out", "flat.tsv"], p);
    assert_eq!(flat.status.code(), Some(0));
    assert_eq!(run(&["train-toy", "--group-size", "1"], p).status.code(), Some(3));
}
