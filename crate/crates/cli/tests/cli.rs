use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use vaxsent::ingest::{write_corpus, TweetRecord};
use vaxsent::seqmodel::read_header;
use vaxsent::synth::vaccine_corpus;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vaxsent"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn error_record(out: &Output) -> serde_json::Value {
    let err = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(err.lines().last().unwrap()).unwrap_or_else(|_| panic!("not a record: {err}"))
}

fn write(dir: &Path, name: &str, recs: &[TweetRecord]) -> PathBuf {
    let p = dir.join(name);
    write_corpus(recs, fs::File::create(&p).unwrap()).unwrap();
    p
}

fn texts(dir: &Path, items: &[&str]) -> PathBuf {
    let recs: Vec<TweetRecord> = vaccine_corpus(items.len(), 5)
        .into_iter()
        .zip(items)
        .map(|(mut r, t)| {
            r.text = t.to_string();
            r
        })
        .collect();
    write(dir, "corpus.csv", &recs)
}

const SMALL: &str = "[train]\nembed_dim = 8\nhidden = 8\nbatch_size = 32\nvocab_size = 500\n";

fn small_setup(dir: &Path) -> (PathBuf, PathBuf) {
    let corpus = write(dir, "synth.csv", &vaccine_corpus(400, 11));
    let cfg = dir.join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    (corpus, cfg)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn score_single_good_tweet() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = texts(dir.path(), &["good"]);
    let out_dir = dir.path().join("out");
    let out = run(&["score", "--corpus", s(&corpus), "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let scored = fs::read_to_string(out_dir.join("scored.jsonl")).unwrap();
    assert_eq!(scored.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(scored.trim()).unwrap();
    assert_eq!(v["label"], 2);
    assert!(out_dir.join("distribution.csv").exists());
    assert!(out_dir.join("run_info.json").exists());
}

#[test]
fn missing_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = texts(dir.path(), &["good"]);
    let out = run(&["score", "--corpus", s(&corpus), "--lexicon", "/nonexistent/lex.txt"]);
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["error"], "lexicon_not_found");
    assert_eq!(rec["exit_code"], 2);

    let out = run(&["report", "--corpus", "/nonexistent/c.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "corpus_not_found");

    let out = run(&["predict", "--model-path", "/nonexistent/m.bin", "hi"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "model_not_found");
}

#[test]
fn empty_corpus_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "empty.csv", &[]);
    let out = run(&["report", "--corpus", s(&corpus), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["error"], "empty_corpus");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["score", "--model", "gru"]).status.code(), Some(1));
    let out = run(&["score"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_record(&out)["error"], "usage");
    let out = run(&["score", "--corpus", "x.csv", "--threshold", "2"]);
    assert_eq!(error_record(&out)["error"], "config_invalid");
}

#[test]
fn divergence_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, _) = small_setup(dir.path());
    let cfg = dir.path().join("hot.toml");
    fs::write(&cfg, format!("{SMALL}lr = 1e30\n")).unwrap();
    let out = run(&["train", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(error_record(&out)["error"], "numeric_failure");
}

#[test]
fn train_evaluate_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, cfg) = small_setup(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for o in [&a, &b] {
        let out = run(&["train", "--config", s(&cfg), "--corpus", s(&corpus), "--epochs", "2", "--out", s(o)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ha = fs::read(a.join("history.json")).unwrap();
    assert_eq!(ha, fs::read(b.join("history.json")).unwrap());
    assert_eq!(fs::read(a.join("model.bin")).unwrap(), fs::read(b.join("model.bin")).unwrap());
    let hist: serde_json::Value = serde_json::from_slice(&ha).unwrap();
    assert_eq!(hist["epochs"].as_array().unwrap().len(), 2);

    let out = run(&["evaluate", "--config", s(&cfg), "--corpus", s(&corpus), "--out", s(&a)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("Class-0") && table.contains("accuracy"));
    for f in ["evaluation.json", "evaluation.txt", "confusion.csv"] {
        assert!(a.join(f).exists(), "{f}");
    }

    // A different seed gives a different training split and vocabulary.
    let out = run(&["evaluate", "--config", s(&cfg), "--corpus", s(&corpus), "--seed", "7", "--out", s(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_record(&out)["error"], "vocab_mismatch");

    let model = a.join("model.bin");
    let table3 = "Same folks said daikon paste could treat a cytokine storm #PfizerBioNTech";
    let out = run(&["predict", "--model-path", s(&model), table3, "", "awful headache"]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["text"], table3);
    assert_eq!(lines[2]["text"], "awful headache");
    assert_eq!(lines[1]["label"], 0);
    assert_eq!(lines[1]["flags"], serde_json::json!(["empty_input"]));
    for l in &lines {
        let p: f64 = l["probs"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert!((p - 1.0).abs() < 1e-5);
    }

    let mut child = bin()
        .args(["predict", "--model-path", s(&model), "--stdin"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"one\ntwo\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn bilstm_model_has_backward_cell() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, cfg) = small_setup(dir.path());
    let o = dir.path().join("o");
    let out = run(&[
        "train", "--config", s(&cfg), "--corpus", s(&corpus), "--model", "bilstm", "--epochs", "1", "--out", s(&o),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let header = read_header(&fs::read(o.join("model.bin")).unwrap()).unwrap();
    assert!(header.tensors.iter().any(|t| t.name.starts_with("backward.")));
}

#[test]
fn report_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", &vaccine_corpus(300, 2));
    let o = dir.path().join("r");
    let snapshot = |o: &Path| {
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(o)
            .unwrap()
            .map(|e| e.unwrap())
            .filter(|e| e.file_name() != "run_info.json")
            .map(|e| (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap()))
            .collect();
        files.sort();
        files
    };
    assert!(run(&["report", "--corpus", s(&corpus), "--out", s(&o)]).status.success());
    let first = snapshot(&o);
    assert!(run(&["report", "--corpus", s(&corpus), "--out", s(&o)]).status.success());
    assert_eq!(first, snapshot(&o));
    let names: Vec<&str> = first.iter().map(|f| f.0.as_str()).collect();
    for f in ["distribution.csv", "terms_all.csv", "terms_india.csv", "locations.csv", "manifest.json"] {
        assert!(names.contains(&f), "{f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&first.iter().find(|f| f.0 == "manifest.json").unwrap().1).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["threshold"], 0.05);
    assert_eq!(manifest["test_fraction"], 0.25);
}

#[test]
fn clean_streams_stdin() {
    let mut child = bin()
        .arg("clean")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all("Got my #Pfizer shot! https://t.co/abc\n\nwow\n".as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "Got my Pfizer shot\n\nwow\n");
}
