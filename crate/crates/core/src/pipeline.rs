//! End-to-end commands behind the CLI: score, train, evaluate, report,
//! predict and clean.
//!
//! Every file written here depends only on the configuration and inputs.
//! Wall-clock times go to a separate `run_info.json`.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::{
    daily_timeline, hashtag_histogram, location_counts, sentiment_distribution, source_counts, top_terms,
    AnalyticsError, Distribution, LocationAliases, TermGroup, STOPWORDS,
};
use crate::ingest::{load_corpus, IngestError, IngestSummary, SchemaMode, TweetRecord};
use crate::metrics::{EvaluationReport, MetricsError};
use crate::polarity::Polarity;
use crate::seqmodel::{
    self, evaluate, load_model, save_model, split_indices, train, ModelState, SeqError, SequenceBatch, TrainConfig,
    Vocab,
};
use crate::textprep::clean_text;
use crate::vader::{self, classify, Lexicon, LexiconError, SentimentScores};

/// Parameter width used for training and saved models.
pub type Real = f32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Rows per term table.
    pub terms_k: usize,
    /// "all", a location group from the alias table, or "source:<name>".
    pub term_groups: Vec<String>,
    pub stopwords: bool,
    /// Alias table (TOML or JSON); the bundled table when unset.
    pub location_aliases: Option<PathBuf>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            terms_k: 50,
            term_groups: ["all", "USA", "UK", "Canada", "India"].map(String::from).to_vec(),
            stopwords: true,
            location_aliases: None,
        }
    }
}

/// Everything a run depends on. Only `corpus` lacks a usable default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    /// Valence lexicon; the bundled one when unset.
    pub lexicon: Option<PathBuf>,
    pub schema_mode: SchemaMode,
    pub threshold: f64,
    /// Score the raw tweet instead of the cleaned text (keeps punctuation cues).
    pub score_raw: bool,
    pub test_fraction: f64,
    /// Drives subsampling, the split, initialization and shuffling.
    /// Overrides `train.seed`.
    pub seed: u64,
    /// Train on a seeded random subset of this many tweets.
    pub subsample: Option<usize>,
    pub out_dir: PathBuf,
    /// Defaults to `<out_dir>/model.bin`.
    pub model_path: Option<PathBuf>,
    pub train: TrainConfig,
    pub report: ReportConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: None,
            lexicon: None,
            schema_mode: SchemaMode::Lenient,
            threshold: vader::constants::DEFAULT_THRESHOLD,
            score_raw: false,
            test_fraction: 0.25,
            seed: 42,
            subsample: None,
            out_dir: PathBuf::from("out"),
            model_path: None,
            train: TrainConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn from_path(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::from_io("config", path, e))?;
        let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.threshold >= 0.0 && self.threshold < 1.0) {
            return Err(PipelineError::Config(format!("threshold must be in [0,1), got {}", self.threshold)));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(PipelineError::Config(format!(
                "test_fraction must be in (0,1), got {}",
                self.test_fraction
            )));
        }
        if self.subsample == Some(0) {
            return Err(PipelineError::Config("subsample must be positive".into()));
        }
        self.train_config().validate().map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn model_path(&self) -> PathBuf {
        self.model_path.clone().unwrap_or_else(|| self.out_dir.join("model.bin"))
    }

    /// Training hyperparameters with the pipeline seed applied.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train.clone()
        }
    }

    fn corpus_path(&self) -> Result<&Path, PipelineError> {
        self.corpus
            .as_deref()
            .ok_or_else(|| PipelineError::Usage("a corpus path is required (--corpus or config)".into()))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{what} not found: {path}")]
    NotFound { what: &'static str, path: String },
    #[error("cannot access {what} {path}: {source}")]
    Io {
        what: &'static str,
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus is empty after ingest ({0} rows rejected)")]
    EmptyCorpus(usize),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("model vocabulary (hash {model}) does not match the corpus training split (hash {corpus}); was the model trained on this corpus and config?")]
    VocabMismatch { model: String, corpus: String },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Model(#[from] SeqError),
    #[error(transparent)]
    Serialize(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl PipelineError {
    fn from_io(what: &'static str, path: &Path, e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::NotFound {
            PipelineError::NotFound {
                what,
                path: path.display().to_string(),
            }
        } else {
            PipelineError::Io {
                what,
                path: path.display().to_string(),
                source: e,
            }
        }
    }

    /// Process exit status: 1 usage, 2 missing input, 3 empty or
    /// degenerate data, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        use PipelineError::*;
        match self {
            Usage(_) | Config(_) | VocabMismatch { .. } => 1,
            NotFound { .. } | Io { .. } | Csv(_) | Serialize(_) => 2,
            EmptyCorpus(_) | Degenerate(_) => 3,
            Ingest(e) => match e {
                IngestError::MissingColumns(_) => 3,
                _ => 2,
            },
            Lexicon(e) => match e {
                LexiconError::Empty => 3,
                LexiconError::BoosterOutOfRange { .. } => 1,
                _ => 2,
            },
            Model(e) => match e {
                SeqError::Diverged { .. } | SeqError::Numeric(_) => 4,
                SeqError::EmptyCorpus => 3,
                SeqError::Config(_) => 1,
                _ => 2,
            },
        }
    }

    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        use PipelineError::*;
        match self {
            Usage(_) => "usage",
            Config(_) => "config_invalid",
            NotFound { what: "corpus", .. } => "corpus_not_found",
            NotFound { what: "config", .. } => "config_not_found",
            NotFound { what: "model", .. } => "model_not_found",
            NotFound { what: "lexicon", .. } => "lexicon_not_found",
            NotFound { .. } => "input_not_found",
            Io { .. } => "io_error",
            EmptyCorpus(_) => "empty_corpus",
            Degenerate(_) => "degenerate_data",
            VocabMismatch { .. } => "vocab_mismatch",
            Ingest(IngestError::NotFound(_)) => "corpus_not_found",
            Ingest(IngestError::MissingColumns(_)) => "corpus_schema",
            Ingest(_) => "corpus_unreadable",
            Lexicon(LexiconError::NotFound(_)) => "lexicon_not_found",
            Lexicon(LexiconError::Empty) => "lexicon_empty",
            Lexicon(_) => "lexicon_invalid",
            Model(SeqError::Diverged { .. }) | Model(SeqError::Numeric(_)) => "numeric_failure",
            Model(SeqError::NotFound(_)) => "model_not_found",
            Model(SeqError::EmptyCorpus) => "empty_corpus",
            Model(SeqError::Config(_)) => "config_invalid",
            Model(_) => "model_unreadable",
            Serialize(_) => "serialize_error",
            Csv(_) => "io_error",
        }
    }

    pub fn to_record(&self) -> serde_json::Value {
        serde_json::json!({
            "error": self.code(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
    }
}

/// A corpus with one VADER score and label per accepted record.
#[derive(Debug, Clone)]
pub struct LabelledCorpus {
    pub records: Vec<TweetRecord>,
    pub scores: Vec<SentimentScores>,
    pub labels: Vec<Polarity>,
    pub summary: IngestSummary,
}

fn load_lexicon(cfg: &PipelineConfig) -> Result<Lexicon, PipelineError> {
    Ok(match &cfg.lexicon {
        Some(p) => vader::load_lexicon(p)?,
        None => Lexicon::bundled(),
    })
}

/// Ingests the corpus, then cleans, scores and classifies each tweet.
pub fn label_corpus(cfg: &PipelineConfig) -> Result<LabelledCorpus, PipelineError> {
    cfg.validate()?;
    let lex = load_lexicon(cfg)?;
    let (records, summary) = load_corpus(cfg.corpus_path()?, cfg.schema_mode)?;
    Ok(label_records(records, summary, &lex, cfg))
}

pub fn label_records(
    records: Vec<TweetRecord>,
    summary: IngestSummary,
    lex: &Lexicon,
    cfg: &PipelineConfig,
) -> LabelledCorpus {
    let scores: Vec<SentimentScores> = records
        .iter()
        .map(|r| {
            if cfg.score_raw {
                vader::score(&r.text, lex)
            } else {
                vader::score(&clean_text(&r.text).cleaned, lex)
            }
        })
        .collect();
    let labels = scores.iter().map(|s| classify(s, cfg.threshold)).collect();
    LabelledCorpus {
        records,
        scores,
        labels,
        summary,
    }
}

fn ensure_dir(dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(|e| PipelineError::from_io("output directory", dir, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    fs::write(path, bytes).map_err(|e| PipelineError::from_io("output file", path, e))
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, PipelineError> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, PipelineError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| PipelineError::Degenerate(e.to_string()))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `run_info.json` with wall-clock times for the command.
pub fn write_run_info(
    out_dir: &Path,
    command: &str,
    started: chrono::DateTime<chrono::Utc>,
) -> Result<(), PipelineError> {
    ensure_dir(out_dir)?;
    let info = serde_json::json!({
        "command": command,
        "started_at": started.to_rfc3339(),
        "finished_at": chrono::Utc::now().to_rfc3339(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_file(&out_dir.join("run_info.json"), &json_bytes(&info)?)
}

#[derive(Debug, Serialize)]
struct ScoredLine<'a> {
    id: &'a str,
    compound: f64,
    pos: f64,
    neg: f64,
    neu: f64,
    label: Polarity,
}

fn distribution_csv(d: &Distribution) -> Result<Vec<u8>, PipelineError> {
    csv_bytes(
        &["class", "label", "count", "percentage"],
        d.classes.iter().map(|c| {
            vec![
                c.class.index().to_string(),
                c.label.clone(),
                c.count.to_string(),
                format!("{:.4}", c.percentage),
            ]
        }),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreOutcome {
    pub summary: IngestSummary,
    pub distribution: Distribution,
}

/// Scores every tweet. Writes `scored.jsonl` (`{id, compound, pos, neg,
/// neu, label}` per line), `distribution.csv/json` and `ingest_summary.json`.
pub fn cmd_score(cfg: &PipelineConfig) -> Result<ScoreOutcome, PipelineError> {
    let corpus = label_corpus(cfg)?;
    if corpus.records.is_empty() {
        return Err(PipelineError::EmptyCorpus(corpus.summary.rejected));
    }
    ensure_dir(&cfg.out_dir)?;
    let mut lines = Vec::new();
    for ((r, s), l) in corpus.records.iter().zip(&corpus.scores).zip(&corpus.labels) {
        serde_json::to_writer(
            &mut lines,
            &ScoredLine {
                id: &r.id,
                compound: s.compound,
                pos: s.pos,
                neg: s.neg,
                neu: s.neu,
                label: *l,
            },
        )?;
        lines.push(b'\n');
    }
    write_file(&cfg.out_dir.join("scored.jsonl"), &lines)?;
    let distribution = sentiment_distribution(&corpus.labels).map_err(analytics_err)?;
    write_file(&cfg.out_dir.join("distribution.csv"), &distribution_csv(&distribution)?)?;
    write_file(&cfg.out_dir.join("distribution.json"), &json_bytes(&distribution)?)?;
    write_file(&cfg.out_dir.join("ingest_summary.json"), &json_bytes(&corpus.summary)?)?;
    Ok(ScoreOutcome {
        summary: corpus.summary,
        distribution,
    })
}

fn analytics_err(e: AnalyticsError) -> PipelineError {
    match e {
        AnalyticsError::Empty => PipelineError::EmptyCorpus(0),
        other => PipelineError::Degenerate(other.to_string()),
    }
}

/// Labelled, tokenized tweets and the seeded train/test partition.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub docs: Vec<Vec<String>>,
    pub labels: Vec<Polarity>,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

impl Dataset {
    pub fn train_docs(&self) -> Vec<Vec<String>> {
        self.train_idx.iter().map(|&i| self.docs[i].clone()).collect()
    }

    fn batch(&self, idx: &[usize], vocab: &Vocab, maxlen: usize) -> Result<SequenceBatch, PipelineError> {
        let docs: Vec<Vec<String>> = idx.iter().map(|&i| self.docs[i].clone()).collect();
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        Ok(SequenceBatch::encode(&docs, labels, vocab, maxlen)?)
    }
}

/// Optional seeded subsample, then the seeded split.
pub fn prepare_dataset(corpus: &LabelledCorpus, cfg: &PipelineConfig) -> Result<Dataset, PipelineError> {
    let n = corpus.records.len();
    if n == 0 {
        return Err(PipelineError::EmptyCorpus(corpus.summary.rejected));
    }
    let mut chosen: Vec<usize> = (0..n).collect();
    if let Some(k) = cfg.subsample.filter(|k| *k < n) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(1);
        chosen.shuffle(&mut rng);
        chosen.truncate(k);
        chosen.sort_unstable();
    }
    if chosen.len() < 2 {
        return Err(PipelineError::Degenerate("need at least two tweets to split".into()));
    }
    let docs: Vec<Vec<String>> = chosen
        .iter()
        .map(|&i| clean_text(&corpus.records[i].text).tokens)
        .collect();
    let labels: Vec<Polarity> = chosen.iter().map(|&i| corpus.labels[i]).collect();
    let (train_idx, test_idx) = split_indices(docs.len(), cfg.test_fraction, cfg.seed);
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(PipelineError::Degenerate("split leaves an empty side".into()));
    }
    Ok(Dataset {
        docs,
        labels,
        train_idx,
        test_idx,
    })
}

fn build_vocab(ds: &Dataset, cfg: &TrainConfig) -> Result<Vocab, PipelineError> {
    match Vocab::build(&ds.train_docs(), cfg.vocab_size) {
        Err(SeqError::EmptyCorpus) => Err(PipelineError::Degenerate("training split has no tokens".into())),
        other => Ok(other?),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainOutcome {
    pub model_path: PathBuf,
    pub train_size: usize,
    pub test_size: usize,
    pub vocab_size: usize,
    pub history: seqmodel::History,
}

/// Labels, splits, trains and saves. Writes the model file and
/// `history.json` (or `history_<kind>.json` when a model path is set).
pub fn cmd_train(cfg: &PipelineConfig) -> Result<TrainOutcome, PipelineError> {
    let corpus = label_corpus(cfg)?;
    let ds = prepare_dataset(&corpus, cfg)?;
    let tcfg = cfg.train_config();
    let vocab = build_vocab(&ds, &tcfg)?;
    let train_batch = ds.batch(&ds.train_idx, &vocab, tcfg.maxlen)?;
    let test_batch = ds.batch(&ds.test_idx, &vocab, tcfg.maxlen)?;
    let model = train::<Real>(vocab, &train_batch, Some(&test_batch), &tcfg)?;

    let model_path = cfg.model_path();
    if let Some(parent) = model_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    ensure_dir(&cfg.out_dir)?;
    save_model(&model, &model_path).map_err(|e| match e {
        SeqError::Io(io) => PipelineError::from_io("model file", &model_path, io),
        other => other.into(),
    })?;
    let history_name = if cfg.model_path.is_some() {
        format!("history_{}.json", tcfg.kind)
    } else {
        "history.json".to_owned()
    };
    write_file(&cfg.out_dir.join(history_name), &json_bytes(&model.history)?)?;
    Ok(TrainOutcome {
        model_path,
        train_size: train_batch.len(),
        test_size: test_batch.len(),
        vocab_size: model.vocab.len(),
        history: model.history,
    })
}

fn load(path: &Path) -> Result<ModelState<Real>, PipelineError> {
    load_model::<Real>(path).map_err(|e| match e {
        SeqError::NotFound(_) => PipelineError::NotFound {
            what: "model",
            path: path.display().to_string(),
        },
        other => other.into(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluateOutcome {
    pub report: EvaluationReport,
    pub test_loss: f64,
}

/// Re-derives the test split, checks the vocabulary against the model and
/// writes `evaluation.json`, `evaluation.txt` and `confusion.csv`.
pub fn cmd_evaluate(cfg: &PipelineConfig, model_path: &Path) -> Result<EvaluateOutcome, PipelineError> {
    let model = load(model_path)?;
    let corpus = label_corpus(cfg)?;
    let ds = prepare_dataset(&corpus, cfg)?;
    let vocab = build_vocab(&ds, &model.config)?;
    if vocab.content_hash() != model.vocab.content_hash() {
        return Err(PipelineError::VocabMismatch {
            model: model.vocab.content_hash(),
            corpus: vocab.content_hash(),
        });
    }
    let test = ds.batch(&ds.test_idx, &model.vocab, model.maxlen())?;
    let eval = evaluate(&model, &test)?;
    let report = EvaluationReport::evaluate(&test.labels, &eval.predictions).map_err(|e| match e {
        MetricsError::Empty => PipelineError::EmptyCorpus(0),
        other => PipelineError::Degenerate(other.to_string()),
    })?;

    ensure_dir(&cfg.out_dir)?;
    let json = serde_json::json!({
        "model_kind": model.kind(),
        "seed": model.config.seed,
        "threshold": cfg.threshold,
        "test_fraction": cfg.test_fraction,
        "test_loss": eval.loss,
        "matrix_orientation": "rows = true class, columns = predicted class; row-normalized by true-class totals",
        "report": report,
    });
    write_file(&cfg.out_dir.join("evaluation.json"), &json_bytes(&json)?)?;
    let title = format!("{} (test n = {})", model.kind().name().to_uppercase(), report.total);
    write_file(&cfg.out_dir.join("evaluation.txt"), report.to_table(&title).as_bytes())?;
    let rows = (0..Polarity::COUNT).map(|r| {
        let mut row = vec![r.to_string()];
        row.extend(report.matrix.counts[r].iter().map(u64::to_string));
        row.extend(report.matrix_row_normalized[r].iter().map(|v| format!("{v:.6}")));
        row
    });
    let header = ["true", "pred_0", "pred_1", "pred_2", "norm_0", "norm_1", "norm_2"];
    write_file(&cfg.out_dir.join("confusion.csv"), &csv_bytes(&header, rows)?)?;
    Ok(EvaluateOutcome {
        report,
        test_loss: eval.loss,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestFile {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Index of a report directory. Carries no timestamps.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub corpus_sha256: String,
    pub seed: u64,
    pub threshold: f64,
    pub test_fraction: f64,
    pub scored_text: String,
    pub ingest: IngestSummary,
    pub distribution: Distribution,
    pub files: Vec<ManifestFile>,
}

fn term_group(spec: &str) -> TermGroup {
    if spec.eq_ignore_ascii_case("all") {
        TermGroup::All
    } else if let Some(src) = spec.strip_prefix("source:") {
        TermGroup::Source(src.to_owned())
    } else {
        TermGroup::Location(spec.to_owned())
    }
}

fn file_stem(spec: &str) -> String {
    spec.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportOutcome {
    pub manifest: Manifest,
    pub warnings: Vec<String>,
}

/// Writes all analytics tables as CSV and JSON plus `manifest.json`.
pub fn cmd_report(cfg: &PipelineConfig) -> Result<ReportOutcome, PipelineError> {
    let corpus_path = cfg.corpus_path()?.to_path_buf();
    let corpus = label_corpus(cfg)?;
    if corpus.records.is_empty() {
        return Err(PipelineError::EmptyCorpus(corpus.summary.rejected));
    }
    let aliases = match &cfg.report.location_aliases {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| PipelineError::from_io("alias table", p, e))?;
            let parsed = if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
                LocationAliases::parse_json(&text)
            } else {
                LocationAliases::parse_toml(&text)
            };
            parsed.map_err(|e| PipelineError::Config(e.to_string()))?
        }
        None => LocationAliases::default(),
    };
    let stop: HashSet<&str> = STOPWORDS.iter().copied().collect();
    let stopwords = cfg.report.stopwords.then_some(&stop);
    let recs = &corpus.records;
    let labels = &corpus.labels;

    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut warnings = Vec::new();

    let dist = sentiment_distribution(labels).map_err(analytics_err)?;
    files.push(("distribution.csv".into(), distribution_csv(&dist)?));
    files.push(("distribution.json".into(), json_bytes(&dist)?));

    let timeline = daily_timeline(recs, labels).map_err(analytics_err)?;
    files.push((
        "timeline_daily.csv".into(),
        csv_bytes(
            &["day", "tweets"],
            timeline.iter().map(|p| vec![p.day.to_string(), p.total.to_string()]),
        )?,
    ));
    files.push((
        "timeline_sentiment.csv".into(),
        csv_bytes(
            &["day", "neutral", "negative", "positive", "total"],
            timeline.iter().map(|p| {
                let mut row = vec![p.day.to_string()];
                row.extend(p.per_class.iter().map(u64::to_string));
                row.push(p.total.to_string());
                row
            }),
        )?,
    ));
    files.push(("timeline.json".into(), json_bytes(&timeline)?));

    let hist = hashtag_histogram(recs);
    files.push((
        "hashtag_histogram.csv".into(),
        csv_bytes(
            &["hashtags", "tweets", "density"],
            hist.iter()
                .map(|b| vec![b.hashtags.to_string(), b.tweets.to_string(), format!("{:.6}", b.density)]),
        )?,
    ));
    files.push(("hashtag_histogram.json".into(), json_bytes(&hist)?));

    for spec in &cfg.report.term_groups {
        let ranking = top_terms(recs, &term_group(spec), cfg.report.terms_k, &aliases, stopwords);
        if let Some(w) = &ranking.warning {
            warnings.push(w.clone());
        }
        let stem = format!("terms_{}", file_stem(spec));
        files.push((
            format!("{stem}.csv"),
            csv_bytes(
                &["term", "count"],
                ranking.terms.iter().map(|(t, c)| vec![t.clone(), c.to_string()]),
            )?,
        ));
        files.push((format!("{stem}.json"), json_bytes(&ranking)?));
    }

    let counts_csv = |rows: &[(String, u64)], key: &str| {
        csv_bytes(&[key, "tweets"], rows.iter().map(|(k, n)| vec![k.clone(), n.to_string()]))
    };
    let sources = source_counts(recs);
    files.push(("sources.csv".into(), counts_csv(&sources, "source")?));
    files.push(("sources.json".into(), json_bytes(&sources)?));
    let locations = location_counts(recs, &aliases);
    files.push(("locations.csv".into(), counts_csv(&locations, "location")?));
    files.push(("locations.json".into(), json_bytes(&locations)?));

    ensure_dir(&cfg.out_dir)?;
    files.sort_by(|a, b| a.0.cmp(&b.0));
    for (name, bytes) in &files {
        write_file(&cfg.out_dir.join(name), bytes)?;
    }
    let corpus_bytes = fs::read(&corpus_path).map_err(|e| PipelineError::from_io("corpus", &corpus_path, e))?;
    let manifest = Manifest {
        corpus_sha256: sha256_hex(&corpus_bytes),
        seed: cfg.seed,
        threshold: cfg.threshold,
        test_fraction: cfg.test_fraction,
        scored_text: if cfg.score_raw { "raw" } else { "cleaned" }.to_owned(),
        ingest: corpus.summary,
        distribution: dist,
        files: files
            .iter()
            .map(|(name, bytes)| ManifestFile {
                name: name.clone(),
                bytes: bytes.len(),
                sha256: sha256_hex(bytes),
            })
            .collect(),
    };
    write_file(&cfg.out_dir.join("manifest.json"), &json_bytes(&manifest)?)?;
    Ok(ReportOutcome { manifest, warnings })
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictLine {
    pub text: String,
    pub label: Polarity,
    pub sentiment: &'static str,
    pub probs: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<&'static str>,
}

/// One prediction per input, in input order.
pub fn cmd_predict(model_path: &Path, texts: &[String]) -> Result<Vec<PredictLine>, PipelineError> {
    let model = load(model_path)?;
    Ok(texts
        .iter()
        .map(|t| {
            let p = seqmodel::predict(&model, t);
            PredictLine {
                text: t.clone(),
                label: p.label,
                sentiment: p.label.name(),
                probs: p.probs,
                flags: if p.empty_input { vec!["empty_input"] } else { Vec::new() },
            }
        })
        .collect())
}

/// Cleans each input line and writes one cleaned line per input line.
pub fn cmd_clean<R: BufRead, W: Write>(input: R, mut output: W) -> std::io::Result<usize> {
    let mut n = 0;
    for line in input.lines() {
        writeln!(output, "{}", clean_text(&line?).cleaned)?;
        n += 1;
    }
    output.flush()?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::write_corpus;

    fn corpus_file(dir: &Path, texts: &[&str]) -> PathBuf {
        let recs: Vec<TweetRecord> = crate::synth::vaccine_corpus(texts.len(), 1)
            .into_iter()
            .zip(texts)
            .map(|(mut r, t)| {
                r.text = t.to_string();
                r
            })
            .collect();
        let path = dir.join("corpus.csv");
        write_corpus(&recs, fs::File::create(&path).unwrap()).unwrap();
        path
    }

    fn cfg(dir: &Path, corpus: PathBuf) -> PipelineConfig {
        PipelineConfig {
            corpus: Some(corpus),
            out_dir: dir.join("out"),
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn score_one_good_tweet() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(dir.path(), corpus_file(dir.path(), &["good"]));
        let out = cmd_score(&c).unwrap();
        assert_eq!(out.distribution.count(Polarity::Positive), 1);
        let lines = fs::read_to_string(c.out_dir.join("scored.jsonl")).unwrap();
        let v: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
        assert_eq!(v["label"], 2);
        assert!(v["compound"].as_f64().unwrap() > 0.05);
        for key in ["id", "compound", "pos", "neg", "neu", "label"] {
            assert!(v.get(key).is_some());
        }
    }

    #[test]
    fn missing_lexicon_is_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(dir.path(), corpus_file(dir.path(), &["good"]));
        c.lexicon = Some(dir.path().join("nope.txt"));
        let e = cmd_score(&c).unwrap_err();
        assert_eq!((e.exit_code(), e.code()), (2, "lexicon_not_found"));
    }

    #[test]
    fn empty_corpus_is_exit_three() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_corpus(&[], fs::File::create(&path).unwrap()).unwrap();
        let e = cmd_report(&cfg(dir.path(), path)).unwrap_err();
        assert_eq!((e.exit_code(), e.code()), (3, "empty_corpus"));
    }

    #[test]
    fn report_writes_contract_files() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(dir.path(), corpus_file(dir.path(), &["Moderna dose today", "Pfizer shot great", "awful day"]));
        cmd_report(&c).unwrap();
        for f in [
            "distribution.csv",
            "timeline_daily.csv",
            "timeline_sentiment.csv",
            "hashtag_histogram.csv",
            "terms_all.csv",
            "terms_usa.csv",
            "sources.csv",
            "locations.csv",
            "manifest.json",
        ] {
            assert!(c.out_dir.join(f).exists(), "{f}");
        }
    }

    #[test]
    fn config_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("c.toml");
        fs::write(&toml_path, "seed = 7\nthreshold = 0.1\n[train]\nkind = \"bilstm\"\nepochs = 3\n").unwrap();
        let c = PipelineConfig::from_path(&toml_path).unwrap();
        assert_eq!((c.seed, c.train.epochs), (7, 3));
        assert_eq!(c.train_config().seed, 7);
        let json_path = dir.path().join("c.json");
        fs::write(&json_path, serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(PipelineConfig::from_path(&json_path).unwrap(), c);
        fs::write(&toml_path, "bogus = 1\n").unwrap();
        assert_eq!(PipelineConfig::from_path(&toml_path).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn clean_streams_lines() {
        let mut out = Vec::new();
        let n = cmd_clean("Hi, there! https://t.co/x\n\"quoted\" #tag\n".as_bytes(), &mut out).unwrap();
        assert_eq!(n, 2);
        assert_eq!(String::from_utf8(out).unwrap(), "Hi there\nquoted tag\n");
    }
}
