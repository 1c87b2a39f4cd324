use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use vaxsent::pipeline::{self, PipelineConfig, PipelineError};
use vaxsent::seqmodel::ModelKind;

/// Vaccine tweet sentiment: lexicon labelling, LSTM training and corpus reports.
#[derive(Debug, Parser)]
#[command(name = "vaxsent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Label every tweet with the valence engine.
    Score(Common),
    /// Train a classifier on the labelled training split.
    Train(Common),
    /// Evaluate a saved model on the re-derived test split.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Model file (defaults to <out>/model.bin or the config value).
        #[arg(long = "model-path")]
        model_path: Option<PathBuf>,
    },
    /// Write analytics tables and a manifest.
    Report(Common),
    /// Classify texts with a saved model, one JSON line per input.
    Predict {
        #[arg(long = "model-path")]
        model_path: PathBuf,
        /// Read one text per line from stdin instead of arguments.
        #[arg(long)]
        stdin: bool,
        texts: Vec<String>,
    },
    /// Clean raw lines from stdin to stdout.
    Clean,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML or JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long = "test-fraction")]
    test_fraction: Option<f64>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long = "batch-size")]
    batch_size: Option<usize>,
    #[arg(long)]
    subsample: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<PipelineConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::from_path(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = &self.corpus {
            cfg.corpus = Some(v.clone());
        }
        if let Some(v) = &self.lexicon {
            cfg.lexicon = Some(v.clone());
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.threshold {
            cfg.threshold = v;
        }
        if let Some(v) = self.test_fraction {
            cfg.test_fraction = v;
        }
        if let Some(v) = self.model {
            cfg.train.kind = v;
        }
        if let Some(v) = self.epochs {
            cfg.train.epochs = v;
        }
        if let Some(v) = self.batch_size {
            cfg.train.batch_size = v;
        }
        if let Some(v) = self.subsample {
            cfg.subsample = Some(v);
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), PipelineError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    let _ = writeln!(out);
    Ok(())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let started = chrono::Utc::now();
    match cli.command {
        Command::Score(c) => {
            let cfg = c.resolve()?;
            let out = pipeline::cmd_score(&cfg)?;
            pipeline::write_run_info(&cfg.out_dir, "score", started)?;
            print_json(&out)
        }
        Command::Train(c) => {
            let cfg = c.resolve()?;
            let out = pipeline::cmd_train(&cfg)?;
            pipeline::write_run_info(&cfg.out_dir, "train", started)?;
            print_json(&out)
        }
        Command::Evaluate { common, model_path } => {
            let cfg = common.resolve()?;
            let path = model_path.unwrap_or_else(|| cfg.model_path());
            let out = pipeline::cmd_evaluate(&cfg, &path)?;
            pipeline::write_run_info(&cfg.out_dir, "evaluate", started)?;
            print!("{}", out.report.to_table(""));
            Ok(())
        }
        Command::Report(c) => {
            let cfg = c.resolve()?;
            let out = pipeline::cmd_report(&cfg)?;
            pipeline::write_run_info(&cfg.out_dir, "report", started)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            print_json(&serde_json::json!({ "files": out.manifest.files.len(), "out": cfg.out_dir }))
        }
        Command::Predict {
            model_path,
            stdin,
            mut texts,
        } => {
            if stdin {
                for line in io::stdin().lock().lines() {
                    texts.push(line.map_err(|e| PipelineError::Usage(format!("reading stdin: {e}")))?);
                }
            }
            if texts.is_empty() {
                return Err(PipelineError::Usage("no input texts (pass arguments or --stdin)".into()));
            }
            for line in pipeline::cmd_predict(&model_path, &texts)? {
                print_json(&line)?;
            }
            Ok(())
        }
        Command::Clean => {
            let stdout = io::stdout();
            pipeline::cmd_clean(io::stdin().lock(), io::BufWriter::new(stdout.lock()))
                .map_err(|e| PipelineError::Usage(format!("clean: {e}")))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
