use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ontorel_cli::stages::{self, AdjudicateMode, Summary};
use ontorel_cli::{CliResult, RunContext};
use serde_json::Value;

/// Topic-relation datasets, LLM classification and ontology assembly.
#[derive(Debug, Parser)]
#[command(name = "ontorel", version)]
struct Cli {
    /// Run manifest (JSON).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Output directory; overrides the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record every model request in `audit.jsonl`.
    #[arg(long, global = true)]
    audit_log: bool,
    /// Overrides the manifest seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse sources into concept graphs and list same-as candidates.
    Ingest,
    /// Sample labeled pairs and write split datasets.
    Sample,
    /// Load candidates and serve the review API.
    Adjudicate {
        /// Load candidates and exit without serving.
        #[arg(long, conflicts_with = "finalize")]
        enqueue: bool,
        /// Write accepted pairs to `adjudicated.jsonl` and exit.
        #[arg(long)]
        finalize: bool,
        #[arg(long)]
        bind: Option<String>,
        /// Static review UI directory.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// Write chat-format fine-tuning files for a dataset.
    ExportFinetune {
        /// Dataset name; defaults to the merged dataset.
        #[arg(long)]
        dataset: Option<String>,
    },
    /// Classify a dataset split with the configured endpoint.
    Classify,
    /// Score outcomes against gold labels.
    Evaluate {
        /// Score this predictions file instead of `outcomes.jsonl`.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Build a SKOS ontology from labeled relations.
    Assemble,
    /// Summarize every stage output present.
    Report,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Sample => "sample",
            Command::Adjudicate { .. } => "adjudicate",
            Command::ExportFinetune { .. } => "export-finetune",
            Command::Classify => "classify",
            Command::Evaluate { .. } => "evaluate",
            Command::Assemble => "assemble",
            Command::Report => "report",
        }
    }
}

fn run(cli: &Cli) -> CliResult<Summary> {
    let manifest = cli
        .manifest
        .as_deref()
        .ok_or_else(|| ontorel_cli::error::invalid("--manifest is required"))?;
    let ctx = RunContext::load(manifest, cli.out.clone(), cli.seed, cli.audit_log)?;
    match &cli.command {
        Command::Ingest => stages::ingest(&ctx),
        Command::Sample => stages::sample(&ctx),
        Command::Adjudicate { enqueue, finalize, bind, assets } => {
            let mode = if *finalize {
                AdjudicateMode::Finalize
            } else if *enqueue {
                AdjudicateMode::Enqueue
            } else {
                AdjudicateMode::Serve {
                    bind: bind.clone(),
                    assets: assets.clone(),
                }
            };
            stages::adjudicate(&ctx, mode)
        }
        Command::ExportFinetune { dataset } => stages::export_finetune(&ctx, dataset.as_deref()),
        Command::Classify => stages::classify(&ctx),
        Command::Evaluate { predictions } => stages::evaluate(&ctx, predictions.as_deref()),
        Command::Assemble => stages::assemble(&ctx),
        Command::Report => stages::report(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stage = cli.command.name();
    let (line, code) = match run(&cli) {
        Ok(fields) => {
            let mut line = Summary::new();
            line.insert("stage".into(), stage.into());
            line.insert("status".into(), "ok".into());
            line.extend(fields);
            (line, 0)
        }
        Err(e) => {
            log::error!("{stage}: {e:#}");
            let mut line = Summary::new();
            line.insert("stage".into(), stage.into());
            line.insert("status".into(), "error".into());
            line.insert("exit_code".into(), e.exit_code().into());
            line.insert("error".into(), format!("{e:#}").into());
            (line, e.exit_code())
        }
    };
    println!("{}", Value::Object(line));
    ExitCode::from(code as u8)
}
