use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ontorel_core::{ConceptGraph, DatasetBundle, Split};
use serde_json::{Map, Value};

use crate::error::{invalid, CliResult};
use crate::manifest::RunManifest;

mod adjudicate;
mod assemble;
mod classify;
mod evaluate;
mod finetune;
mod ingest;
mod report;
mod sample;

pub use adjudicate::{adjudicate, AdjudicateMode};
pub use assemble::assemble;
pub use classify::classify;
pub use evaluate::evaluate;
pub use finetune::export_finetune;
pub use ingest::ingest;
pub use report::report;
pub use sample::sample;

/// Stage result: fields of the summary line.
pub type Summary = Map<String, Value>;

/// A loaded manifest plus command-line overrides.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub manifest: RunManifest,
    pub out: PathBuf,
    pub audit_log: bool,
}

impl RunContext {
    pub fn load(manifest: &Path, out: Option<PathBuf>, seed: Option<u64>, audit_log: bool) -> CliResult<Self> {
        let mut m = RunManifest::load(manifest)?;
        if let Some(seed) = seed {
            m.seed = seed;
        }
        m.validate()?;
        let out = out.unwrap_or_else(|| m.output_dir.clone());
        Ok(RunContext {
            manifest: m,
            out,
            audit_log,
        })
    }

    pub fn graph_path(&self, source: &str) -> PathBuf {
        self.out.join(format!("{source}.graph.json"))
    }

    pub fn candidates_path(&self, source: &str) -> PathBuf {
        self.out.join(format!("{source}.candidates.jsonl"))
    }

    pub fn adjudication_dir(&self) -> PathBuf {
        self.out.join("adjudication")
    }

    pub fn adjudicated_path(&self) -> PathBuf {
        self.out.join("adjudicated.jsonl")
    }

    pub fn outcomes_path(&self) -> PathBuf {
        self.out.join("outcomes.jsonl")
    }

    pub fn audit_path(&self) -> PathBuf {
        self.out.join("audit.jsonl")
    }

    pub fn predictions_path(&self) -> PathBuf {
        self.out.join("predictions.jsonl")
    }

    pub fn report_json_path(&self) -> PathBuf {
        self.out.join("report.json")
    }

    pub fn report_md_path(&self) -> PathBuf {
        self.out.join("report.md")
    }

    pub fn ontology_path(&self) -> PathBuf {
        self.out.join("ontology.nt")
    }

    pub fn rejected_path(&self) -> PathBuf {
        self.out.join("rejected.jsonl")
    }

    pub fn summary_json_path(&self) -> PathBuf {
        self.out.join("summary.json")
    }

    pub fn summary_md_path(&self) -> PathBuf {
        self.out.join("summary.md")
    }

    fn ensure_out(&self) -> CliResult<()> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))
            .map_err(Into::into)
    }

    fn load_graph(&self, source: &str) -> CliResult<ConceptGraph> {
        let path = require(&self.graph_path(source), "ingest")?;
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        ConceptGraph::from_json_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    fn load_bundle(&self, name: &str) -> CliResult<DatasetBundle> {
        for split in Split::ALL {
            require(&DatasetBundle::split_path(&self.out, name, split), "sample")?;
        }
        DatasetBundle::read_files(&self.out, name).map_err(|e| invalid(e.to_string()))
    }
}

/// Missing inputs from an earlier stage are a validation error.
fn require(path: &Path, stage: &str) -> CliResult<PathBuf> {
    if path.is_file() {
        Ok(path.to_path_buf())
    } else {
        Err(invalid(format!("{} is missing; run `{stage}` first", path.display())))
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Into::into)
}

fn label_counts<'a>(pairs: impl IntoIterator<Item = &'a ontorel_core::LabeledPair>) -> [usize; 4] {
    let mut counts = [0; 4];
    for p in pairs {
        counts[p.label.index()] += 1;
    }
    counts
}

fn sizes_value(bundle: &DatasetBundle) -> Value {
    let [train, val, test] = bundle.sizes();
    serde_json::json!({ "train": train, "val": val, "test": test, "total": bundle.len() })
}
