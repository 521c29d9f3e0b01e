//! The JSON run manifest: one file per experiment.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use ontorel_adjudication::QuorumPolicy;
use ontorel_core::assemble::EmitOptions;
use ontorel_core::eval::FailurePolicy;
use ontorel_core::{ExclusionPolicy, IngestConfig, SchemaDialect, Split, SplitSpec, Strategy};
use ontorel_inference::EndpointConfig;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    /// Name of the merged dataset and prefix of its files.
    pub name: String,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub split: SplitRatios,
    #[serde(default)]
    pub exclusion: ExclusionPolicy,
    #[serde(default)]
    pub quorum: QuorumPolicy,
    #[serde(default)]
    pub endpoint: Option<EndpointConfig>,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub templates: TemplatePaths,
    #[serde(default)]
    pub classify: ClassifySettings,
    #[serde(default)]
    pub evaluate: EvaluateSettings,
    #[serde(default)]
    pub assembly: AssemblySettings,
    #[serde(default)]
    pub adjudication: AdjudicationSettings,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub name: String,
    pub path: PathBuf,
    pub dialect: SchemaDialect,
    pub counts: LabelCounts,
    /// MeSH only: take related-edge pairs as same-as without review.
    #[serde(default)]
    pub auto_accept_related: bool,
    /// Already-validated same-as pairs (dataset JSONL) used instead of the
    /// adjudication output.
    #[serde(default)]
    pub same_as_path: Option<PathBuf>,
    #[serde(default)]
    pub ingest: IngestConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelCounts {
    pub broader: usize,
    pub narrower: usize,
    /// None takes every validated same-as pair for the source.
    #[serde(default)]
    pub same_as: Option<usize>,
    pub other: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitRatios {
    pub train: String,
    pub validation: String,
    pub test: String,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: "7/10".into(),
            validation: "1/10".into(),
            test: "2/10".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemplatePaths {
    /// A file path, or `builtin:finetune` for the bare instruction.
    pub standard: Option<String>,
    pub stage1: Option<PathBuf>,
    pub stage2: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnError {
    /// Stop at the first failed request; earlier outcomes stay on disk.
    #[default]
    Abort,
    /// Keep going and record the failure in the outcome.
    Record,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySettings {
    /// Dataset name; defaults to the manifest name.
    pub dataset: Option<String>,
    pub split: Split,
    pub limit: Option<usize>,
    pub on_error: OnError,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        ClassifySettings {
            dataset: None,
            split: Split::Test,
            limit: None,
            on_error: OnError::Abort,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSettings {
    pub failure_policy: FailurePolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyInput {
    /// Gold labels of every split of the merged dataset.
    #[default]
    Dataset,
    /// Final labels from the classification outcomes.
    Outcomes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssemblySettings {
    pub base_iri: String,
    pub input: AssemblyInput,
    pub reduce: bool,
    pub emit: EmitOptions,
}

impl Default for AssemblySettings {
    fn default() -> Self {
        AssemblySettings {
            base_iri: "http://example.org/topics/".into(),
            input: AssemblyInput::Dataset,
            reduce: true,
            emit: EmitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdjudicationSettings {
    pub bind: String,
    /// Directory of review UI assets served next to the API.
    pub assets: Option<PathBuf>,
}

impl Default for AdjudicationSettings {
    fn default() -> Self {
        AdjudicationSettings {
            bind: "127.0.0.1:8765".into(),
            assets: None,
        }
    }
}

fn is_safe_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl RunManifest {
    /// Reads the manifest and resolves relative paths against its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read manifest {}: {e}", path.display())))?;
        let mut m: RunManifest =
            serde_json::from_str(&text).map_err(|e| invalid(format!("manifest {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut m.output_dir);
        for s in &mut m.sources {
            resolve(&mut s.path);
            if let Some(p) = &mut s.same_as_path {
                resolve(p);
            }
        }
        if let Some(s) = &mut m.templates.standard {
            if !s.starts_with("builtin:") && Path::new(s).is_relative() {
                *s = base.join(&*s).display().to_string();
            }
        }
        for p in [&mut m.templates.stage1, &mut m.templates.stage2].into_iter().flatten() {
            resolve(p);
        }
        if let Some(p) = &mut m.adjudication.assets {
            resolve(p);
        }
        Ok(m)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !is_safe_name(&self.name) {
            return Err(invalid(format!("dataset name {:?} must be ASCII letters, digits, '-' or '_'", self.name)));
        }
        if self.sources.is_empty() {
            return Err(invalid("manifest lists no sources"));
        }
        let mut names = HashSet::new();
        for s in &self.sources {
            if !is_safe_name(&s.name) {
                return Err(invalid(format!("source name {:?} must be ASCII letters, digits, '-' or '_'", s.name)));
            }
            if s.name == self.name {
                return Err(invalid(format!("source {:?} has the same name as the merged dataset", s.name)));
            }
            if !names.insert(&s.name) {
                return Err(invalid(format!("source name {:?} is used twice", s.name)));
            }
            if !s.path.is_file() {
                return Err(invalid(format!("source {}: {} does not exist", s.name, s.path.display())));
            }
            if let Some(p) = &s.same_as_path {
                if !p.is_file() {
                    return Err(invalid(format!("source {}: {} does not exist", s.name, p.display())));
                }
            }
            if s.counts.broader != s.counts.narrower {
                return Err(invalid(format!(
                    "source {}: broader and narrower counts must match, each sampled edge yields one of each",
                    s.name
                )));
            }
            if s.auto_accept_related && s.dialect != SchemaDialect::Mesh {
                return Err(invalid(format!("source {}: auto_accept_related applies to mesh sources only", s.name)));
            }
        }
        self.split_spec()?;
        if let Some(e) = &self.endpoint {
            e.validate().map_err(|e| invalid(e.to_string()))?;
        }
        self.quorum.validate().map_err(|e| invalid(e.to_string()))?;
        if let Some(s) = &self.templates.standard {
            if !s.starts_with("builtin:") && !Path::new(s).is_file() {
                return Err(invalid(format!("template {s} does not exist")));
            }
        }
        for p in [&self.templates.stage1, &self.templates.stage2].into_iter().flatten() {
            if !p.is_file() {
                return Err(invalid(format!("template {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn split_spec(&self) -> CliResult<SplitSpec> {
        SplitSpec::parse(&self.split.train, &self.split.validation, &self.split.test, self.seed)
            .map_err(|e| invalid(e.to_string()))
    }

    pub fn source(&self, name: &str) -> Option<&SourceSpec> {
        self.sources.iter().find(|s| s.name == name)
    }
}
