//! Turning research-topic taxonomies into labeled relation datasets,
//! classifying topic pairs with prompted language models, scoring the
//! predictions, and assembling accepted relations into a SKOS ontology.

pub mod assemble;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod finetune;
pub mod graph;
pub mod jsonl;
pub mod label;
pub mod ntriples;
pub mod prompt;
pub mod referee;
pub mod vocab;

pub use dataset::{
    extract_sameas_candidates, harvest_sameas, make_splits, merge_bundles, sample_hierarchical, sample_other,
    CandidatePair, DatasetBundle, DatasetError, ExclusionPolicy, LabeledPair, Provenance, Split, SplitSpec,
};
pub use error::CoreError;
pub use graph::{build_graph, graph_stats, Concept, ConceptGraph, GraphError, GraphStats, IngestConfig, SchemaDialect};
pub use label::{Prediction, RelationLabel};
pub use ntriples::{parse_ntriples, MalformedLine, Node, Term, Triple};
pub use prompt::{
    classify, classify_batch, parse_label, ClassificationOutcome, PairInput, PromptTemplate, RequestTag, Strategy,
    TemplateSet, TextGenerator,
};
pub use referee::{referee, Confidence, RefereeDecision, RefereeRule};
pub use eval::{evaluate, EvaluationReport, FailurePolicy, PredictionRecord};
pub use finetune::{export_conversations, ConversationRecord};
pub use assemble::{assemble, emit_skos, transitive_reduction, AssembledOntology, EmitOptions, RelationInput};
