use std::collections::BTreeMap;

use anyhow::Context;
use ontorel_core::jsonl::{read_jsonl, write_jsonl};
use ontorel_core::{emit_skos, transitive_reduction, ClassificationOutcome, RelationInput};

use super::{require, write_file, RunContext, Summary};
use crate::error::{invalid, CliResult};
use crate::manifest::AssemblyInput;

/// Builds `ontology.nt` from gold dataset labels or classified outcomes;
/// refused relations go to `rejected.jsonl`.
pub fn assemble(ctx: &RunContext) -> CliResult<Summary> {
    let m = &ctx.manifest;
    let settings = &m.assembly;
    let inputs: Vec<RelationInput> = match settings.input {
        AssemblyInput::Dataset => ctx.load_bundle(&m.name)?.iter().map(RelationInput::from).collect(),
        AssemblyInput::Outcomes => {
            let path = require(&ctx.outcomes_path(), "classify")?;
            let outcomes: Vec<ClassificationOutcome> = read_jsonl(&path).map_err(|e| invalid(e.to_string()))?;
            outcomes.iter().filter_map(RelationInput::from_outcome).collect()
        }
    };
    let assembled = ontorel_core::assemble(&inputs);
    let edges_before = assembled.hierarchy().len();
    let ontology = if settings.reduce {
        transitive_reduction(&assembled)
    } else {
        assembled.clone()
    };
    let nt = emit_skos(&ontology, &settings.base_iri, &settings.emit).map_err(|e| anyhow::anyhow!(e))?;
    write_file(&ctx.ontology_path(), &nt)?;
    write_jsonl(&ctx.rejected_path(), assembled.rejected()).context("writing rejected relations")?;

    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    for r in assembled.rejected() {
        let key = serde_json::to_value(r.reason).expect("serializable");
        *reasons.entry(key.as_str().unwrap_or_default().to_string()).or_default() += 1;
    }
    let merged_classes = ontology.classes().values().filter(|members| members.len() > 1).count();
    let mut s = Summary::new();
    s.insert("inputs".into(), inputs.len().into());
    s.insert("concepts".into(), ontology.concepts().len().into());
    s.insert("merged_classes".into(), merged_classes.into());
    s.insert("hierarchy_edges".into(), ontology.hierarchy().len().into());
    s.insert("removed_by_reduction".into(), (edges_before - ontology.hierarchy().len()).into());
    s.insert("rejected".into(), serde_json::to_value(reasons).expect("serializable"));
    s.insert("triples".into(), nt.lines().count().into());
    Ok(s)
}
