use std::fs;

use anyhow::Context;
use ontorel_core::dataset::harvest_sameas;
use ontorel_core::jsonl::write_jsonl;
use ontorel_core::{build_graph, graph_stats, parse_ntriples};
use serde_json::json;

use super::{write_file, RunContext, Summary};
use crate::error::{invalid, CliResult};

/// Parses every source into `<source>.graph.json` and lists the same-as
/// candidates that need review in `<source>.candidates.jsonl`.
pub fn ingest(ctx: &RunContext) -> CliResult<Summary> {
    ctx.ensure_out()?;
    let mut sources = Vec::new();
    for src in &ctx.manifest.sources {
        let text = fs::read_to_string(&src.path).with_context(|| format!("reading {}", src.path.display()))?;
        let triples = parse_ntriples(&text)
            .map_err(|e| invalid(format!("{}:{}: {}", src.path.display(), e.line_number, e.reason)))?;
        let (graph, warnings) = build_graph(&triples, src.dialect, &src.ingest)
            .map_err(|e| invalid(format!("source {}: {e}", src.name)))?;
        write_file(&ctx.graph_path(&src.name), &graph.to_json_string())?;

        let harvest = harvest_sameas(&graph, &src.name, src.auto_accept_related);
        let path = ctx.candidates_path(&src.name);
        write_jsonl(&path, &harvest.pending).context("writing candidates")?;
        log::info!(
            "{}: {} concepts, {} candidates for review",
            src.name,
            graph.concepts().len(),
            harvest.pending.len()
        );
        sources.push(json!({
            "source": src.name,
            "triples": triples.len(),
            "stats": graph_stats(&graph),
            "warnings": warnings,
            "candidates": harvest.pending.len(),
            "auto_accepted": harvest.accepted.len(),
        }));
    }
    let mut s = Summary::new();
    s.insert("sources".into(), sources.into());
    Ok(s)
}
