use anyhow::Context;
use ontorel_core::dataset::{harvest_sameas, subsample};
use ontorel_core::jsonl::read_jsonl;
use ontorel_core::{
    make_splits, merge_bundles, sample_hierarchical, sample_other, LabeledPair, RelationLabel,
};
use serde_json::json;

use super::{label_counts, require, sizes_value, RunContext, Summary};
use crate::error::{invalid, CliResult};
use crate::manifest::SourceSpec;

/// Builds one split bundle per source and the merged bundle.
pub fn sample(ctx: &RunContext) -> CliResult<Summary> {
    ctx.ensure_out()?;
    let m = &ctx.manifest;
    let spec = m.split_spec()?;
    let mut adjudicated: Option<Vec<LabeledPair>> = None;
    let mut bundles = Vec::new();
    let mut per_source = Vec::new();

    for src in &m.sources {
        let graph = ctx.load_graph(&src.name)?;
        let hierarchical = sample_hierarchical(&graph, src.counts.broader, m.seed, &src.name)
            .map_err(|e| anyhow::anyhow!("source {}: {e}", src.name))?;

        let pool = same_as_pool(ctx, src, &graph, &mut adjudicated)?;
        let same_as = match src.counts.same_as {
            None => pool,
            Some(n) => subsample(&pool, n, m.seed).map_err(|e| anyhow::anyhow!("source {} same-as: {e}", src.name))?,
        };
        let other = sample_other(&graph, src.counts.other, m.seed, &src.name, m.exclusion)
            .map_err(|e| anyhow::anyhow!("source {} other: {e}", src.name))?;

        let pairs: Vec<LabeledPair> = hierarchical.into_iter().chain(same_as).chain(other).collect();
        let bundle = make_splits(&src.name, &pairs, &spec).map_err(|e| anyhow::anyhow!("source {}: {e}", src.name))?;
        bundle.write_files(&ctx.out).context("writing dataset")?;
        let counts = label_counts(bundle.iter());
        log::info!("{}: {:?} pairs per split", src.name, bundle.sizes());
        per_source.push(json!({
            "source": src.name,
            "sizes": sizes_value(&bundle),
            "labels": label_map(counts),
        }));
        bundles.push(bundle);
    }

    let merged = merge_bundles(&bundles, &m.name).map_err(|e| anyhow::anyhow!("merging: {e}"))?;
    merged.write_files(&ctx.out).context("writing merged dataset")?;
    let mut s = Summary::new();
    s.insert("sources".into(), per_source.into());
    s.insert(
        "merged".into(),
        json!({ "name": merged.name, "sizes": sizes_value(&merged), "labels": label_map(label_counts(merged.iter())) }),
    );
    Ok(s)
}

fn label_map(counts: [usize; 4]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for label in RelationLabel::ALL {
        map.insert(label.as_str().into(), counts[label.index()].into());
    }
    map.into()
}

/// Validated same-as pairs available for one source.
fn same_as_pool(
    ctx: &RunContext,
    src: &SourceSpec,
    graph: &ontorel_core::ConceptGraph,
    adjudicated: &mut Option<Vec<LabeledPair>>,
) -> CliResult<Vec<LabeledPair>> {
    if let Some(path) = &src.same_as_path {
        let pairs: Vec<LabeledPair> = read_jsonl(path).map_err(|e| invalid(e.to_string()))?;
        if let Some(bad) = pairs.iter().find(|p| p.label != RelationLabel::SameAs) {
            return Err(invalid(format!("{}: pair {} is not same-as", path.display(), bad.pair_id)));
        }
        return Ok(pairs);
    }
    if src.auto_accept_related {
        return Ok(harvest_sameas(graph, &src.name, true).accepted);
    }
    if src.counts.same_as == Some(0) {
        return Ok(Vec::new());
    }
    if adjudicated.is_none() {
        let path = require(&ctx.adjudicated_path(), "adjudicate --finalize")?;
        *adjudicated = Some(read_jsonl(&path).map_err(|e| invalid(e.to_string()))?);
    }
    Ok(adjudicated
        .as_ref()
        .expect("loaded above")
        .iter()
        .filter(|p| p.source == src.name && p.label == RelationLabel::SameAs)
        .cloned()
        .collect())
}

