use std::fmt::Write as _;

use ontorel_core::{graph_stats, DatasetBundle, EvaluationReport, RelationLabel, Split};
use serde_json::{json, Value};

use super::{label_counts, write_file, RunContext, Summary};
use crate::error::{invalid, CliResult};

/// Collects whatever earlier stages have produced into `summary.json`
/// and `summary.md`. Missing stages are left out.
pub fn report(ctx: &RunContext) -> CliResult<Summary> {
    let m = &ctx.manifest;
    let mut md = format!("# Run {}\n\nseed: {}\n", m.name, m.seed);
    let mut doc = serde_json::Map::new();
    doc.insert("name".into(), m.name.clone().into());
    doc.insert("seed".into(), m.seed.into());

    let mut graphs = Vec::new();
    for src in &m.sources {
        if ctx.graph_path(&src.name).is_file() {
            let stats = graph_stats(&ctx.load_graph(&src.name)?);
            graphs.push((src.name.clone(), stats));
        }
    }
    if !graphs.is_empty() {
        md.push_str("\n## Sources\n\n| source | concepts | hierarchy edges | related edges | alt labels | cycles |\n|---|---|---|---|---|---|\n");
        for (name, g) in &graphs {
            let _ = writeln!(
                md,
                "| {name} | {} | {} | {} | {} | {} |",
                g.concepts, g.hierarchy_edges, g.related_edges, g.alt_labels, g.hierarchy_cycles
            );
        }
        let v: Vec<Value> = graphs.iter().map(|(n, g)| json!({ "source": n, "stats": g })).collect();
        doc.insert("sources".into(), v.into());
    }

    let mut datasets = Vec::new();
    for name in m.sources.iter().map(|s| s.name.as_str()).chain([m.name.as_str()]) {
        if Split::ALL.iter().all(|&s| DatasetBundle::split_path(&ctx.out, name, s).is_file()) {
            datasets.push(ctx.load_bundle(name)?);
        }
    }
    if !datasets.is_empty() {
        md.push_str("\n## Datasets\n\n| dataset | split | broader | narrower | same-as | other | total |\n|---|---|---|---|---|---|---|\n");
        let mut v = Vec::new();
        for bundle in &datasets {
            let mut splits = serde_json::Map::new();
            for split in Split::ALL {
                let counts = label_counts(bundle.split(split));
                let total: usize = counts.iter().sum();
                let _ = writeln!(
                    md,
                    "| {} | {} | {} | {} | {} | {} | {total} |",
                    bundle.name, split.file_tag(), counts[0], counts[1], counts[2], counts[3]
                );
                let labels: serde_json::Map<String, Value> =
                    RelationLabel::ALL.iter().map(|l| (l.as_str().to_string(), counts[l.index()].into())).collect();
                splits.insert(split.file_tag().into(), labels.into());
            }
            v.push(json!({ "dataset": bundle.name, "total": bundle.len(), "splits": splits }));
        }
        doc.insert("datasets".into(), v.into());
    }

    let report_path = ctx.report_json_path();
    if report_path.is_file() {
        let text = std::fs::read_to_string(&report_path).map_err(|e| anyhow::anyhow!(e))?;
        let report = EvaluationReport::from_json_str(&text).map_err(|e| invalid(format!("{}: {e}", report_path.display())))?;
        md.push_str("\n## Evaluation\n\n");
        md.push_str(&report.to_markdown());
        doc.insert(
            "evaluation".into(),
            json!({ "records": report.records, "accuracy": report.accuracy, "macro_f1": report.macro_avg.f1 }),
        );
    }

    let ontology_path = ctx.ontology_path();
    if ontology_path.is_file() {
        let text = std::fs::read_to_string(&ontology_path).map_err(|e| anyhow::anyhow!(e))?;
        let triples = text.lines().filter(|l| !l.trim().is_empty()).count();
        let broader = text.lines().filter(|l| l.contains("core#broader>")).count();
        let _ = write!(md, "\n## Ontology\n\ntriples: {triples}\nbroader edges: {broader}\n");
        doc.insert("ontology".into(), json!({ "triples": triples, "broader_edges": broader }));
    }

    let mut json_text = serde_json::to_string_pretty(&doc).expect("serializable");
    json_text.push('\n');
    write_file(&ctx.summary_json_path(), &json_text)?;
    write_file(&ctx.summary_md_path(), &md)?;

    let mut s = Summary::new();
    s.insert("sections".into(), doc.keys().filter(|k| !matches!(k.as_str(), "name" | "seed")).cloned().collect::<Vec<_>>().into());
    Ok(s)
}
