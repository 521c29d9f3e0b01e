use std::path::Path;

use anyhow::Context;
use ontorel_core::jsonl::{read_jsonl, write_jsonl};
use ontorel_core::{ClassificationOutcome, PredictionRecord};

use super::{require, write_file, RunContext, Summary};
use crate::error::{invalid, CliResult};

/// Scores `outcomes.jsonl` (or an external predictions file) into
/// `report.json` and `report.md`.
pub fn evaluate(ctx: &RunContext, predictions: Option<&Path>) -> CliResult<Summary> {
    let records: Vec<PredictionRecord> = match predictions {
        Some(path) => read_jsonl(&require(path, "classify")?).map_err(|e| invalid(e.to_string()))?,
        None => {
            let path = require(&ctx.outcomes_path(), "classify")?;
            let outcomes: Vec<ClassificationOutcome> = read_jsonl(&path).map_err(|e| invalid(e.to_string()))?;
            let records = outcomes
                .iter()
                .map(|o| {
                    PredictionRecord::from_outcome(o)
                        .ok_or_else(|| invalid(format!("outcome {} has no gold label", o.pair_id)))
                })
                .collect::<CliResult<Vec<_>>>()?;
            write_jsonl(&ctx.predictions_path(), &records).context("writing predictions")?;
            records
        }
    };
    let policy = ctx.manifest.evaluate.failure_policy;
    let report = ontorel_core::evaluate(&records, policy).map_err(|e| invalid(e.to_string()))?;
    write_file(&ctx.report_json_path(), &report.to_json_string())?;
    write_file(&ctx.report_md_path(), &report.to_markdown())?;

    let mut s = Summary::new();
    s.insert("records".into(), report.records.into());
    s.insert("parse_failures".into(), report.parse_failures.into());
    s.insert("accuracy".into(), report.accuracy.into());
    s.insert("macro_f1".into(), report.macro_avg.f1.into());
    Ok(s)
}
