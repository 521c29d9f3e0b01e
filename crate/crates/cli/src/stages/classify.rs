use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use ontorel_core::prompt::TemplateStage;
use ontorel_core::{classify_batch, PairInput, PromptTemplate, TemplateSet};
use ontorel_inference::{EndpointConfig, InferenceClient, InferenceError, MockScript};

use super::{RunContext, Summary};
use crate::error::{invalid, CliResult};
use crate::manifest::{OnError, TemplatePaths};

/// Classifies one split of a dataset into `outcomes.jsonl`, one line per
/// pair in dataset order. Each line is flushed before the next pair is
/// written, so an aborted run leaves a readable prefix.
pub fn classify(ctx: &RunContext) -> CliResult<Summary> {
    let m = &ctx.manifest;
    let settings = &m.classify;
    let mut endpoint = m.endpoint.clone().ok_or_else(|| invalid("manifest has no endpoint"))?;
    let name = settings.dataset.as_deref().unwrap_or(&m.name);
    let bundle = ctx.load_bundle(name)?;
    let mut pairs: Vec<PairInput> = bundle.split(settings.split).iter().map(PairInput::from).collect();
    if let Some(limit) = settings.limit {
        pairs.truncate(limit);
    }
    fill_oracle_gold(&mut endpoint, &pairs);
    let templates = load_templates(&m.templates)?;

    let workers = endpoint.max_in_flight;
    let mut client = InferenceClient::new(endpoint).map_err(|e| match e {
        InferenceError::InvalidConfig(_) | InferenceError::MissingAuthToken(_) => invalid(e.to_string()),
        other => anyhow::anyhow!(other).into(),
    })?;
    if ctx.audit_log {
        client = client.with_audit_log(&ctx.audit_path()).context("opening audit log")?;
    }

    let path = ctx.outcomes_path();
    let mut file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let (mut errors, mut parse_failures) = (0usize, 0usize);
    let written = classify_batch(&pairs, m.strategy, &client, &templates, workers, |outcome| {
        if outcome.has_error() {
            if settings.on_error == OnError::Abort {
                anyhow::bail!(
                    "pair {}: {}",
                    outcome.pair_id,
                    outcome.first_error().unwrap_or("request failed")
                );
            }
            errors += 1;
        }
        if outcome.final_label.is_failure() {
            parse_failures += 1;
        }
        let mut line = serde_json::to_string(&outcome).expect("outcome serializes");
        line.push('\n');
        file.write_all(line.as_bytes())
            .and_then(|()| file.flush())
            .with_context(|| format!("writing {}", path.display()))
    })
    .with_context(|| format!("classify aborted; {} holds the completed outcomes", path.display()))?;

    let mut s = Summary::new();
    s.insert("dataset".into(), name.into());
    s.insert("split".into(), settings.split.file_tag().into());
    s.insert("strategy".into(), m.strategy.to_string().into());
    s.insert("outcomes".into(), written.into());
    s.insert("request_errors".into(), errors.into());
    s.insert("parse_failures".into(), parse_failures.into());
    Ok(s)
}

/// An oracle mock without an explicit answer key answers from the
/// dataset being classified.
fn fill_oracle_gold(endpoint: &mut EndpointConfig, pairs: &[PairInput]) {
    if let Some(MockScript::Oracle { gold }) = &mut endpoint.mock {
        if gold.is_empty() {
            gold.extend(pairs.iter().filter_map(|p| Some((p.pair_id.clone(), p.gold?))));
        }
    }
}

fn load_templates(paths: &TemplatePaths) -> CliResult<TemplateSet> {
    let load = |stage, path: &Path| PromptTemplate::from_file(stage, path).map_err(|e| invalid(format!("{}: {e}", path.display())));
    let mut set = TemplateSet::default();
    match paths.standard.as_deref() {
        None => {}
        Some("builtin:finetune") => set.standard = PromptTemplate::finetune_user(),
        Some(other) if other.starts_with("builtin:") => return Err(invalid(format!("unknown template {other}"))),
        Some(path) => set.standard = load(TemplateStage::Standard, Path::new(path))?,
    }
    if let Some(p) = &paths.stage1 {
        set.stage1 = load(TemplateStage::CotStage1, p)?;
    }
    if let Some(p) = &paths.stage2 {
        set.stage2 = load(TemplateStage::CotStage2, p)?;
    }
    Ok(set)
}
