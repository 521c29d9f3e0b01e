use ontorel_core::finetune::{chat_path, export_conversations};
use ontorel_core::Split;
use serde_json::json;

use super::{RunContext, Summary};
use crate::error::CliResult;

/// Writes `<dataset>.<split>.chat.jsonl` for every split.
pub fn export_finetune(ctx: &RunContext, dataset: Option<&str>) -> CliResult<Summary> {
    let name = dataset.unwrap_or(&ctx.manifest.name);
    let bundle = ctx.load_bundle(name)?;
    let mut files = Vec::new();
    for split in Split::ALL {
        let n = export_conversations(&bundle, split, &ctx.out).map_err(|e| anyhow::anyhow!(e))?;
        files.push(json!({
            "split": split.file_tag(),
            "file": chat_path(&ctx.out, name, split).file_name().map(|f| f.to_string_lossy().into_owned()),
            "records": n,
        }));
    }
    let mut s = Summary::new();
    s.insert("dataset".into(), name.into());
    s.insert("files".into(), files.into());
    Ok(s)
}
