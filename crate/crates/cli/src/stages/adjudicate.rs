use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use anyhow::Context;
use ontorel_adjudication::AdjudicationStore;
use ontorel_core::jsonl::{read_jsonl, write_jsonl};
use ontorel_core::CandidatePair;

use super::{require, RunContext, Summary};
use crate::error::{invalid, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdjudicateMode {
    /// Load candidates and serve the review API until interrupted.
    Serve { bind: Option<String>, assets: Option<PathBuf> },
    /// Load candidates and exit.
    Enqueue,
    /// Write the accepted pairs to `adjudicated.jsonl`.
    Finalize,
}

pub fn adjudicate(ctx: &RunContext, mode: AdjudicateMode) -> CliResult<Summary> {
    ctx.ensure_out()?;
    let mut store = AdjudicationStore::open(&ctx.adjudication_dir(), ctx.manifest.quorum)
        .map_err(|e| anyhow::anyhow!("opening adjudication store: {e}"))?;

    let mut candidates: Vec<CandidatePair> = Vec::new();
    for src in ctx.manifest.sources.iter().filter(|s| !s.auto_accept_related && s.same_as_path.is_none()) {
        let path = require(&ctx.candidates_path(&src.name), "ingest")?;
        candidates.extend(read_jsonl::<CandidatePair>(&path).map_err(|e| invalid(e.to_string()))?);
    }
    let added = store.enqueue(&candidates).map_err(|e| invalid(e.to_string()))?;

    let mut s = Summary::new();
    s.insert("enqueued".into(), added.into());
    match mode {
        AdjudicateMode::Enqueue => {}
        AdjudicateMode::Finalize => {
            let accepted = store.finalize();
            write_jsonl(&ctx.adjudicated_path(), &accepted).context("writing adjudicated pairs")?;
            s.insert("accepted".into(), accepted.len().into());
        }
        AdjudicateMode::Serve { bind, assets } => {
            let bind = bind.unwrap_or_else(|| ctx.manifest.adjudication.bind.clone());
            let addr: SocketAddr = bind.parse().map_err(|e| invalid(format!("bind address {bind:?}: {e}")))?;
            let assets = assets.or_else(|| ctx.manifest.adjudication.assets.clone());
            if let Some(dir) = &assets {
                if !dir.is_dir() {
                    return Err(invalid(format!("assets directory {} does not exist", dir.display())));
                }
            }
            let shared = Arc::new(RwLock::new(store));
            ontorel_adjudication::serve(addr, shared.clone(), assets).context("adjudication service")?;
            store = Arc::try_unwrap(shared)
                .map_err(|_| anyhow::anyhow!("service still holds the store"))?
                .into_inner()
                .unwrap_or_else(|e| e.into_inner());
        }
    }
    s.insert("progress".into(), serde_json::to_value(store.progress()).expect("serializable"));
    Ok(s)
}
