use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ontorel_core::RequestTag;
use thiserror::Error;

use crate::client::InferenceClient;
use crate::error::InferenceError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BatchError {
    #[error("request tag {0} appears more than once")]
    DuplicateTag(String),
}

pub type BatchResults = BTreeMap<RequestTag, Result<String, InferenceError>>;

/// Runs every prompt with at most `max_in_flight` concurrent requests.
/// Failures stay attached to their own tag.
pub fn generate_batch(client: &InferenceClient, prompts: &[(RequestTag, String)]) -> Result<BatchResults, BatchError> {
    let mut seen = HashSet::new();
    for (tag, _) in prompts {
        if !seen.insert(tag) {
            return Err(BatchError::DuplicateTag(tag.to_string()));
        }
    }
    let next = AtomicUsize::new(0);
    let results = Mutex::new(BTreeMap::new());
    let workers = client.config().max_in_flight.min(prompts.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((tag, prompt)) = prompts.get(i) else { break };
                let r = client.generate(prompt, tag);
                results.lock().unwrap_or_else(|e| e.into_inner()).insert(tag.clone(), r);
            });
        }
    });
    Ok(results.into_inner().unwrap_or_else(|e| e.into_inner()))
}
