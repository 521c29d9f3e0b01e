use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::Serialize;

/// Append-only JSONL record of every request and its result.
#[derive(Debug)]
pub struct AuditLog {
    out: Mutex<BufWriter<File>>,
}

#[derive(Serialize)]
pub(crate) struct AuditEntry<'a> {
    pub timestamp: String,
    pub tag: String,
    pub dialect: String,
    pub prompt: &'a str,
    pub response: Option<&'a str>,
    pub error: Option<String>,
    pub attempts: u32,
    pub elapsed_ms: u128,
}

impl AuditLog {
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(AuditLog {
            out: Mutex::new(BufWriter::new(file)),
        })
    }

    pub(crate) fn record(&self, entry: &AuditEntry<'_>) {
        let mut out = self.out.lock().unwrap_or_else(|e| e.into_inner());
        let line = serde_json::to_string(entry).expect("serializable");
        if let Err(e) = writeln!(out, "{line}").and_then(|_| out.flush()) {
            log::warn!("audit log write failed: {e}");
        }
    }
}
