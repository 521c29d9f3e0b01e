#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use chrono::{TimeZone, Utc};
use ontorel_adjudication::{AdjudicationStore, Decision, QuorumPolicy, VerdictInput};
use serde_json::Value;

pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const MESH: &str = "http://id.nlm.nih.gov/mesh/vocab#";
const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

/// Ternary tree of `n` SKOS concepts. Concept `i` carries an altLabel
/// when `i % alt_every == 1`.
pub fn skos_tree(prefix: &str, n: usize, alt_every: usize) -> String {
    let mut nt = String::new();
    for i in 0..n {
        let s = format!("<http://example.org/{prefix}/{i}>");
        let _ = writeln!(nt, "{s} <{RDF_TYPE}> <{SKOS}Concept> .");
        let _ = writeln!(nt, "{s} <{SKOS}prefLabel> \"{prefix} topic {i}\"@en .");
        if i % alt_every == 1 {
            let _ = writeln!(nt, "{s} <{SKOS}altLabel> \"{prefix} synonym {i}\"@en .");
        }
        if i > 0 {
            let _ = writeln!(nt, "{s} <{SKOS}broader> <http://example.org/{prefix}/{}> .", (i - 1) / 3);
        }
    }
    nt
}

/// Ternary tree of `n` MeSH descriptors; the first `related` descriptors
/// are related to the descriptor `n / 2` places further on.
pub fn mesh_tree(n: usize, related: usize) -> String {
    assert!(related <= n / 2);
    let d = |i: usize| format!("<http://id.nlm.nih.gov/mesh/D{i:06}>");
    let mut nt = String::new();
    for i in 0..n {
        let _ = writeln!(nt, "{} <{RDF_TYPE}> <{MESH}TopicalDescriptor> .", d(i));
        let _ = writeln!(nt, "{} <{RDFS_LABEL}> \"heading {i}\"@en .", d(i));
        if i > 0 {
            let _ = writeln!(nt, "{} <{MESH}broaderDescriptor> {} .", d(i), d((i - 1) / 3));
        }
        if i < related {
            let _ = writeln!(nt, "{} <{MESH}relatedConcept> {} .", d(i), d(i + n / 2));
        }
    }
    nt
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliRun {
    /// The machine-readable summary: the last stdout line.
    pub fn summary(&self) -> Value {
        let line = self.stdout.lines().last().unwrap_or_else(|| panic!("no stdout; stderr: {}", self.stderr));
        serde_json::from_str(line).unwrap_or_else(|e| panic!("summary {line:?}: {e}"))
    }
}

pub fn ontorel(manifest: &Path, args: &[&str]) -> CliRun {
    let out = Command::new(env!("CARGO_BIN_EXE_ontorel"))
        .arg("--manifest")
        .arg(manifest)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn ontorel");
    CliRun {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Runs a stage and insists on success.
pub fn stage(manifest: &Path, args: &[&str]) -> Value {
    let run = ontorel(manifest, args);
    assert_eq!(run.code, 0, "ontorel {args:?} failed: {}\n{}", run.stdout, run.stderr);
    let s = run.summary();
    assert_eq!(s["status"], "ok");
    s
}

pub fn write_manifest(dir: &Path, manifest: &Value) -> std::path::PathBuf {
    let path = dir.join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(manifest).unwrap()).unwrap();
    path
}

/// Two reviewers accept the first `accept` candidates of `source` (in
/// pair-id order) and reject the rest.
pub fn review(adjudication_dir: &Path, source: &str, accept: usize) {
    let mut store = AdjudicationStore::open(adjudication_dir, QuorumPolicy::default()).unwrap();
    let mut ids: Vec<String> = store.candidates().filter(|c| c.source == source).map(|c| c.pair_id.clone()).collect();
    ids.sort();
    assert!(ids.len() >= accept, "{source}: {} candidates, want {accept} accepted", ids.len());
    let t = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
    for (i, id) in ids.iter().enumerate() {
        let decision = if i < accept { Decision::Accept } else { Decision::Reject };
        for annotator in ["reviewer-1", "reviewer-2"] {
            store
                .record_verdict(
                    VerdictInput {
                        pair_id: id.clone(),
                        annotator: annotator.into(),
                        decision,
                        note: None,
                    },
                    t,
                )
                .unwrap();
        }
    }
}

pub fn read_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}
