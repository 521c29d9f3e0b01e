use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use ontorel_core::{CandidatePair, LabeledPair, Provenance};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CANDIDATES_FILE: &str = "candidates.jsonl";
pub const VERDICTS_FILE: &str = "verdicts.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub pair_id: String,
    pub annotator: String,
    pub decision: Decision,
    pub timestamp: DateTime<Utc>,
    #[serde(default)]
    pub note: Option<String>,
}

/// A verdict as submitted, before it is timestamped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictInput {
    pub pair_id: String,
    pub annotator: String,
    pub decision: Decision,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateStatus {
    Pending,
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuorumPolicy {
    pub required_accepts: usize,
    pub required_rejects: usize,
    /// Pairs with this many accept/reject verdicts are no longer served.
    pub panel_size: usize,
}

impl Default for QuorumPolicy {
    fn default() -> Self {
        QuorumPolicy {
            required_accepts: 2,
            required_rejects: 2,
            panel_size: 3,
        }
    }
}

impl QuorumPolicy {
    pub fn validate(&self) -> Result<(), StoreError> {
        if self.required_accepts == 0 || self.required_rejects == 0 {
            return Err(StoreError::InvalidPolicy("required counts must be at least 1".into()));
        }
        if self.required_accepts > self.panel_size || self.required_rejects > self.panel_size {
            return Err(StoreError::InvalidPolicy("required counts cannot exceed the panel size".into()));
        }
        Ok(())
    }

    fn status(&self, accepts: usize, rejects: usize) -> CandidateStatus {
        if accepts >= self.required_accepts {
            CandidateStatus::Accepted
        } else if rejects >= self.required_rejects {
            CandidateStatus::Rejected
        } else {
            CandidateStatus::Pending
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Progress {
    pub pending: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub total: usize,
}

/// A candidate together with its derived status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateView {
    #[serde(flatten)]
    pub candidate: CandidatePair,
    pub status: CandidateStatus,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("pair {pair_id} already queued with different content")]
    ConflictingCandidate { pair_id: String },
    #[error("unknown pair {0}")]
    UnknownPair(String),
    #[error("annotator id must not be empty")]
    EmptyAnnotator,
    #[error("invalid quorum policy: {0}")]
    InvalidPolicy(String),
    #[error("{path} line {line} is not valid: {reason}")]
    CorruptLog { path: String, line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

struct AppendLog {
    path: PathBuf,
    file: File,
}

impl AppendLog {
    /// Opens `path`, returning the parsed records. A final line without a
    /// newline is a torn write and is cut off.
    fn open<T: DeserializeOwned>(path: PathBuf) -> Result<(Self, Vec<T>), StoreError> {
        let io = |source| StoreError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut file = OpenOptions::new().create(true).read(true).append(true).open(&path).map_err(io)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io)?;
        let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        if complete < bytes.len() {
            log::warn!(
                "{}: discarding {} bytes of an incomplete final record",
                path.display(),
                bytes.len() - complete
            );
            file.set_len(complete as u64).map_err(io)?;
            file.sync_all().map_err(io)?;
        }
        let text = String::from_utf8_lossy(&bytes[..complete]);
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str(line).map_err(|e| StoreError::CorruptLog {
                path: path.display().to_string(),
                line: i + 1,
                reason: e.to_string(),
            })?;
            records.push(record);
        }
        Ok((AppendLog { path, file }, records))
    }

    fn append<'a, T: Serialize + 'a>(&mut self, records: impl IntoIterator<Item = &'a T>) -> Result<(), StoreError> {
        let mut buf = Vec::new();
        for r in records {
            serde_json::to_writer(&mut buf, r).expect("serializable");
            buf.push(b'\n');
        }
        let io = |source| StoreError::Io {
            path: self.path.display().to_string(),
            source,
        };
        self.file.write_all(&buf).map_err(io)?;
        self.file.sync_data().map_err(io)
    }
}

pub struct AdjudicationStore {
    policy: QuorumPolicy,
    candidates: BTreeMap<String, CandidatePair>,
    verdicts: Vec<Verdict>,
    /// pair -> annotator -> latest accept/reject
    effective: HashMap<String, HashMap<String, Decision>>,
    /// annotator -> pairs they have answered in any way
    seen: HashMap<String, HashSet<String>>,
    candidate_log: AppendLog,
    verdict_log: AppendLog,
}

impl AdjudicationStore {
    /// Opens (or creates) the store in `dir` and replays both logs.
    pub fn open(dir: &Path, policy: QuorumPolicy) -> Result<Self, StoreError> {
        policy.validate()?;
        std::fs::create_dir_all(dir).map_err(|source| StoreError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let (candidate_log, candidates) = AppendLog::open::<CandidatePair>(dir.join(CANDIDATES_FILE))?;
        let (verdict_log, verdicts) = AppendLog::open::<Verdict>(dir.join(VERDICTS_FILE))?;
        let mut store = AdjudicationStore {
            policy,
            candidates: BTreeMap::new(),
            verdicts: Vec::new(),
            effective: HashMap::new(),
            seen: HashMap::new(),
            candidate_log,
            verdict_log,
        };
        for c in candidates {
            store.candidates.entry(c.pair_id.clone()).or_insert(c);
        }
        for v in verdicts {
            if !store.candidates.contains_key(&v.pair_id) {
                log::warn!("verdict for unknown pair {} ignored during replay", v.pair_id);
                continue;
            }
            store.apply(v);
        }
        Ok(store)
    }

    pub fn policy(&self) -> QuorumPolicy {
        self.policy
    }

    fn apply(&mut self, v: Verdict) {
        self.seen.entry(v.annotator.clone()).or_default().insert(v.pair_id.clone());
        if v.decision != Decision::Skip {
            self.effective
                .entry(v.pair_id.clone())
                .or_default()
                .insert(v.annotator.clone(), v.decision);
        }
        self.verdicts.push(v);
    }

    /// Adds new candidates; identical resubmissions are ignored. Nothing
    /// is written if any candidate conflicts.
    pub fn enqueue(&mut self, candidates: &[CandidatePair]) -> Result<usize, StoreError> {
        let mut fresh: BTreeMap<&str, &CandidatePair> = BTreeMap::new();
        for c in candidates {
            let existing = self.candidates.get(&c.pair_id).or_else(|| fresh.get(c.pair_id.as_str()).copied());
            match existing {
                Some(e) if e == c => {}
                Some(_) => {
                    return Err(StoreError::ConflictingCandidate {
                        pair_id: c.pair_id.clone(),
                    })
                }
                None => {
                    fresh.insert(&c.pair_id, c);
                }
            }
        }
        self.candidate_log.append(fresh.values().copied())?;
        let added = fresh.len();
        for c in fresh.into_values() {
            self.candidates.insert(c.pair_id.clone(), c.clone());
        }
        Ok(added)
    }

    fn counts(&self, pair_id: &str) -> (usize, usize) {
        self.effective.get(pair_id).map_or((0, 0), |m| {
            let accepts = m.values().filter(|d| **d == Decision::Accept).count();
            (accepts, m.len() - accepts)
        })
    }

    pub fn status(&self, pair_id: &str) -> Option<CandidateStatus> {
        self.candidates.get(pair_id)?;
        let (a, r) = self.counts(pair_id);
        Some(self.policy.status(a, r))
    }

    /// First pending pair (by pair id) this annotator has not answered.
    pub fn next_pending(&self, annotator: &str) -> Option<CandidateView> {
        let seen = self.seen.get(annotator);
        self.candidates
            .values()
            .filter(|c| !seen.is_some_and(|s| s.contains(&c.pair_id)))
            .find(|c| {
                let (a, r) = self.counts(&c.pair_id);
                self.policy.status(a, r) == CandidateStatus::Pending && a + r < self.policy.panel_size
            })
            .map(|c| CandidateView {
                candidate: c.clone(),
                status: CandidateStatus::Pending,
            })
    }

    pub fn record_verdict(&mut self, input: VerdictInput, timestamp: DateTime<Utc>) -> Result<CandidateStatus, StoreError> {
        if input.annotator.trim().is_empty() {
            return Err(StoreError::EmptyAnnotator);
        }
        if !self.candidates.contains_key(&input.pair_id) {
            return Err(StoreError::UnknownPair(input.pair_id));
        }
        let v = Verdict {
            pair_id: input.pair_id,
            annotator: input.annotator,
            decision: input.decision,
            timestamp,
            note: input.note,
        };
        self.verdict_log.append([&v])?;
        let pair_id = v.pair_id.clone();
        self.apply(v);
        Ok(self.status(&pair_id).expect("known pair"))
    }

    pub fn progress(&self) -> Progress {
        let mut p = Progress {
            total: self.candidates.len(),
            ..Default::default()
        };
        for id in self.candidates.keys() {
            match self.status(id).expect("known pair") {
                CandidateStatus::Pending => p.pending += 1,
                CandidateStatus::Accepted => p.accepted += 1,
                CandidateStatus::Rejected => p.rejected += 1,
            }
        }
        p
    }

    /// Accepted candidates as same-as pairs, sorted by pair id.
    pub fn finalize(&self) -> Vec<LabeledPair> {
        self.candidates
            .values()
            .filter(|c| self.status(&c.pair_id) == Some(CandidateStatus::Accepted))
            .map(|c| c.clone().into_same_as(Provenance::AdjudicatedCandidate))
            .collect()
    }

    pub fn candidates(&self) -> impl Iterator<Item = &CandidatePair> {
        self.candidates.values()
    }

    pub fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }
}
