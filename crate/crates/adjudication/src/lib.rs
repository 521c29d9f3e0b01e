//! Human review of candidate synonym pairs.
//!
//! Candidates and verdicts live in two append-only JSONL files; every
//! status is recomputed from the verdict log, so restarting the service
//! recovers its exact state.

mod server;
mod store;

pub use server::{router, serve, SharedStore};
pub use store::{
    AdjudicationStore, CandidateStatus, CandidateView, Decision, Progress, QuorumPolicy, StoreError, Verdict,
    VerdictInput, CANDIDATES_FILE, VERDICTS_FILE,
};
