//! Blocking, thread-safe client for text-generation endpoints.
//!
//! Two HTTP wire dialects are supported (a plain `prompt -> text` endpoint
//! and the chat-completions shape) plus an in-process mock used by tests
//! and dry runs.

mod audit;
mod batch;
mod client;
mod config;
mod error;
mod mock;

pub use audit::AuditLog;
pub use batch::{generate_batch, BatchError};
pub use client::InferenceClient;
pub use config::{Dialect, EndpointConfig, MockScript};
pub use error::InferenceError;
pub use mock::MockBackend;
