use std::collections::BTreeMap;
use std::fmt;

use ontorel_core::RelationLabel;
use serde::{Deserialize, Serialize};

use crate::error::InferenceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Dialect {
    /// POST `{"prompt","max_new_tokens","temperature","stop"}`, read `text`.
    #[default]
    SimpleGenerate,
    /// POST `{"model","messages","temperature","max_tokens"}`, read
    /// `choices[0].message.content`.
    ChatCompletions,
    Mock,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::SimpleGenerate => "simple-generate",
            Dialect::ChatCompletions => "chat-completions",
            Dialect::Mock => "mock",
        })
    }
}

/// Deterministic stand-in for a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MockScript {
    /// Answers the gold label of each pair (inverted for the swapped order).
    Oracle {
        #[serde(default)]
        gold: BTreeMap<String, RelationLabel>,
    },
    /// Looks the response up by prompt text, then request tag, then pair id.
    Scripted { script: BTreeMap<String, String> },
    Fixed { fixed_response: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    /// Full request URL; used as given.
    pub base_url: Option<String>,
    pub dialect: Dialect,
    pub model_name: Option<String>,
    /// Name of the environment variable holding a bearer token.
    pub auth_env_var: Option<String>,
    pub temperature: f64,
    pub max_new_tokens: u32,
    pub stop_sequences: Vec<String>,
    pub timeout_secs: f64,
    /// Extra attempts after the first one.
    pub retries: u32,
    /// Delay before retry k (counting from 1) is `backoff_base_ms * 2^(k-1)`.
    pub backoff_base_ms: u64,
    pub max_in_flight: usize,
    pub mock: Option<MockScript>,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: None,
            dialect: Dialect::SimpleGenerate,
            model_name: None,
            auth_env_var: None,
            temperature: 0.0,
            max_new_tokens: 256,
            stop_sequences: Vec::new(),
            timeout_secs: 120.0,
            retries: 3,
            backoff_base_ms: 500,
            max_in_flight: 4,
            mock: None,
        }
    }
}

impl EndpointConfig {
    pub fn mock(script: MockScript) -> Self {
        EndpointConfig {
            dialect: Dialect::Mock,
            mock: Some(script),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), InferenceError> {
        let bad = |m: &str| Err(InferenceError::InvalidConfig(m.to_string()));
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be a finite number >= 0");
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1");
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return bad("timeout_secs must be positive");
        }
        match self.dialect {
            Dialect::Mock => {
                if self.mock.is_none() {
                    return bad("mock dialect needs a mock script");
                }
            }
            Dialect::SimpleGenerate | Dialect::ChatCompletions => {
                if self.base_url.as_deref().is_none_or(|u| u.trim().is_empty()) {
                    return bad("base_url is required for HTTP dialects");
                }
                if self.dialect == Dialect::ChatCompletions && self.model_name.is_none() {
                    return bad("chat-completions needs model_name");
                }
            }
        }
        Ok(())
    }
}
