use std::path::Path;
use std::time::{Duration, Instant};

use ontorel_core::{RequestTag, TextGenerator};
use serde_json::{json, Value};

use crate::audit::{AuditEntry, AuditLog};
use crate::config::{Dialect, EndpointConfig};
use crate::error::InferenceError;
use crate::mock::MockBackend;

enum Backend {
    Http {
        client: reqwest::blocking::Client,
        url: String,
        token: Option<String>,
    },
    Mock(MockBackend),
}

/// Shareable after construction; `generate` may be called from many threads.
pub struct InferenceClient {
    config: EndpointConfig,
    backend: Backend,
    audit: Option<AuditLog>,
}

impl InferenceClient {
    /// Validates the configuration and resolves the auth token from the
    /// environment.
    pub fn new(config: EndpointConfig) -> Result<Self, InferenceError> {
        config.validate()?;
        let backend = match config.dialect {
            Dialect::Mock => Backend::Mock(MockBackend::new(config.mock.clone().expect("validated"))),
            Dialect::SimpleGenerate | Dialect::ChatCompletions => {
                let token = match &config.auth_env_var {
                    Some(var) => Some(std::env::var(var).map_err(|_| InferenceError::MissingAuthToken(var.clone()))?),
                    None => None,
                };
                let client = reqwest::blocking::Client::builder()
                    .timeout(Duration::from_secs_f64(config.timeout_secs))
                    .build()
                    .map_err(|e| InferenceError::InvalidConfig(e.to_string()))?;
                Backend::Http {
                    client,
                    url: config.base_url.clone().expect("validated"),
                    token,
                }
            }
        };
        Ok(InferenceClient {
            config,
            backend,
            audit: None,
        })
    }

    pub fn with_audit_log(mut self, path: &Path) -> std::io::Result<Self> {
        self.audit = Some(AuditLog::open(path)?);
        Ok(self)
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    pub fn generate(&self, prompt: &str, tag: &RequestTag) -> Result<String, InferenceError> {
        let start = Instant::now();
        let (result, attempts) = match &self.backend {
            Backend::Mock(m) => (m.respond(prompt, tag), 1),
            Backend::Http { client, url, token } => self.generate_http(client, url, token.as_deref(), prompt),
        };
        if let Some(audit) = &self.audit {
            audit.record(&AuditEntry {
                timestamp: chrono::Utc::now().to_rfc3339(),
                tag: tag.to_string(),
                dialect: self.config.dialect.to_string(),
                prompt,
                response: result.as_ref().ok().map(String::as_str),
                error: result.as_ref().err().map(ToString::to_string),
                attempts,
                elapsed_ms: start.elapsed().as_millis(),
            });
        }
        result
    }

    fn request_body(&self, prompt: &str) -> Value {
        let c = &self.config;
        match c.dialect {
            Dialect::ChatCompletions => json!({
                "model": c.model_name,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": c.temperature,
                "max_tokens": c.max_new_tokens,
            }),
            _ => json!({
                "prompt": prompt,
                "max_new_tokens": c.max_new_tokens,
                "temperature": c.temperature,
                "stop": c.stop_sequences,
            }),
        }
    }

    fn extract_text(&self, body: &Value) -> Option<String> {
        let text = match self.config.dialect {
            Dialect::ChatCompletions => body.get("choices")?.get(0)?.get("message")?.get("content")?,
            _ => body.get("text")?,
        };
        text.as_str().map(String::from)
    }

    fn generate_http(
        &self,
        client: &reqwest::blocking::Client,
        url: &str,
        token: Option<&str>,
        prompt: &str,
    ) -> (Result<String, InferenceError>, u32) {
        let body = self.request_body(prompt);
        let max_attempts = self.config.retries + 1;
        let mut attempt = 0;
        loop {
            attempt += 1;
            let mut req = client.post(url).json(&body);
            if let Some(t) = token {
                req = req.bearer_auth(t);
            }
            let err = match req.send() {
                Err(e) => InferenceError::Transport {
                    attempts: attempt,
                    message: e.to_string(),
                },
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let parsed = resp
                            .json::<Value>()
                            .map_err(|e| InferenceError::MalformedResponseBody(e.to_string()))
                            .and_then(|v| {
                                self.extract_text(&v)
                                    .ok_or_else(|| InferenceError::MalformedResponseBody(truncate(&v.to_string())))
                            });
                        return (parsed, attempt);
                    }
                    let retryable = status.is_server_error() || status.as_u16() == 429;
                    let err = InferenceError::HttpStatus {
                        status: status.as_u16(),
                        attempts: attempt,
                        body: truncate(&resp.text().unwrap_or_default()),
                    };
                    if !retryable {
                        return (Err(err), attempt);
                    }
                    err
                }
            };
            if attempt >= max_attempts {
                return (Err(err), attempt);
            }
            let delay = self.config.backoff_base_ms.saturating_mul(1 << (attempt - 1).min(16));
            log::debug!("attempt {attempt} failed ({err}); retrying in {delay} ms");
            std::thread::sleep(Duration::from_millis(delay));
        }
    }
}

fn truncate(s: &str) -> String {
    const LIMIT: usize = 512;
    match s.char_indices().nth(LIMIT) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.to_string(),
    }
}

impl TextGenerator for InferenceClient {
    type Error = InferenceError;

    fn generate(&self, prompt: &str, tag: &RequestTag) -> Result<String, InferenceError> {
        InferenceClient::generate(self, prompt, tag)
    }
}
