use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InferenceError {
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint answered HTTP {status} after {attempts} attempt(s): {body}")]
    HttpStatus { status: u16, attempts: u32, body: String },
    #[error("malformed response body: {0}")]
    MalformedResponseBody(String),
    #[error("environment variable {0} holding the bearer token is not set")]
    MissingAuthToken(String),
    #[error("mock script has no entry for {0}")]
    UnknownScriptKey(String),
    #[error("invalid endpoint configuration: {0}")]
    InvalidConfig(String),
}
