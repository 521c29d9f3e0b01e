//! Conversational fine-tuning files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetBundle, LabeledPair, Split};
use crate::label::RelationLabel;
use crate::prompt::classify_instruction;

const USER_PREFIX: &str = "Classify the relationship between '";
const USER_SEPARATOR: &str = "' and '";
const ANSWER_PREFIX: &str = "relationship: ";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConversationRecord {
    pub messages: Vec<ChatMessage>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConversationError {
    #[error("not a conversation record: {0}")]
    Json(String),
    #[error("expected user then assistant, got roles {0:?}")]
    Roles(Vec<String>),
    #[error("user content does not follow the classification template: {0:?}")]
    UserContent(String),
    #[error("assistant content is not a relationship answer: {0:?}")]
    AssistantContent(String),
}

impl ConversationRecord {
    pub fn from_pair(pair: &LabeledPair) -> Self {
        ConversationRecord {
            messages: vec![
                ChatMessage {
                    role: "user".into(),
                    content: classify_instruction(&pair.topic_a, &pair.topic_b),
                },
                ChatMessage {
                    role: "assistant".into(),
                    content: format!("{ANSWER_PREFIX}{}", pair.label),
                },
            ],
        }
    }

    /// Checks the record invariants and returns `(topic_a, topic_b, label)`.
    /// Topics containing `' and '` are split at the first occurrence.
    pub fn validate(&self) -> Result<(String, String, RelationLabel), ConversationError> {
        let roles: Vec<&str> = self.messages.iter().map(|m| m.role.as_str()).collect();
        if roles != ["user", "assistant"] {
            return Err(ConversationError::Roles(roles.into_iter().map(String::from).collect()));
        }
        let user = &self.messages[0].content;
        let (a, b) = user
            .strip_prefix(USER_PREFIX)
            .and_then(|s| s.strip_suffix('\''))
            .and_then(|s| s.split_once(USER_SEPARATOR))
            .ok_or_else(|| ConversationError::UserContent(user.clone()))?;
        let answer = &self.messages[1].content;
        let label = answer
            .strip_prefix(ANSWER_PREFIX)
            .and_then(|l| l.parse::<RelationLabel>().ok())
            .ok_or_else(|| ConversationError::AssistantContent(answer.clone()))?;
        Ok((a.to_string(), b.to_string(), label))
    }
}

pub fn parse_conversation_line(line: &str) -> Result<ConversationRecord, ConversationError> {
    let record: ConversationRecord =
        serde_json::from_str(line).map_err(|e| ConversationError::Json(e.to_string()))?;
    record.validate()?;
    Ok(record)
}

#[derive(Debug, Error)]
pub enum FinetuneError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {source}")]
    Invalid {
        path: String,
        line: usize,
        #[source]
        source: ConversationError,
    },
}

/// One line per pair, each newline-terminated.
pub fn render_conversations(pairs: &[LabeledPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(&serde_json::to_string(&ConversationRecord::from_pair(p)).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn chat_path(dir: &Path, name: &str, split: Split) -> PathBuf {
    dir.join(format!("{name}.{}.chat.jsonl", split.file_tag()))
}

/// Writes `<name>.<split>.chat.jsonl` and returns the number of lines. An
/// empty split still produces an (empty) file.
pub fn export_conversations(bundle: &DatasetBundle, split: Split, dir: &Path) -> Result<usize, FinetuneError> {
    let path = chat_path(dir, &bundle.name, split);
    let io = |source| FinetuneError::Io {
        path: path.display().to_string(),
        source,
    };
    let pairs = bundle.split(split);
    if pairs.is_empty() {
        log::warn!("split {split} of {} is empty; writing an empty file", bundle.name);
    }
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    for p in pairs {
        serde_json::to_writer(&mut w, &ConversationRecord::from_pair(p)).map_err(|e| io(e.into()))?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(pairs.len())
}

/// Parses every line of an exported file, failing on the first violation.
pub fn read_conversations(path: &Path) -> Result<Vec<ConversationRecord>, FinetuneError> {
    let p = path.display().to_string();
    let file = File::open(path).map_err(|source| FinetuneError::Io { path: p.clone(), source })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| FinetuneError::Io { path: p.clone(), source })?;
        let record = parse_conversation_line(&line).map_err(|source| FinetuneError::Invalid {
            path: p.clone(),
            line: i + 1,
            source,
        })?;
        out.push(record);
    }
    Ok(out)
}
