use ontorel_core::prompt::{Direction, Stage};
use ontorel_core::RequestTag;

use crate::config::MockScript;
use crate::error::InferenceError;

/// Evaluates a [`MockScript`] for one request.
#[derive(Debug, Clone)]
pub struct MockBackend {
    script: MockScript,
}

impl MockBackend {
    pub fn new(script: MockScript) -> Self {
        MockBackend { script }
    }

    pub fn script(&self) -> &MockScript {
        &self.script
    }

    pub fn respond(&self, prompt: &str, tag: &RequestTag) -> Result<String, InferenceError> {
        match &self.script {
            MockScript::Fixed { fixed_response } => Ok(fixed_response.clone()),
            MockScript::Scripted { script } => script
                .get(prompt)
                .or_else(|| script.get(&tag.to_string()))
                .or_else(|| script.get(&tag.pair_id))
                .cloned()
                .ok_or_else(|| InferenceError::UnknownScriptKey(tag.to_string())),
            MockScript::Oracle { gold } => {
                let label = gold
                    .get(&tag.pair_id)
                    .ok_or_else(|| InferenceError::UnknownScriptKey(tag.pair_id.clone()))?;
                let label = match tag.direction {
                    Direction::Ab => *label,
                    Direction::Ba => label.invert(),
                };
                Ok(match tag.stage {
                    Stage::Stage1 => "Both topics are defined in the usual way for their field.".to_string(),
                    Stage::Standard | Stage::Stage2 => format!("relationship: {label}"),
                })
            }
        }
    }
}
