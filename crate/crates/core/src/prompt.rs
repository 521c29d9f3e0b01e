//! Prompt templates, response parsing and the two classification
//! strategies.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabeledPair;
use crate::label::{Prediction, RelationLabel};
use crate::referee::{referee, Confidence, RefereeRule};

pub const TOPIC_A: &str = "[TOPIC-A]";
pub const TOPIC_B: &str = "[TOPIC-B]";
pub const STAGE1_RESPONSE: &str = "[STAGE1-RESPONSE]";

const PLACEHOLDERS: [&str; 3] = [TOPIC_A, TOPIC_B, STAGE1_RESPONSE];

const DEFAULT_STANDARD: &str = include_str!("../templates/standard.txt");
const DEFAULT_STAGE1: &str = include_str!("../templates/cot-stage1.txt");
const DEFAULT_STAGE2: &str = include_str!("../templates/cot-stage2.txt");
const FINETUNE_USER: &str = include_str!("../templates/finetune-user.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemplateStage {
    Standard,
    CotStage1,
    CotStage2,
}

impl TemplateStage {
    fn requires(self, placeholder: &str) -> bool {
        placeholder != STAGE1_RESPONSE || self == TemplateStage::CotStage2
    }
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("template {id}: placeholder {placeholder} must appear exactly once, found {found}")]
    PlaceholderCount {
        id: String,
        placeholder: &'static str,
        found: usize,
    },
    #[error("template {id}: placeholder {placeholder} is not allowed for this stage")]
    UnexpectedPlaceholder { id: String, placeholder: &'static str },
    #[error("no value supplied for {0}")]
    MissingPlaceholderValue(&'static str),
    #[error("cannot read template {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    id: String,
    stage: TemplateStage,
    body: String,
}

impl PromptTemplate {
    pub fn new(id: impl Into<String>, stage: TemplateStage, body: impl Into<String>) -> Result<Self, TemplateError> {
        let id = id.into();
        let body = body.into();
        for placeholder in PLACEHOLDERS {
            let found = body.matches(placeholder).count();
            if stage.requires(placeholder) {
                if found != 1 {
                    return Err(TemplateError::PlaceholderCount { id, placeholder, found });
                }
            } else if found > 0 {
                return Err(TemplateError::UnexpectedPlaceholder { id, placeholder });
            }
        }
        Ok(PromptTemplate { id, stage, body })
    }

    pub fn from_file(stage: TemplateStage, path: &Path) -> Result<Self, TemplateError> {
        let body = std::fs::read_to_string(path).map_err(|source| TemplateError::Io {
            path: path.display().to_string(),
            source,
        })?;
        PromptTemplate::new(path.display().to_string(), stage, body)
    }

    pub fn default_standard() -> Self {
        PromptTemplate::new("builtin:standard", TemplateStage::Standard, DEFAULT_STANDARD).expect("valid builtin")
    }

    pub fn default_stage1() -> Self {
        PromptTemplate::new("builtin:cot-stage1", TemplateStage::CotStage1, DEFAULT_STAGE1).expect("valid builtin")
    }

    pub fn default_stage2() -> Self {
        PromptTemplate::new("builtin:cot-stage2", TemplateStage::CotStage2, DEFAULT_STAGE2).expect("valid builtin")
    }

    /// The bare instruction used for fine-tuning data and for prompting
    /// fine-tuned models.
    pub fn finetune_user() -> Self {
        PromptTemplate::new("builtin:finetune", TemplateStage::Standard, FINETUNE_USER).expect("valid builtin")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn stage(&self) -> TemplateStage {
        self.stage
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    /// Single left-to-right pass: substituted text is never rescanned.
    pub fn render(&self, topic_a: &str, topic_b: &str, stage1_response: Option<&str>) -> Result<String, TemplateError> {
        if self.stage == TemplateStage::CotStage2 && stage1_response.is_none() {
            return Err(TemplateError::MissingPlaceholderValue(STAGE1_RESPONSE));
        }
        let mut out = String::with_capacity(self.body.len() + topic_a.len() + topic_b.len());
        let mut rest = self.body.as_str();
        while let Some(pos) = rest.find('[') {
            out.push_str(&rest[..pos]);
            let tail = &rest[pos..];
            let hit = PLACEHOLDERS.iter().find(|p| tail.starts_with(**p));
            match hit {
                Some(&p) => {
                    out.push_str(match p {
                        TOPIC_A => topic_a,
                        TOPIC_B => topic_b,
                        _ => stage1_response.unwrap_or_default(),
                    });
                    rest = &tail[p.len()..];
                }
                None => {
                    out.push('[');
                    rest = &tail[1..];
                }
            }
        }
        out.push_str(rest);
        Ok(out)
    }
}

/// `Classify the relationship between '<a>' and '<b>'`.
pub fn classify_instruction(topic_a: &str, topic_b: &str) -> String {
    PromptTemplate::finetune_user()
        .render(topic_a, topic_b, None)
        .expect("standard stage needs no stage-1 text")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    pub standard: PromptTemplate,
    pub stage1: PromptTemplate,
    pub stage2: PromptTemplate,
}

impl Default for TemplateSet {
    fn default() -> Self {
        TemplateSet {
            standard: PromptTemplate::default_standard(),
            stage1: PromptTemplate::default_stage1(),
            stage2: PromptTemplate::default_stage2(),
        }
    }
}

/// Reads the label after the last `relationship:` marker. Never guesses.
pub fn parse_label(response: &str) -> Prediction {
    const MARKER: &str = "relationship:";
    let lower = response.to_ascii_lowercase();
    let Some(pos) = lower.rfind(MARKER) else {
        return Prediction::ParseFailure;
    };
    let mut tokens = lower[pos + MARKER.len()..]
        .split_whitespace()
        .map(|t| t.chars().filter(|c| c.is_alphanumeric()).collect::<String>())
        .filter(|t| !t.is_empty());
    let label = match tokens.next().as_deref() {
        Some("broader") => RelationLabel::Broader,
        Some("narrower") => RelationLabel::Narrower,
        Some("sameas") => RelationLabel::SameAs,
        Some("same") if tokens.next().as_deref() == Some("as") => RelationLabel::SameAs,
        Some("other") => RelationLabel::Other,
        _ => return Prediction::ParseFailure,
    };
    Prediction::Label(label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ab,
    Ba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Standard,
    Stage1,
    Stage2,
}

/// Identifies one generation request: `pair_id#ab#stage2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RequestTag {
    pub pair_id: String,
    pub direction: Direction,
    pub stage: Stage,
}

impl RequestTag {
    pub fn new(pair_id: impl Into<String>, direction: Direction, stage: Stage) -> Self {
        RequestTag {
            pair_id: pair_id.into(),
            direction,
            stage,
        }
    }
}

impl fmt::Display for RequestTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Ab => "ab",
            Direction::Ba => "ba",
        };
        let stage = match self.stage {
            Stage::Standard => "standard",
            Stage::Stage1 => "stage1",
            Stage::Stage2 => "stage2",
        };
        write!(f, "{}#{dir}#{stage}", self.pair_id)
    }
}

impl FromStr for RequestTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.rsplitn(3, '#');
        let (Some(stage), Some(dir), Some(pair_id)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("malformed request tag {s:?}"));
        };
        let direction = match dir {
            "ab" => Direction::Ab,
            "ba" => Direction::Ba,
            _ => return Err(format!("bad direction in {s:?}")),
        };
        let stage = match stage {
            "standard" => Stage::Standard,
            "stage1" => Stage::Stage1,
            "stage2" => Stage::Stage2,
            _ => return Err(format!("bad stage in {s:?}")),
        };
        Ok(RequestTag::new(pair_id, direction, stage))
    }
}

impl Serialize for RequestTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RequestTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Anything that turns a prompt into a completion. Implementations must be
/// safe to call from several threads at once.
pub trait TextGenerator: Send + Sync {
    type Error: std::error::Error + Send + Sync + 'static;

    fn generate(&self, prompt: &str, tag: &RequestTag) -> Result<String, Self::Error>;
}

impl<T: TextGenerator + ?Sized> TextGenerator for &T {
    type Error = T::Error;

    fn generate(&self, prompt: &str, tag: &RequestTag) -> Result<String, Self::Error> {
        (**self).generate(prompt, tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    Standard,
    BidirectionalCot,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Standard => "standard",
            Strategy::BidirectionalCot => "bidirectional-cot",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Strategy::Standard),
            "bidirectional-cot" => Ok(Strategy::BidirectionalCot),
            _ => Err(format!("unknown strategy {s:?}")),
        }
    }
}

/// Topics to classify, with the gold label when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairInput {
    pub pair_id: String,
    pub topic_a: String,
    pub topic_b: String,
    pub gold: Option<RelationLabel>,
}

impl From<&LabeledPair> for PairInput {
    fn from(p: &LabeledPair) -> Self {
        PairInput {
            pair_id: p.pair_id.clone(),
            topic_a: p.topic_a.clone(),
            topic_b: p.topic_b.clone(),
            gold: Some(p.label),
        }
    }
}

/// Raw responses and the parsed label for one presentation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionRun {
    pub responses: Vec<String>,
    pub parsed: Prediction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationOutcome {
    pub pair_id: String,
    pub strategy: Strategy,
    pub topic_a: String,
    pub topic_b: String,
    pub gold: Option<RelationLabel>,
    pub final_label: Prediction,
    pub run_ab: DirectionRun,
    pub run_ba: Option<DirectionRun>,
    pub referee_rule_fired: RefereeRule,
    pub confidence_flag: Option<Confidence>,
}

impl ClassificationOutcome {
    /// True when any request failed outright (as opposed to an unparseable answer).
    pub fn has_error(&self) -> bool {
        self.run_ab.error.is_some() || self.run_ba.as_ref().is_some_and(|r| r.error.is_some())
    }

    pub fn first_error(&self) -> Option<&str> {
        self.run_ab
            .error
            .as_deref()
            .or_else(|| self.run_ba.as_ref().and_then(|r| r.error.as_deref()))
    }
}

pub fn run_standard<G: TextGenerator + ?Sized>(
    pair: &PairInput,
    generator: &G,
    template: &PromptTemplate,
) -> ClassificationOutcome {
    let tag = RequestTag::new(&pair.pair_id, Direction::Ab, Stage::Standard);
    let run = match template.render(&pair.topic_a, &pair.topic_b, None) {
        Err(e) => failed_run(Vec::new(), e.to_string()),
        Ok(prompt) => match generator.generate(&prompt, &tag) {
            Ok(text) => DirectionRun {
                parsed: parse_label(&text),
                responses: vec![text],
                error: None,
            },
            Err(e) => failed_run(Vec::new(), e.to_string()),
        },
    };
    ClassificationOutcome {
        pair_id: pair.pair_id.clone(),
        strategy: Strategy::Standard,
        topic_a: pair.topic_a.clone(),
        topic_b: pair.topic_b.clone(),
        gold: pair.gold,
        final_label: run.parsed,
        run_ab: run,
        run_ba: None,
        referee_rule_fired: RefereeRule::NotApplicable,
        confidence_flag: None,
    }
}

fn failed_run(responses: Vec<String>, error: String) -> DirectionRun {
    DirectionRun {
        responses,
        parsed: Prediction::ParseFailure,
        error: Some(error),
    }
}

fn run_cot_direction<G: TextGenerator + ?Sized>(
    pair_id: &str,
    first: &str,
    second: &str,
    direction: Direction,
    generator: &G,
    templates: &TemplateSet,
) -> DirectionRun {
    let mut responses = Vec::with_capacity(2);
    let stage1 = match templates.stage1.render(first, second, None) {
        Ok(prompt) => generator.generate(&prompt, &RequestTag::new(pair_id, direction, Stage::Stage1)),
        Err(e) => return failed_run(responses, e.to_string()),
    };
    let r1 = match stage1 {
        Ok(text) => text,
        Err(e) => return failed_run(responses, e.to_string()),
    };
    responses.push(r1);
    let stage2 = match templates.stage2.render(first, second, Some(&responses[0])) {
        Ok(prompt) => generator.generate(&prompt, &RequestTag::new(pair_id, direction, Stage::Stage2)),
        Err(e) => return failed_run(responses, e.to_string()),
    };
    match stage2 {
        Ok(text) => {
            let parsed = parse_label(&text);
            responses.push(text);
            DirectionRun {
                responses,
                parsed,
                error: None,
            }
        }
        Err(e) => failed_run(responses, e.to_string()),
    }
}

/// Reason-then-classify in both presentation orders, reconciled by the referee.
pub fn run_bidirectional_cot<G: TextGenerator + ?Sized>(
    pair: &PairInput,
    generator: &G,
    templates: &TemplateSet,
) -> ClassificationOutcome {
    let ab = run_cot_direction(&pair.pair_id, &pair.topic_a, &pair.topic_b, Direction::Ab, generator, templates);
    let ba = run_cot_direction(&pair.pair_id, &pair.topic_b, &pair.topic_a, Direction::Ba, generator, templates);
    let decision = referee(ab.parsed, ba.parsed);
    ClassificationOutcome {
        pair_id: pair.pair_id.clone(),
        strategy: Strategy::BidirectionalCot,
        topic_a: pair.topic_a.clone(),
        topic_b: pair.topic_b.clone(),
        gold: pair.gold,
        final_label: Prediction::Label(decision.label),
        run_ab: ab,
        run_ba: Some(ba),
        referee_rule_fired: decision.rule,
        confidence_flag: Some(decision.confidence),
    }
}

pub fn classify<G: TextGenerator + ?Sized>(
    pair: &PairInput,
    strategy: Strategy,
    generator: &G,
    templates: &TemplateSet,
) -> ClassificationOutcome {
    match strategy {
        Strategy::Standard => run_standard(pair, generator, &templates.standard),
        Strategy::BidirectionalCot => run_bidirectional_cot(pair, generator, templates),
    }
}

/// Classifies `pairs` on up to `workers` threads and hands outcomes to
/// `sink` in input order. An error from `sink` stops the batch: no further
/// pairs are started and the error is returned. Returns the number of
/// outcomes delivered.
pub fn classify_batch<G, F, E>(
    pairs: &[PairInput],
    strategy: Strategy,
    generator: &G,
    templates: &TemplateSet,
    workers: usize,
    mut sink: F,
) -> Result<usize, E>
where
    G: TextGenerator + ?Sized,
    F: FnMut(ClassificationOutcome) -> Result<(), E>,
{
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let workers = workers.max(1).min(pairs.len().max(1));
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, ClassificationOutcome)>();
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, stop) = (&next, &stop);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(pair) = pairs.get(i) else { break };
                let outcome = classify(pair, strategy, generator, templates);
                if tx.send((i, outcome)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut buffer = BTreeMap::new();
        let mut delivered = 0;
        for (i, outcome) in rx.iter() {
            buffer.insert(i, outcome);
            while let Some(outcome) = buffer.remove(&delivered) {
                if let Err(e) = sink(outcome) {
                    stop.store(true, Ordering::Relaxed);
                    return Err(e);
                }
                delivered += 1;
            }
        }
        Ok(delivered)
    })
}
