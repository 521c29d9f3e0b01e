//! The four-way relation vocabulary shared by every stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Relation between an ordered topic pair `(topic_a, topic_b)`.
///
/// `Broader` means `topic_a` subsumes `topic_b`; `Narrower` is its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationLabel {
    #[serde(rename = "broader")]
    Broader,
    #[serde(rename = "narrower")]
    Narrower,
    #[serde(rename = "same-as")]
    SameAs,
    #[serde(rename = "other")]
    Other,
}

impl RelationLabel {
    pub const ALL: [RelationLabel; 4] = [
        RelationLabel::Broader,
        RelationLabel::Narrower,
        RelationLabel::SameAs,
        RelationLabel::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationLabel::Broader => "broader",
            RelationLabel::Narrower => "narrower",
            RelationLabel::SameAs => "same-as",
            RelationLabel::Other => "other",
        }
    }

    /// Two-letter column code used in metric tables.
    pub fn short_code(self) -> &'static str {
        match self {
            RelationLabel::Broader => "BR",
            RelationLabel::Narrower => "NR",
            RelationLabel::SameAs => "SA",
            RelationLabel::Other => "OT",
        }
    }

    pub fn index(self) -> usize {
        match self {
            RelationLabel::Broader => 0,
            RelationLabel::Narrower => 1,
            RelationLabel::SameAs => 2,
            RelationLabel::Other => 3,
        }
    }

    /// The label describing the same fact with the topics swapped.
    pub fn invert(self) -> RelationLabel {
        match self {
            RelationLabel::Broader => RelationLabel::Narrower,
            RelationLabel::Narrower => RelationLabel::Broader,
            other => other,
        }
    }

    pub fn is_hierarchical(self) -> bool {
        matches!(self, RelationLabel::Broader | RelationLabel::Narrower)
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationLabel {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "broader" => Ok(RelationLabel::Broader),
            "narrower" => Ok(RelationLabel::Narrower),
            "same-as" => Ok(RelationLabel::SameAs),
            "other" => Ok(RelationLabel::Other),
            _ => Err(CoreError::UnknownLabel(s.to_string())),
        }
    }
}

/// A model prediction: one of the four labels, or an unparseable response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prediction {
    Label(RelationLabel),
    ParseFailure,
}

impl Prediction {
    pub const PARSE_FAILURE: &'static str = "parse-failure";

    pub fn label(self) -> Option<RelationLabel> {
        match self {
            Prediction::Label(l) => Some(l),
            Prediction::ParseFailure => None,
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Prediction::ParseFailure)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Prediction::Label(l) => l.as_str(),
            Prediction::ParseFailure => Self::PARSE_FAILURE,
        }
    }

    pub fn invert(self) -> Prediction {
        match self {
            Prediction::Label(l) => Prediction::Label(l.invert()),
            Prediction::ParseFailure => Prediction::ParseFailure,
        }
    }
}

impl From<RelationLabel> for Prediction {
    fn from(label: RelationLabel) -> Self {
        Prediction::Label(label)
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Prediction {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == Self::PARSE_FAILURE {
            Ok(Prediction::ParseFailure)
        } else {
            s.parse().map(Prediction::Label)
        }
    }
}

impl Serialize for Prediction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Prediction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
