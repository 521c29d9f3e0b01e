//! Reconciles the two directional predictions of a bidirectional run.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::label::{Prediction, RelationLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefereeRule {
    NotApplicable,
    SingleParse,
    DoubleFailure,
    Agreement,
    OtherOverride,
    HierarchyContradiction,
    HierarchyOverEquivalence,
}

impl RefereeRule {
    pub fn as_str(self) -> &'static str {
        match self {
            RefereeRule::NotApplicable => "not-applicable",
            RefereeRule::SingleParse => "single-parse",
            RefereeRule::DoubleFailure => "double-failure",
            RefereeRule::Agreement => "agreement",
            RefereeRule::OtherOverride => "other-override",
            RefereeRule::HierarchyContradiction => "hierarchy-contradiction",
            RefereeRule::HierarchyOverEquivalence => "hierarchy-over-equivalence",
        }
    }
}

impl fmt::Display for RefereeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Agreed,
    Resolved,
    Contradiction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefereeDecision {
    pub label: RelationLabel,
    pub rule: RefereeRule,
    pub confidence: Confidence,
}

/// `ab` is the prediction for (A, B); `ba` the prediction for (B, A),
/// which is inverted before comparison.
pub fn referee(ab: Prediction, ba: Prediction) -> RefereeDecision {
    use RelationLabel::*;
    let decide = |label, rule, confidence| RefereeDecision {
        label,
        rule,
        confidence,
    };
    let (p, q) = match (ab.label(), ba.invert().label()) {
        (Some(p), None) | (None, Some(p)) => {
            return decide(p, RefereeRule::SingleParse, Confidence::Resolved);
        }
        (None, None) => return decide(Other, RefereeRule::DoubleFailure, Confidence::Contradiction),
        (Some(p), Some(q)) => (p, q),
    };
    if p == q {
        return decide(p, RefereeRule::Agreement, Confidence::Agreed);
    }
    match (p, q) {
        (Other, x) | (x, Other) => decide(x, RefereeRule::OtherOverride, Confidence::Resolved),
        (Broader, Narrower) | (Narrower, Broader) => {
            decide(Other, RefereeRule::HierarchyContradiction, Confidence::Contradiction)
        }
        (SameAs, h) | (h, SameAs) => decide(h, RefereeRule::HierarchyOverEquivalence, Confidence::Resolved),
        _ => unreachable!("p != q and every distinct pair is covered"),
    }
}
