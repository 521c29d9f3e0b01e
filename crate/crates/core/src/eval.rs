//! Confusion matrices and precision/recall/F1 reports.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{Prediction, RelationLabel};
use crate::prompt::ClassificationOutcome;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub pair_id: String,
    pub gold: RelationLabel,
    pub predicted: Prediction,
}

impl PredictionRecord {
    /// None when the outcome carries no gold label.
    pub fn from_outcome(outcome: &ClassificationOutcome) -> Option<Self> {
        Some(PredictionRecord {
            pair_id: outcome.pair_id.clone(),
            gold: outcome.gold?,
            predicted: outcome.final_label,
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no prediction records")]
    Empty,
    #[error("pair id {0} appears more than once")]
    DuplicatePairId(String),
}

/// How unparseable answers are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FailurePolicy {
    /// Counted as a prediction of `other`.
    #[default]
    AsOther,
    /// Kept apart: a miss for the gold class, a false positive for none.
    AsOwnColumn,
}

pub const PARSE_FAILURE_COLUMN: usize = 4;

/// Rows are gold labels, columns predicted labels plus a parse-failure
/// column, both in `RelationLabel::ALL` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 5]; 4],
}

fn column(p: Prediction) -> usize {
    match p {
        Prediction::Label(l) => l.index(),
        Prediction::ParseFailure => PARSE_FAILURE_COLUMN,
    }
}

impl ConfusionMatrix {
    pub fn get(&self, gold: RelationLabel, predicted: Prediction) -> u64 {
        self.counts[gold.index()][column(predicted)]
    }

    pub fn add(&mut self, gold: RelationLabel, predicted: Prediction) {
        self.counts[gold.index()][column(predicted)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn parse_failures(&self) -> u64 {
        self.counts.iter().map(|r| r[PARSE_FAILURE_COLUMN]).sum()
    }

    /// The 4x4 matrix after applying `policy`; with `AsOwnColumn` the
    /// failures are simply dropped from the square part.
    pub fn square(&self, policy: FailurePolicy) -> [[u64; 4]; 4] {
        let mut sq = [[0u64; 4]; 4];
        for (g, row) in self.counts.iter().enumerate() {
            sq[g].copy_from_slice(&row[..4]);
            if policy == FailurePolicy::AsOther {
                sq[g][RelationLabel::Other.index()] += row[PARSE_FAILURE_COLUMN];
            }
        }
        sq
    }

    pub fn diagonal(&self, policy: FailurePolicy) -> u64 {
        let sq = self.square(policy);
        (0..4).map(|i| sq[i][i]).sum()
    }
}

pub fn confusion_matrix(records: &[PredictionRecord]) -> Result<ConfusionMatrix, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut ids = HashSet::new();
    let mut m = ConfusionMatrix::default();
    for r in records {
        if !ids.insert(r.pair_id.as_str()) {
            return Err(EvalError::DuplicatePairId(r.pair_id.clone()));
        }
        m.add(r.gold, r.predicted);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn per_class_metrics(matrix: &ConfusionMatrix, policy: FailurePolicy) -> BTreeMap<RelationLabel, ClassMetrics> {
    let sq = matrix.square(policy);
    RelationLabel::ALL
        .iter()
        .map(|&label| {
            let c = label.index();
            let tp = sq[c][c];
            let predicted: u64 = (0..4).map(|g| sq[g][c]).sum();
            let support: u64 = matrix.counts[c].iter().sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let metrics = ClassMetrics {
                precision,
                recall,
                f1: f1_score(precision, recall),
                support,
            };
            (label, metrics)
        })
        .collect()
}

/// Unweighted mean over the four classes.
pub fn macro_average(per_class: &BTreeMap<RelationLabel, ClassMetrics>) -> Averages {
    let n = per_class.len().max(1) as f64;
    Averages {
        precision: per_class.values().map(|m| m.precision).sum::<f64>() / n,
        recall: per_class.values().map(|m| m.recall).sum::<f64>() / n,
        f1: per_class.values().map(|m| m.f1).sum::<f64>() / n,
    }
}

pub fn weighted_average(per_class: &BTreeMap<RelationLabel, ClassMetrics>) -> Averages {
    let total: u64 = per_class.values().map(|m| m.support).sum();
    let w = |f: fn(&ClassMetrics) -> f64| {
        if total == 0 {
            0.0
        } else {
            per_class.values().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64
        }
    };
    Averages {
        precision: w(|m| m.precision),
        recall: w(|m| m.recall),
        f1: w(|m| m.f1),
    }
}

/// Pooled counts over all classes.
pub fn micro_average(matrix: &ConfusionMatrix, policy: FailurePolicy) -> Averages {
    let sq = matrix.square(policy);
    let tp = matrix.diagonal(policy);
    let predicted: u64 = sq.iter().flatten().sum();
    let precision = ratio(tp, predicted);
    let recall = ratio(tp, matrix.total());
    Averages {
        precision,
        recall,
        f1: f1_score(precision, recall),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub records: u64,
    pub parse_failures: u64,
    pub failure_policy: FailurePolicy,
    pub accuracy: f64,
    pub matrix_rows: Vec<String>,
    pub matrix_columns: Vec<String>,
    pub matrix: ConfusionMatrix,
    pub per_class: BTreeMap<RelationLabel, ClassMetrics>,
    #[serde(rename = "macro")]
    pub macro_avg: Averages,
    #[serde(rename = "micro")]
    pub micro_avg: Averages,
    #[serde(rename = "weighted")]
    pub weighted_avg: Averages,
}

pub fn evaluate(records: &[PredictionRecord], policy: FailurePolicy) -> Result<EvaluationReport, EvalError> {
    let matrix = confusion_matrix(records)?;
    Ok(report_from_matrix(matrix, policy))
}

pub fn report_from_matrix(matrix: ConfusionMatrix, policy: FailurePolicy) -> EvaluationReport {
    let per_class = per_class_metrics(&matrix, policy);
    EvaluationReport {
        records: matrix.total(),
        parse_failures: matrix.parse_failures(),
        failure_policy: policy,
        accuracy: ratio(matrix.diagonal(policy), matrix.total()),
        matrix_rows: RelationLabel::ALL.iter().map(|l| l.as_str().to_string()).collect(),
        matrix_columns: RelationLabel::ALL
            .iter()
            .map(|l| l.as_str())
            .chain([Prediction::ParseFailure.as_str()])
            .map(String::from)
            .collect(),
        macro_avg: macro_average(&per_class),
        micro_avg: micro_average(&matrix, policy),
        weighted_avg: weighted_average(&per_class),
        per_class,
        matrix,
    }
}

impl EvaluationReport {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Confusion matrix table and a metrics block with columns AVG, BR, NR,
    /// OT, SA. Metric values are percentages with one decimal.
    pub fn to_markdown(&self) -> String {
        const COLUMNS: [RelationLabel; 4] = [
            RelationLabel::Broader,
            RelationLabel::Narrower,
            RelationLabel::Other,
            RelationLabel::SameAs,
        ];
        let pct = |v: f64| format!("{:.1}", v * 100.0);
        let mut md = String::new();
        let _ = writeln!(md, "# Evaluation report\n");
        let _ = writeln!(
            md,
            "Records: {}. Parse failures: {} (scored {}).\n",
            self.records,
            self.parse_failures,
            match self.failure_policy {
                FailurePolicy::AsOther => "as other",
                FailurePolicy::AsOwnColumn => "in their own column",
            }
        );
        let _ = writeln!(md, "## Confusion matrix\n");
        let _ = writeln!(md, "| gold \\ predicted | {} |", self.matrix_columns.join(" | "));
        let _ = writeln!(md, "|---|{}", "---:|".repeat(self.matrix_columns.len()));
        for (label, row) in RelationLabel::ALL.iter().zip(&self.matrix.counts) {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            let _ = writeln!(md, "| {label} | {} |", cells.join(" | "));
        }
        let _ = writeln!(md, "\n## Metrics\n");
        let header: Vec<&str> = COLUMNS.iter().map(|l| l.short_code()).collect();
        let _ = writeln!(md, "| metric | AVG | {} |", header.join(" | "));
        let _ = writeln!(md, "|---|---:|---:|---:|---:|---:|");
        type Field = fn(&ClassMetrics) -> f64;
        let rows: [(&str, f64, Field); 3] = [
            ("precision", self.macro_avg.precision, |m| m.precision),
            ("recall", self.macro_avg.recall, |m| m.recall),
            ("f1", self.macro_avg.f1, |m| m.f1),
        ];
        for (name, avg, get) in rows {
            let cells: Vec<String> = COLUMNS.iter().map(|l| pct(get(&self.per_class[l]))).collect();
            let _ = writeln!(md, "| {name} | {} | {} |", pct(avg), cells.join(" | "));
        }
        let supports: Vec<String> = COLUMNS.iter().map(|l| self.per_class[l].support.to_string()).collect();
        let _ = writeln!(md, "| support | {} | {} |", self.records, supports.join(" | "));
        let _ = writeln!(
            md,
            "\nMicro F1 {}, support-weighted F1 {}, accuracy {}.",
            pct(self.micro_avg.f1),
            pct(self.weighted_avg.f1),
            pct(self.accuracy)
        );
        md
    }
}
