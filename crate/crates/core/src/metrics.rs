//! Confusion matrix, accuracy and per-class precision, recall and F1.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polarity::Polarity;

const K: usize = Polarity::COUNT;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("label lists differ in length: {true_len} true vs {pred_len} predicted")]
    LengthMismatch { true_len: usize, pred_len: usize },
    #[error("no samples to evaluate")]
    Empty,
}

/// Rows are true classes, columns predicted classes, both in class-index order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; K]; K],
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..K).map(|k| self.counts[k][k]).sum()
    }

    pub fn row_sum(&self, k: usize) -> u64 {
        self.counts[k].iter().sum()
    }

    pub fn col_sum(&self, k: usize) -> u64 {
        self.counts.iter().map(|r| r[k]).sum()
    }

    /// Each row divided by its sum; empty rows stay zero.
    pub fn row_normalized(&self) -> [[f64; K]; K] {
        let mut out = [[0.0; K]; K];
        for (r, row) in self.counts.iter().enumerate() {
            let s = self.row_sum(r);
            if s > 0 {
                for c in 0..K {
                    out[r][c] = row[c] as f64 / s as f64;
                }
            }
        }
        out
    }

    /// Trace over total; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        ratio(self.trace(), self.total()).0
    }
}

pub fn confusion(y_true: &[Polarity], y_pred: &[Polarity]) -> Result<ConfusionMatrix, MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch {
            true_len: y_true.len(),
            pred_len: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut m = ConfusionMatrix::default();
    for (t, p) in y_true.iter().zip(y_pred) {
        m.counts[t.index()][p.index()] += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Some ratio had a zero denominator and was reported as 0.
    pub degenerate: bool,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Harmonic mean of precision and recall; 0 (flagged) when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> (f64, bool) {
    let s = precision + recall;
    if s == 0.0 {
        (0.0, true)
    } else {
        (2.0 * precision * recall / s, false)
    }
}

/// `P = TP/(TP+FP)`, `R = TP/(TP+FN)`, `F1 = 2PR/(P+R)`, with 0/0 → 0.
pub fn precision_recall_f1(matrix: &ConfusionMatrix, class: Polarity) -> ClassMetrics {
    let k = class.index();
    let tp = matrix.counts[k][k];
    let (precision, dp) = ratio(tp, matrix.col_sum(k));
    let (recall, dr) = ratio(tp, matrix.row_sum(k));
    let (f1, df) = f1_score(precision, recall);
    ClassMetrics {
        precision,
        recall,
        f1,
        degenerate: dp || dr || df,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: Polarity,
    pub label: String,
    #[serde(flatten)]
    pub metrics: ClassMetrics,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub matrix: ConfusionMatrix,
    /// Rows of the matrix divided by their sums (true-class orientation).
    pub matrix_row_normalized: [[f64; K]; K],
    pub per_class: Vec<ClassRow>,
    pub accuracy: f64,
    pub total: u64,
}

impl EvaluationReport {
    pub fn from_matrix(matrix: ConfusionMatrix) -> Self {
        let per_class = Polarity::ALL
            .iter()
            .map(|&c| ClassRow {
                class: c,
                label: c.name().to_owned(),
                metrics: precision_recall_f1(&matrix, c),
                support: matrix.row_sum(c.index()),
            })
            .collect();
        EvaluationReport {
            matrix,
            matrix_row_normalized: matrix.row_normalized(),
            per_class,
            accuracy: matrix.accuracy(),
            total: matrix.total(),
        }
    }

    pub fn evaluate(y_true: &[Polarity], y_pred: &[Polarity]) -> Result<Self, MetricsError> {
        Ok(EvaluationReport::from_matrix(confusion(y_true, y_pred)?))
    }

    /// Aligned text table at 2 decimals followed by the confusion matrix.
    pub fn to_table(&self, title: &str) -> String {
        let mut s = String::new();
        if !title.is_empty() {
            let _ = writeln!(s, "{title}");
        }
        let _ = writeln!(s, "{:<10}{:>10}{:>10}{:>10}{:>10}", "", "precision", "recall", "f1-score", "support");
        for row in &self.per_class {
            let _ = writeln!(
                s,
                "{:<10}{:>10.2}{:>10.2}{:>10.2}{:>10}",
                format!("Class-{}", row.class.index()),
                row.metrics.precision,
                row.metrics.recall,
                row.metrics.f1,
                row.support
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<10}{:>30.2}{:>10}", "accuracy", self.accuracy, self.total);
        let _ = writeln!(s);
        let _ = writeln!(s, "confusion matrix (rows = true, cols = predicted)");
        let _ = writeln!(s, "{:<10}{:>10}{:>10}{:>10}", "", "0", "1", "2");
        for (r, row) in self.matrix.counts.iter().enumerate() {
            let _ = writeln!(s, "{:<10}{:>10}{:>10}{:>10}", r, row[0], row[1], row[2]);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "row-normalized");
        for (r, row) in self.matrix_row_normalized.iter().enumerate() {
            let _ = writeln!(s, "{:<10}{:>10.4}{:>10.4}{:>10.4}", r, row[0], row[1], row[2]);
        }
        s
    }
}
