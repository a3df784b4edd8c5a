//! Error Rate for categorical predictions and mean normalized absolute
//! distance (MNAD) for continuous ones, computed only over entries present
//! in the ground-truth map.

use std::fmt::Write as _;

use crate::aggregate::{EntryScale, TruthAssignment};
use crate::data::{Dataset, Value, ValueKind};

/// Metric values plus the entry counts they were computed over. A metric is
/// absent when no entry of its type could be evaluated. Degenerate
/// continuous entries (all observed values identical) contribute zero when
/// the prediction is exact and are otherwise skipped and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub error_rate: Option<f64>,
    pub categorical_evaluated: usize,
    pub mnad: Option<f64>,
    pub continuous_evaluated: usize,
    pub degenerate_skipped: usize,
}

/// Fraction of categorical ground-truth entries whose prediction differs
/// from the truth (exact string comparison). Returns the count evaluated.
pub fn error_rate(dataset: &Dataset, predictions: &TruthAssignment) -> (Option<f64>, usize) {
    let mut evaluated = 0usize;
    let mut wrong = 0usize;
    for (&entry_id, truth) in dataset.ground_truth() {
        if dataset.entry(entry_id).kind != ValueKind::Categorical {
            continue;
        }
        let Some(prediction) = predictions.get(entry_id) else { continue };
        evaluated += 1;
        if prediction != truth {
            wrong += 1;
        }
    }
    if evaluated == 0 {
        (None, 0)
    } else {
        (Some(wrong as f64 / evaluated as f64), evaluated)
    }
}

/// Mean over continuous ground-truth entries of the prediction's distance
/// from the truth, normalized by each entry's observed-value scale.
/// Returns (metric, evaluated count, degenerate-skip count).
pub fn mnad(dataset: &Dataset, predictions: &TruthAssignment) -> (Option<f64>, usize, usize) {
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    let mut sum = 0.0;
    for (&entry_id, truth) in dataset.ground_truth() {
        if dataset.entry(entry_id).kind != ValueKind::Continuous {
            continue;
        }
        let Some(prediction) = predictions.get(entry_id) else { continue };
        let (Value::Continuous(t), Value::Continuous(o)) = (truth, prediction) else {
            skipped += 1;
            continue;
        };
        let scale = EntryScale::from_values(&dataset.entry_numbers(entry_id));
        if scale.is_degenerate() {
            if o == t {
                evaluated += 1; // contributes zero
            } else {
                skipped += 1;
            }
            continue;
        }
        sum += (t - o).abs() / scale.denom;
        evaluated += 1;
    }
    if evaluated == 0 {
        (None, 0, skipped)
    } else {
        (Some(sum / evaluated as f64), evaluated, skipped)
    }
}

/// Evaluate both metrics against the dataset's ground truth.
pub fn evaluate(dataset: &Dataset, predictions: &TruthAssignment) -> EvalReport {
    let (error_rate, categorical_evaluated) = error_rate(dataset, predictions);
    let (mnad, continuous_evaluated, degenerate_skipped) = mnad(dataset, predictions);
    EvalReport {
        error_rate,
        categorical_evaluated,
        mnad,
        continuous_evaluated,
        degenerate_skipped,
    }
}

impl EvalReport {
    /// One `metric \t value \t n` line per available metric.
    pub fn machine_lines(&self) -> String {
        let mut out = String::new();
        if let Some(er) = self.error_rate {
            let _ = writeln!(out, "error_rate\t{er}\t{}", self.categorical_evaluated);
        }
        if let Some(m) = self.mnad {
            let _ = writeln!(out, "mnad\t{m}\t{}", self.continuous_evaluated);
        }
        if self.degenerate_skipped > 0 {
            let _ = writeln!(
                out,
                "mnad_skipped\t{}\t{}",
                self.degenerate_skipped,
                self.continuous_evaluated + self.degenerate_skipped
            );
        }
        out
    }

    pub fn human_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "metric        value       entries");
        match self.error_rate {
            Some(er) => {
                let _ = writeln!(out, "error rate    {er:<10.6acy}  {}", self.categorical_evaluated);
            }
            None => {
                let _ = writeln!(out, "error rate    n/a         0");
            }
        }
        match self.mnad {
            Some(m) => {
                let _ = writeln!(out, "mnad          {m:<10.6}  {}", self.continuous_evaluated);
            }
            None => {
                let _ = writeln!(out, "mnad          n/a         0");
            }
        }
        if self.degenerate_skipped > 0 {
            let _ = writeln!(out, "(skipped {} degenerate continuous entries)", self.degenerate_skipped);
        }
        out
    }
}
