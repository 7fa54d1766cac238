//! Classifier quality on mutant predictions.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Confusion {
    pub fn from_predictions(predicted: &[bool], labels: &[bool]) -> Self {
        let mut c = Confusion {
            tp: 0,
            fp: 0,
            tn: 0,
            fn_: 0,
        };
        for (&p, &l) in predicted.iter().zip(labels) {
            match (p, l) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    /// Empty denominators give 0.
    pub fn metrics(&self) -> ClassMetrics {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics { precision, recall, f1 }
    }
}

/// Number of items in the top `percent` of `n`, rounded up.
pub fn top_count(percent: f64, n: usize) -> usize {
    ((percent / 100.0 * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Marks the top `ceil(percent% · n)` scores positive; ties by index.
pub fn top_k_metrics(scores: &[f64], labels: &[bool], percent: f64) -> ClassMetrics {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut predicted = vec![false; scores.len()];
    for &i in &idx[..top_count(percent, scores.len())] {
        predicted[i] = true;
    }
    Confusion::from_predictions(&predicted, labels).metrics()
}

pub fn threshold_metrics(scores: &[f64], labels: &[bool], threshold: f64) -> ClassMetrics {
    let predicted: Vec<bool> = scores.iter().map(|&s| s >= threshold).collect();
    Confusion::from_predictions(&predicted, labels).metrics()
}

/// Probability that a random positive outscores a random negative, ties
/// counting half; `None` for a single class.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let ranks = super::stats::midranks(scores);
    let pos_rank: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let u = pos_rank - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos * n_neg) as f64)
}
