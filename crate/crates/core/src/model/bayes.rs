use serde::{Deserialize, Serialize};

use super::WeightedVector;

/// Multinomial naive Bayes with Laplace-style smoothing and per-document weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    log_prior: Vec<f64>,
    /// `log_likelihood[class][feature]`
    log_likelihood: Vec<Vec<f64>>,
}

/// `ln` that keeps zero probabilities finite so models stay serializable.
fn safe_ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::MIN
    }
}

impl NaiveBayes {
    /// Priors are each class's share of the total weight; likelihoods are
    /// `(weighted count + alpha) / (weighted total + alpha * |V|)`.
    pub fn fit(
        docs: &[WeightedVector],
        labels: &[usize],
        weights: &[f64],
        n_classes: usize,
        n_features: usize,
        alpha: f64,
    ) -> Self {
        debug_assert_eq!(docs.len(), labels.len());
        debug_assert_eq!(docs.len(), weights.len());
        let mut class_weight = vec![0.0; n_classes];
        let mut counts = vec![vec![0.0; n_features]; n_classes];
        let mut totals = vec![0.0; n_classes];
        for ((doc, &label), &w) in docs.iter().zip(labels).zip(weights) {
            class_weight[label] += w;
            for &(i, v) in doc.entries() {
                counts[label][i] += w * v;
                totals[label] += w * v;
            }
        }
        let weight_sum: f64 = class_weight.iter().sum();
        let log_prior = class_weight.iter().map(|w| safe_ln(w / weight_sum)).collect();
        let log_likelihood = counts
            .iter()
            .zip(&totals)
            .map(|(row, total)| {
                let denom = total + alpha * n_features as f64;
                row.iter().map(|c| safe_ln((c + alpha) / denom)).collect()
            })
            .collect();
        Self { log_prior, log_likelihood }
    }

    pub fn n_classes(&self) -> usize {
        self.log_prior.len()
    }

    pub fn prior(&self, class: usize) -> f64 {
        self.log_prior[class].exp()
    }

    pub fn likelihood(&self, class: usize, feature: usize) -> f64 {
        self.log_likelihood[class][feature].exp()
    }

    pub fn log_scores(&self, doc: &WeightedVector) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(prior, row)| prior + doc.entries().iter().map(|&(i, v)| v * row[i]).sum::<f64>())
            .collect()
    }

    /// Normalized posterior over classes.
    pub fn posterior(&self, doc: &WeightedVector) -> Vec<f64> {
        softmax(&self.log_scores(doc))
    }

    pub fn predict(&self, doc: &WeightedVector) -> usize {
        argmax(&self.log_scores(doc))
    }
}

pub(crate) fn softmax(log_scores: &[f64]) -> Vec<f64> {
    let max = log_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = log_scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

/// Scores closer than this count as tied, so that decisions do not hinge on
/// last-bit rounding differences.
pub(crate) const TIE_TOLERANCE: f64 = 1e-9;

/// Index of the largest value; values within [`TIE_TOLERANCE`] of the
/// maximum tie and go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|v| *v >= max - TIE_TOLERANCE).unwrap_or(0)
}
