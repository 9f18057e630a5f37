use serde::{Deserialize, Serialize};

use super::bayes::{argmax, NaiveBayes};
use super::WeightedVector;

/// AdaBoost.M1 over weighted naive Bayes members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostNb {
    n_classes: usize,
    members: Vec<(NaiveBayes, f64)>,
}

impl AdaBoostNb {
    /// Instance weights start at 1 each and are renormalized to sum to the
    /// number of documents after every round. Boosting stops early when a
    /// member's weighted error is 0 or at least 0.5; if that happens in the
    /// first round the member is kept alone with vote weight 1.
    pub fn fit(
        docs: &[WeightedVector],
        labels: &[usize],
        n_classes: usize,
        n_features: usize,
        alpha: f64,
        rounds: usize,
    ) -> Self {
        let n = docs.len() as f64;
        let mut weights = vec![1.0; docs.len()];
        let mut members = Vec::new();
        for round in 0..rounds.max(1) {
            let nb = NaiveBayes::fit(docs, labels, &weights, n_classes, n_features, alpha);
            let correct: Vec<bool> = docs.iter().zip(labels).map(|(d, &l)| nb.predict(d) == l).collect();
            let error = weights.iter().zip(&correct).filter(|(_, c)| !**c).map(|(w, _)| w).sum::<f64>() / n;
            if error == 0.0 || error >= 0.5 {
                if round == 0 {
                    members.push((nb, 1.0));
                }
                break;
            }
            let beta = error / (1.0 - error);
            members.push((nb, (1.0 / beta).ln()));
            for (w, c) in weights.iter_mut().zip(&correct) {
                if *c {
                    *w *= beta;
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w *= n / total);
        }
        Self { n_classes, members }
    }

    pub fn members(&self) -> &[(NaiveBayes, f64)] {
        &self.members
    }

    /// Weighted vote of member predictions, normalized to sum to 1.
    pub fn votes(&self, doc: &WeightedVector) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for (nb, weight) in &self.members {
            votes[nb.predict(doc)] += weight;
        }
        let total: f64 = votes.iter().sum();
        if total > 0.0 {
            votes.iter_mut().for_each(|v| *v /= total);
        }
        votes
    }

    pub fn predict(&self, doc: &WeightedVector) -> usize {
        argmax(&self.votes(doc))
    }
}
