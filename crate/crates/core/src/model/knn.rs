use serde::{Deserialize, Serialize};

use super::bayes::TIE_TOLERANCE;
use super::WeightedVector;

/// Cosine-similarity nearest neighbours over unit-length training documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnIndex {
    k: usize,
    n_classes: usize,
    docs: Vec<WeightedVector>,
    labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbour {
    pub doc: usize,
    pub similarity: f64,
    pub label: usize,
}

impl KnnIndex {
    /// Documents are normalized here, so callers may pass raw weights.
    pub fn new(k: usize, n_classes: usize, docs: &[WeightedVector], labels: &[usize]) -> Self {
        Self { k, n_classes, docs: docs.iter().map(WeightedVector::normalized).collect(), labels: labels.to_vec() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The `k` most similar documents, by similarity descending then label
    /// ascending then training position. Similarities are compared at a
    /// resolution of 1e-9 so rounding noise cannot reorder ties.
    pub fn neighbours(&self, query: &WeightedVector) -> Vec<Neighbour> {
        let q = query.normalized();
        let mut all: Vec<Neighbour> = self
            .docs
            .iter()
            .zip(&self.labels)
            .enumerate()
            .map(|(doc, (d, &label))| Neighbour { doc, similarity: q.dot(d), label })
            .collect();
        let rank = |s: f64| (s / TIE_TOLERANCE).round() as i64;
        all.sort_by(|a, b| {
            rank(b.similarity)
                .cmp(&rank(a.similarity))
                .then(a.label.cmp(&b.label))
                .then(a.doc.cmp(&b.doc))
        });
        all.truncate(self.k);
        all
    }

    /// Majority vote among neighbours; a tied vote goes to the tied label of
    /// the nearest neighbour. Returns the label and vote shares per class.
    pub fn predict(&self, query: &WeightedVector) -> (usize, Vec<f64>) {
        let neighbours = self.neighbours(query);
        let mut votes = vec![0usize; self.n_classes];
        for n in &neighbours {
            votes[n.label] += 1;
        }
        let top = votes.iter().copied().max().unwrap_or(0);
        let label = neighbours
            .iter()
            .find(|n| votes[n.label] == top)
            .map(|n| n.label)
            .unwrap_or(0);
        let total = neighbours.len().max(1) as f64;
        (label, votes.iter().map(|&v| v as f64 / total).collect())
    }
}
