//! Precision, recall and F-measure per category, macro averages, and
//! stratified train/test splitting.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvaluateError {
    #[error("{gold} gold labels but {predicted} predictions")]
    LengthMismatch { gold: usize, predicted: usize },
    #[error("nothing to score")]
    Empty,
    #[error("label `{0}` is not among the categories")]
    UnknownLabel(String),
    #[error("split ratio must lie strictly between 0 and 1, got {0}")]
    InvalidRatio(f64),
    #[error("need at least 2 folds, got {0}")]
    InvalidFolds(usize),
    #[error("category `{category}` has {size} documents, at least {needed} required")]
    CategoryTooSmall { category: String, size: usize, needed: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_positive: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub true_negative: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl ConfusionCounts {
    pub fn precision(&self) -> f64 {
        ratio(self.true_positive, self.true_positive + self.false_positive)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.true_positive, self.true_positive + self.false_negative)
    }

    pub fn f_measure(&self) -> f64 {
        f_measure(self.precision(), self.recall())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub category: String,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Gold documents of this category.
    pub support: usize,
    pub counts: ConfusionCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub fingerprint: String,
    pub documents: usize,
    pub categories: Vec<CategoryScore>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f: f64,
}

/// Score single-label predictions. Ratios with a zero denominator count as
/// 0, and macro values average every category, including empty ones.
pub fn score(gold: &[String], predicted: &[String], categories: &[String]) -> Result<EvaluationReport, EvaluateError> {
    if gold.len() != predicted.len() {
        return Err(EvaluateError::LengthMismatch { gold: gold.len(), predicted: predicted.len() });
    }
    if gold.is_empty() {
        return Err(EvaluateError::Empty);
    }
    let mut counts: BTreeMap<&str, ConfusionCounts> =
        categories.iter().map(|c| (c.as_str(), ConfusionCounts::default())).collect();
    for label in gold.iter().chain(predicted) {
        if !counts.contains_key(label.as_str()) {
            return Err(EvaluateError::UnknownLabel(label.clone()));
        }
    }
    for (g, p) in gold.iter().zip(predicted) {
        if g == p {
            counts.get_mut(g.as_str()).unwrap().true_positive += 1;
        } else {
            counts.get_mut(g.as_str()).unwrap().false_negative += 1;
            counts.get_mut(p.as_str()).unwrap().false_positive += 1;
        }
    }
    let n = gold.len();
    let rows: Vec<CategoryScore> = counts
        .into_iter()
        .map(|(category, mut c)| {
            c.true_negative = n - c.true_positive - c.false_positive - c.false_negative;
            CategoryScore {
                category: category.to_string(),
                precision: c.precision(),
                recall: c.recall(),
                f_measure: c.f_measure(),
                support: c.true_positive + c.false_negative,
                counts: c,
            }
        })
        .collect();
    let mean = |f: fn(&CategoryScore) -> f64| {
        if rows.is_empty() {
            0.0
        } else {
            rows.iter().map(f).sum::<f64>() / rows.len() as f64
        }
    };
    Ok(EvaluationReport {
        fingerprint: String::new(),
        documents: n,
        macro_precision: mean(|r| r.precision),
        macro_recall: mean(|r| r.recall),
        macro_f: mean(|r| r.f_measure),
        categories: rows,
    })
}

impl EvaluationReport {
    pub fn with_fingerprint(mut self, fingerprint: impl Into<String>) -> Self {
        self.fingerprint = fingerprint.into();
        self
    }

    pub fn render_text(&self) -> String {
        let width = self.categories.iter().map(|c| c.category.chars().count()).max().unwrap_or(0).max(13);
        let mut out = String::new();
        writeln!(out, "configuration: {}", self.fingerprint).unwrap();
        writeln!(out, "documents: {}", self.documents).unwrap();
        writeln!(out, "{:<width$}  {:>9}  {:>9}  {:>9}  {:>7}", "category", "precision", "recall", "f-measure", "support")
            .unwrap();
        for c in &self.categories {
            writeln!(
                out,
                "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}",
                c.category, c.precision, c.recall, c.f_measure, c.support
            )
            .unwrap();
        }
        writeln!(
            out,
            "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}",
            "macro average", self.macro_precision, self.macro_recall, self.macro_f, self.documents
        )
        .unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Row indices of a stratified train/test split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn by_category(labels: &[String]) -> BTreeMap<&str, Vec<usize>> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l.as_str()).or_default().push(i);
    }
    groups
}

fn too_small(category: &str, size: usize, needed: usize) -> Result<(), EvaluateError> {
    if size < needed {
        return Err(EvaluateError::CategoryTooSmall { category: category.to_string(), size, needed });
    }
    Ok(())
}

/// Shuffle each category with a seeded generator and send
/// `round(ratio * size)` documents (at least 1, at most size - 1) to training.
pub fn stratified_split(labels: &[String], train_ratio: f64, seed: u64) -> Result<Split, EvaluateError> {
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(EvaluateError::InvalidRatio(train_ratio));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = Split { train: Vec::new(), test: Vec::new() };
    for (category, mut members) in by_category(labels) {
        too_small(category, members.len(), 2)?;
        members.shuffle(&mut rng);
        let n_train = ((train_ratio * members.len() as f64).round() as usize).clamp(1, members.len() - 1);
        split.train.extend_from_slice(&members[..n_train]);
        split.test.extend_from_slice(&members[n_train..]);
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Test-fold indices for stratified k-fold cross-validation; each category is
/// shuffled and dealt round-robin over the folds.
pub fn stratified_folds(labels: &[String], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvaluateError> {
    if k < 2 {
        return Err(EvaluateError::InvalidFolds(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    for (category, mut members) in by_category(labels) {
        too_small(category, members.len(), k)?;
        members.shuffle(&mut rng);
        for (i, m) in members.into_iter().enumerate() {
            folds[i % k].push(m);
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Run `evaluate(train, test)` once per stratified fold.
pub fn cross_validate<E, F>(labels: &[String], k: usize, seed: u64, mut evaluate: F) -> Result<Vec<EvaluationReport>, E>
where
    E: From<EvaluateError>,
    F: FnMut(&[usize], &[usize]) -> Result<EvaluationReport, E>,
{
    let folds = stratified_folds(labels, k, seed)?;
    folds
        .iter()
        .map(|test| {
            let train: Vec<usize> = (0..labels.len()).filter(|i| test.binary_search(i).is_err()).collect();
            evaluate(&train, test)
        })
        .collect()
}

/// Unweighted mean of the macro values of several reports.
pub fn mean_macro(reports: &[EvaluationReport]) -> (f64, f64, f64) {
    let n = reports.len().max(1) as f64;
    (
        reports.iter().map(|r| r.macro_precision).sum::<f64>() / n,
        reports.iter().map(|r| r.macro_recall).sum::<f64>() / n,
        reports.iter().map(|r| r.macro_f).sum::<f64>() / n,
    )
}
