//! Category TF-IDF weighting and the classifiers trained over it.

mod bayes;
mod boost;
mod knn;
mod persist;
mod profile;
mod tree;
mod vector;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conceptmap::HybridRepresentation;

pub use bayes::NaiveBayes;
pub use boost::AdaBoostNb;
pub use knn::{KnnIndex, Neighbour};
pub use persist::{load_model, save_model, FORMAT_VERSION, MAGIC};
pub use profile::{build_profiles, CategoryProfile, CategoryWeighting, FeatureSpace};
pub use tree::{GainRatioTree, Node, TreeParams};
pub use vector::WeightedVector;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training needs at least 2 categories, found {0}")]
    TooFewCategories(usize),
    #[error("training document {0} has an empty representation")]
    EmptyDocument(usize),
    #[error("{0} representations but {1} labels")]
    LengthMismatch(usize, usize),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("model was trained with configuration `{model}` but input uses `{input}`")]
    FingerprintMismatch { model: String, input: String },
    #[error("unsupported model file: {0}")]
    Version(String),
    #[error("model file is truncated")]
    Truncated,
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Classifier family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ClassifierKind {
    Knn,
    #[default]
    NaiveBayes,
    AdaBoostNb,
    Tree,
}

crate::conceptmap::named_enum!(ClassifierKind, "classifier", {
    Knn => "knn",
    NaiveBayes => "nb",
    AdaBoostNb => "adaboost-nb",
    Tree => "tree",
});

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] =
        [ClassifierKind::Knn, ClassifierKind::NaiveBayes, ClassifierKind::AdaBoostNb, ClassifierKind::Tree];

    /// Descriptive label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::NaiveBayes => "naive-bayes",
            ClassifierKind::AdaBoostNb => "adaboost-m1-nb",
            ClassifierKind::Tree => "tree-gainratio",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub k: usize,
    pub rounds: usize,
    pub alpha: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        let tree = TreeParams::default();
        Self { k: 5, rounds: 10, alpha: 1.0, max_depth: tree.max_depth, min_leaf: tree.min_leaf }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidHyperparameter(m.to_string()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.rounds == 0 {
            return bad("boosting rounds must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("smoothing alpha must be positive and finite");
        }
        if self.max_depth == 0 {
            return bad("tree depth must be at least 1");
        }
        if self.min_leaf == 0 {
            return bad("minimum leaf size must be at least 1");
        }
        Ok(())
    }

    fn tree(&self) -> TreeParams {
        TreeParams { max_depth: self.max_depth, min_leaf: self.min_leaf }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classifier {
    Knn(KnnIndex),
    NaiveBayes(NaiveBayes),
    AdaBoostNb(AdaBoostNb),
    Tree(GainRatioTree),
}

impl Classifier {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            Classifier::Knn(_) => ClassifierKind::Knn,
            Classifier::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            Classifier::AdaBoostNb(_) => ClassifierKind::AdaBoostNb,
            Classifier::Tree(_) => ClassifierKind::Tree,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub category: String,
    /// Score of the predicted category.
    pub score: f64,
    /// Score per category, in model category order.
    pub scores: Vec<(String, f64)>,
    /// The document had no known weighted feature and got a default answer.
    pub fallback: bool,
}

/// Feature names of a representation: `t:` for terms, `c:` for concepts.
pub(crate) fn feature_entries(rep: &HybridRepresentation) -> impl Iterator<Item = (String, f64)> + '_ {
    rep.term_part
        .iter()
        .map(|(k, v)| (format!("t:{k}"), v))
        .chain(rep.concept_part.iter().map(|(k, v)| (format!("c:{k}"), v)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub fingerprint: String,
    /// Free-form settings recorded alongside the model (e.g. pipeline options).
    pub settings: BTreeMap<String, String>,
    pub categories: Vec<String>,
    pub features: FeatureSpace,
    pub weighting: CategoryWeighting,
    pub profiles: Vec<CategoryProfile>,
    pub hyperparameters: Hyperparameters,
    /// Index of the most frequent training category; ties go to the first.
    pub majority: usize,
    pub classifier: Classifier,
}

impl TrainedModel {
    /// Train on representations and their labels. Document vectors are
    /// `count * ln(categories / DF)`, L2-normalized for every classifier.
    pub fn train(
        reps: &[HybridRepresentation],
        labels: &[String],
        kind: ClassifierKind,
        hyperparameters: Hyperparameters,
        fingerprint: &str,
    ) -> Result<Self, ModelError> {
        if reps.len() != labels.len() {
            return Err(ModelError::LengthMismatch(reps.len(), labels.len()));
        }
        hyperparameters.validate()?;
        let labeled: Vec<(HybridRepresentation, String)> = reps.iter().cloned().zip(labels.iter().cloned()).collect();
        let (features, profiles, weighting) = build_profiles(&labeled)?;
        let categories: Vec<String> =
            labels.iter().map(String::as_str).collect::<BTreeSet<_>>().into_iter().map(str::to_string).collect();
        let label_ids: Vec<usize> =
            labels.iter().map(|l| categories.binary_search(l).expect("label among categories")).collect();
        let mut frequency = vec![0usize; categories.len()];
        label_ids.iter().for_each(|&l| frequency[l] += 1);
        let majority = bayes::argmax(&frequency.iter().map(|&f| f as f64).collect::<Vec<_>>());
        let docs: Vec<WeightedVector> = reps.iter().map(|r| weighting.weigh(&features, r).normalized()).collect();
        let (nc, nf) = (categories.len(), features.len());
        let h = hyperparameters;
        let classifier = match kind {
            ClassifierKind::Knn => Classifier::Knn(KnnIndex::new(h.k, nc, &docs, &label_ids)),
            ClassifierKind::NaiveBayes => {
                Classifier::NaiveBayes(NaiveBayes::fit(&docs, &label_ids, &vec![1.0; docs.len()], nc, nf, h.alpha))
            }
            ClassifierKind::AdaBoostNb => {
                Classifier::AdaBoostNb(AdaBoostNb::fit(&docs, &label_ids, nc, nf, h.alpha, h.rounds))
            }
            ClassifierKind::Tree => Classifier::Tree(GainRatioTree::fit(&docs, &label_ids, nc, h.tree())),
        };
        Ok(Self {
            fingerprint: fingerprint.to_string(),
            settings: BTreeMap::new(),
            categories,
            features,
            weighting,
            profiles,
            hyperparameters,
            majority,
            classifier,
        })
    }

    pub fn with_settings(mut self, settings: BTreeMap<String, String>) -> Self {
        self.settings = settings;
        self
    }

    pub fn kind(&self) -> ClassifierKind {
        self.classifier.kind()
    }

    /// Weighted document vector before normalization.
    pub fn weight_document(&self, rep: &HybridRepresentation, fingerprint: &str) -> Result<WeightedVector, ModelError> {
        self.check_fingerprint(fingerprint)?;
        Ok(self.weighting.weigh(&self.features, rep))
    }

    pub fn check_fingerprint(&self, fingerprint: &str) -> Result<(), ModelError> {
        if self.fingerprint != fingerprint {
            return Err(ModelError::FingerprintMismatch { model: self.fingerprint.clone(), input: fingerprint.to_string() });
        }
        Ok(())
    }

    pub fn classify(&self, rep: &HybridRepresentation, fingerprint: &str) -> Result<Prediction, ModelError> {
        let doc = self.weight_document(rep, fingerprint)?.normalized();
        Ok(self.classify_vector(&doc))
    }

    /// Classify an already weighted vector (normalized here).
    pub fn classify_vector(&self, doc: &WeightedVector) -> Prediction {
        let doc = doc.normalized();
        let fallback = doc.is_zero();
        let (class, scores) = match (&self.classifier, fallback) {
            (Classifier::NaiveBayes(nb), _) => {
                let post = nb.posterior(&doc);
                (bayes::argmax(&post), post)
            }
            (_, true) => {
                let mut s = vec![0.0; self.categories.len()];
                s[self.majority] = 1.0;
                (self.majority, s)
            }
            (Classifier::Knn(knn), false) => knn.predict(&doc),
            (Classifier::AdaBoostNb(boost), false) => {
                let votes = boost.votes(&doc);
                (bayes::argmax(&votes), votes)
            }
            (Classifier::Tree(tree), false) => (tree.predict(&doc), tree.distribution(&doc)),
        };
        Prediction {
            category: self.categories[class].clone(),
            score: scores[class],
            scores: self.categories.iter().cloned().zip(scores).collect(),
            fallback,
        }
    }
}
