use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{feature_entries, ModelError, WeightedVector};
use crate::conceptmap::HybridRepresentation;
use crate::sparse::SparseVector;

/// Ordered vocabulary of feature names built from training data.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FeatureSpace {
    features: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl PartialEq for FeatureSpace {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features
    }
}

impl FeatureSpace {
    pub fn from_sorted(features: Vec<String>) -> Self {
        debug_assert!(features.windows(2).all(|w| w[0] < w[1]));
        let mut space = Self { features, index: HashMap::new() };
        space.rebuild_index();
        space
    }

    pub(crate) fn rebuild_index(&mut self) {
        self.index = self.features.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn ordinal(&self, feature: &str) -> Option<usize> {
        self.index.get(feature).copied()
    }

    pub fn feature(&self, ordinal: usize) -> &str {
        &self.features[ordinal]
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }
}

/// Aggregated counts of one category and their TF-IDF weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryProfile {
    pub category: String,
    /// Feature occurrences summed over the category's training documents.
    pub raw_counts: SparseVector,
    /// `TF * ln(categories / DF)`; features present in every category get 0.
    pub tfidf: SparseVector,
}

/// Category-level document frequencies; IDF counts categories, not documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryWeighting {
    pub n_categories: usize,
    /// Number of categories containing each feature, by ordinal.
    pub df: Vec<u32>,
}

impl CategoryWeighting {
    pub fn idf(&self, ordinal: usize) -> f64 {
        (self.n_categories as f64 / f64::from(self.df[ordinal])).ln()
    }

    /// Document weights `count * idf`, out-of-vocabulary features dropped.
    /// Features occurring in every category weigh zero and are omitted.
    pub fn weigh(&self, space: &FeatureSpace, rep: &HybridRepresentation) -> WeightedVector {
        let mut entries: Vec<(usize, f64)> = feature_entries(rep)
            .filter_map(|(name, count)| {
                let i = space.ordinal(&name)?;
                let w = count * self.idf(i);
                (w > 0.0).then_some((i, w))
            })
            .collect();
        entries.sort_by_key(|(i, _)| *i);
        WeightedVector::from_sorted(entries)
    }
}

/// Build the vocabulary, category profiles and category-level weighting.
pub fn build_profiles(
    labeled: &[(HybridRepresentation, String)],
) -> Result<(FeatureSpace, Vec<CategoryProfile>, CategoryWeighting), ModelError> {
    let categories: BTreeSet<&str> = labeled.iter().map(|(_, c)| c.as_str()).collect();
    if categories.len() < 2 {
        return Err(ModelError::TooFewCategories(categories.len()));
    }
    let mut raw: BTreeMap<&str, SparseVector> = categories.iter().map(|c| (*c, SparseVector::new())).collect();
    for (i, (rep, category)) in labeled.iter().enumerate() {
        if rep.is_empty() {
            return Err(ModelError::EmptyDocument(i));
        }
        let counts = raw.get_mut(category.as_str()).expect("category collected above");
        for (name, v) in feature_entries(rep) {
            counts.add(&name, v);
        }
    }
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for counts in raw.values() {
        for key in counts.keys() {
            *df.entry(key).or_default() += 1;
        }
    }
    let space = FeatureSpace::from_sorted(df.keys().map(|k| k.to_string()).collect());
    let weighting = CategoryWeighting { n_categories: categories.len(), df: df.values().copied().collect() };
    let profiles = raw
        .iter()
        .map(|(category, counts)| {
            let tfidf = counts
                .iter()
                .map(|(k, tf)| {
                    let i = space.ordinal(k).expect("feature in vocabulary");
                    (k, tf * weighting.idf(i))
                })
                .collect();
            CategoryProfile { category: category.to_string(), raw_counts: counts.clone(), tfidf }
        })
        .collect();
    Ok((space, profiles, weighting))
}
