use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Non-negative frequency or weight map keyed by feature name.
///
/// Keys are kept ordered so that iteration, serialization and floating point
/// summation are reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseVector {
    entries: BTreeMap<String, f64>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Add `value` to the entry for `key`. Zero additions do not create entries.
    pub fn add(&mut self, key: &str, value: f64) {
        debug_assert!(value >= 0.0, "negative weight {value} for {key}");
        if value == 0.0 {
            return;
        }
        match self.entries.get_mut(key) {
            Some(v) => *v += value,
            None => {
                self.entries.insert(key.to_owned(), value);
            }
        }
    }

    pub fn set(&mut self, key: &str, value: f64) {
        debug_assert!(value >= 0.0);
        if value == 0.0 {
            self.entries.remove(key);
        } else {
            self.entries.insert(key.to_owned(), value);
        }
    }

    pub fn merge(&mut self, other: &SparseVector) {
        for (k, v) in other.iter() {
            self.add(k, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Multiply every entry by `factor` (must be positive).
    pub fn scaled(&self, factor: f64) -> SparseVector {
        assert!(factor > 0.0);
        SparseVector {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v * factor)).collect(),
        }
    }
}

impl<'a> FromIterator<(&'a str, f64)> for SparseVector {
    fn from_iter<I: IntoIterator<Item = (&'a str, f64)>>(iter: I) -> Self {
        let mut v = SparseVector::new();
        for (k, x) in iter {
            v.add(k, x);
        }
        v
    }
}

impl FromIterator<(String, f64)> for SparseVector {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        let mut v = SparseVector::new();
        for (k, x) in iter {
            v.add(&k, x);
        }
        v
    }
}
