use serde::{Deserialize, Serialize};

/// Sparse vector over feature ordinals, entries sorted by ordinal.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightedVector {
    entries: Vec<(usize, f64)>,
}

impl WeightedVector {
    pub fn from_sorted(entries: Vec<(usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, v)| *v == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &WeightedVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Unit-length copy; the zero vector stays zero.
    pub fn normalized(&self) -> WeightedVector {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        Self { entries: self.entries.iter().map(|&(i, v)| (i, v / n)).collect() }
    }

    pub fn value(&self, ordinal: usize) -> f64 {
        self.entries
            .binary_search_by_key(&ordinal, |(i, _)| *i)
            .map(|p| self.entries[p].1)
            .unwrap_or(0.0)
    }
}
