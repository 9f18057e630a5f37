use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bayes::argmax;
use super::WeightedVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: 20, min_leaf: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf { class: usize, counts: Vec<usize> },
    Split { feature: usize, threshold: f64, below: usize, above: usize },
}

/// Binary decision tree on numeric features choosing splits by gain ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRatioTree {
    nodes: Vec<Node>,
}

fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

fn majority(counts: &[usize]) -> usize {
    let as_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    argmax(&as_f)
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
    ratio: f64,
}

struct Builder<'a> {
    docs: &'a [WeightedVector],
    labels: &'a [usize],
    n_classes: usize,
    params: TreeParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn class_counts(&self, members: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &m in members {
            counts[self.labels[m]] += 1;
        }
        counts
    }

    /// Best threshold of one feature by information gain, honouring the
    /// minimum leaf size on both sides.
    fn best_threshold(
        &self,
        feature: usize,
        present: &mut [(f64, usize)],
        n: usize,
        counts: &[usize],
        parent_entropy: f64,
    ) -> Option<Candidate> {
        present.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n_zero = n - present.len();
        let mut below = counts.to_vec();
        for &(_, label) in present.iter() {
            below[label] -= 1;
        }
        let mut above: Vec<usize> = counts.iter().zip(&below).map(|(c, b)| c - b).collect();
        let mut best: Option<Candidate> = None;
        let mut prev = 0.0;
        let min_leaf = self.params.min_leaf.max(1);
        for (n_below, (pos, &(value, label))) in (n_zero..).zip(present.iter().enumerate()) {
            if (pos > 0 || n_zero > 0) && value > prev && n_below >= min_leaf && n - n_below >= min_leaf {
                let (pb, pa) = (n_below as f64 / n as f64, (n - n_below) as f64 / n as f64);
                let gain = parent_entropy - pb * entropy(&below) - pa * entropy(&above);
                let split_info = -(pb * pb.log2() + pa * pa.log2());
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Candidate { feature, threshold: (prev + value) / 2.0, gain, ratio: gain / split_info });
                }
            }
            below[label] += 1;
            above[label] -= 1;
            prev = value;
        }
        best.filter(|c| c.gain > 1e-12)
    }

    fn choose_split(&self, members: &[usize], counts: &[usize]) -> Option<Candidate> {
        let mut columns: BTreeMap<usize, Vec<(f64, usize)>> = BTreeMap::new();
        for &m in members {
            for &(f, v) in self.docs[m].entries() {
                columns.entry(f).or_default().push((v, self.labels[m]));
            }
        }
        let parent_entropy = entropy(counts);
        let candidates: Vec<Candidate> = columns
            .into_iter()
            .filter_map(|(f, mut present)| self.best_threshold(f, &mut present, members.len(), counts, parent_entropy))
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let average_gain = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
        candidates
            .into_iter()
            .filter(|c| c.gain >= average_gain - 1e-12)
            .fold(None, |best: Option<Candidate>, c| match best {
                Some(b) if b.ratio >= c.ratio - 1e-12 => Some(b),
                _ => Some(c),
            })
    }

    fn grow(&mut self, members: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_counts(&members);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let split = if pure || depth >= self.params.max_depth || members.len() < 2 * self.params.min_leaf.max(1) {
            None
        } else {
            self.choose_split(&members, &counts)
        };
        let id = self.nodes.len();
        let Some(split) = split else {
            self.nodes.push(Node::Leaf { class: majority(&counts), counts });
            return id;
        };
        self.nodes.push(Node::Leaf { class: 0, counts: Vec::new() });
        let (lo, hi): (Vec<usize>, Vec<usize>) =
            members.into_iter().partition(|&m| self.docs[m].value(split.feature) <= split.threshold);
        let below = self.grow(lo, depth + 1);
        let above = self.grow(hi, depth + 1);
        self.nodes[id] = Node::Split { feature: split.feature, threshold: split.threshold, below, above };
        id
    }
}

impl GainRatioTree {
    /// Among features whose best split gain is at least the average, pick the
    /// highest gain ratio; ties keep the lower feature ordinal.
    pub fn fit(docs: &[WeightedVector], labels: &[usize], n_classes: usize, params: TreeParams) -> Self {
        let mut builder = Builder { docs, labels, n_classes, params, nodes: Vec::new() };
        builder.grow((0..docs.len()).collect(), 0);
        Self { nodes: builder.nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { below, above, .. } => 1 + walk(nodes, *below).max(walk(nodes, *above)),
            }
        }
        walk(&self.nodes, 0)
    }

    fn leaf(&self, doc: &WeightedVector) -> (usize, &[usize]) {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { class, counts } => return (*class, counts),
                Node::Split { feature, threshold, below, above } => {
                    id = if doc.value(*feature) <= *threshold { *below } else { *above };
                }
            }
        }
    }

    pub fn predict(&self, doc: &WeightedVector) -> usize {
        self.leaf(doc).0
    }

    /// Class distribution of the reached leaf.
    pub fn distribution(&self, doc: &WeightedVector) -> Vec<f64> {
        let counts = self.leaf(doc).1;
        let n: usize = counts.iter().sum();
        counts.iter().map(|&c| c as f64 / n.max(1) as f64).collect()
    }
}
