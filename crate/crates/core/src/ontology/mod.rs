//! MeSH-style thesaurus: descriptors, tree-number hierarchy and per-language
//! label index.
//!
//! An [`Ontology`] is immutable once built. All loaders go through
//! [`OntologyBuilder`], which derives parent links from tree numbers and
//! enforces the structural invariants (unique ids and tree numbers, bounded
//! depth, acyclic parent relation).

mod synth;
mod tabular;
mod xml;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text;

pub use synth::{generate_descriptor_xml, SyntheticDescriptorCounts};
pub use tabular::{load_ontology_tabular, write_ontology_tabular};
pub use xml::{ingest_ontology_xml, load_ontology_xml, write_ontology_xml, IngestOptions, IngestStats, Ingested};

/// Language code of the pivot language. English labels are mandatory.
pub const PIVOT_LANGUAGE: &str = "en";

/// Default bound on dotted segments per tree number.
pub const DEFAULT_MAX_DEPTH: usize = 11;

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("language {requested:?} is not indexed (available: {available})")]
    UnknownLanguage { requested: String, available: String },
    #[error("unknown concept id {0:?}")]
    UnknownConcept(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = OntologyError> = std::result::Result<T, E>;

/// One descriptor of the thesaurus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    /// Preferred label per language code, whitespace-collapsed.
    pub labels: BTreeMap<String, String>,
    /// Synonyms per language code.
    pub entry_terms: BTreeMap<String, Vec<String>>,
    pub tree_numbers: Vec<String>,
    /// Owners of the tree numbers one level up, in tree-number order.
    pub parent_ids: Vec<String>,
}

impl Concept {
    /// Minimum number of dotted segments over the concept's tree numbers.
    pub fn min_depth(&self) -> usize {
        self.tree_numbers.iter().map(|t| tree_depth(t)).min().unwrap_or(usize::MAX)
    }
}

/// Whether an index entry comes from a preferred label or an entry term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKind {
    Preferred,
    Entry,
}

/// A candidate concept for a surface string together with its ranking key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub concept: String,
    pub kind: LabelKind,
    pub depth: usize,
}

impl IndexEntry {
    fn rank(&self) -> (LabelKind, usize, &str) {
        (self.kind, self.depth, &self.concept)
    }
}

/// Sort candidates by (preferred before entry, shallower first, id) and keep
/// the best-ranked entry for each concept.
pub fn order_candidates(entries: &mut Vec<IndexEntry>) {
    entries.sort_by(|a, b| a.rank().cmp(&b.rank()));
    let mut seen = BTreeSet::new();
    entries.retain(|e| seen.insert(e.concept.clone()));
}

/// Raw descriptor content before hierarchy derivation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptRecord {
    pub id: String,
    pub labels: BTreeMap<String, String>,
    pub entry_terms: BTreeMap<String, Vec<String>>,
    pub tree_numbers: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Ontology {
    concepts: BTreeMap<String, Concept>,
    index: BTreeMap<String, HashMap<String, Vec<IndexEntry>>>,
    max_label_tokens: BTreeMap<String, usize>,
    max_depth: usize,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.concepts == other.concepts && self.max_depth == other.max_depth
    }
}

impl Ontology {
    pub fn empty() -> Self {
        OntologyBuilder::new(DEFAULT_MAX_DEPTH).build().expect("empty ontology is valid")
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.concepts.contains_key(id)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> + '_ {
        self.concepts.values()
    }

    /// Languages with at least one indexed label.
    pub fn languages(&self) -> impl Iterator<Item = &str> + '_ {
        self.index.keys().map(String::as_str)
    }

    pub fn has_language(&self, language: &str) -> bool {
        self.index.contains_key(language)
    }

    pub fn max_label_tokens(&self, language: &str) -> usize {
        self.max_label_tokens.get(language).copied().unwrap_or(0)
    }

    fn language_index(&self, language: &str) -> Result<&HashMap<String, Vec<IndexEntry>>> {
        self.index.get(language).ok_or_else(|| OntologyError::UnknownLanguage {
            requested: language.to_owned(),
            available: self.languages().collect::<Vec<_>>().join(", "),
        })
    }

    /// Ordered candidate concepts for a normalized token sequence.
    pub fn lookup(&self, language: &str, surface: &[String]) -> Result<Vec<&str>> {
        self.lookup_key(language, &surface.join(" "))
    }

    /// Like [`Ontology::lookup`] but normalizes raw text first.
    pub fn lookup_text(&self, language: &str, surface: &str) -> Result<Vec<&str>> {
        self.lookup_key(language, &text::normalize(surface))
    }

    fn lookup_key(&self, language: &str, key: &str) -> Result<Vec<&str>> {
        let index = self.language_index(language)?;
        Ok(index
            .get(key)
            .map(|entries| entries.iter().map(|e| e.concept.as_str()).collect())
            .unwrap_or_default())
    }

    /// All index entries of a language, keyed by normalized surface.
    pub fn index_entries(
        &self,
        language: &str,
    ) -> Result<impl Iterator<Item = (&str, &[IndexEntry])> + '_> {
        let index = self.language_index(language)?;
        Ok(index.iter().map(|(k, v)| (k.as_str(), v.as_slice())))
    }

    /// Direct parents of a concept (one level up).
    pub fn hyperonyms(&self, id: &str) -> Result<&[String]> {
        self.concepts
            .get(id)
            .map(|c| c.parent_ids.as_slice())
            .ok_or_else(|| OntologyError::UnknownConcept(id.to_owned()))
    }

    /// Re-express the ontology as raw records, e.g. for re-serialization.
    pub fn records(&self) -> impl Iterator<Item = ConceptRecord> + '_ {
        self.concepts.values().map(|c| ConceptRecord {
            id: c.id.clone(),
            labels: c.labels.clone(),
            entry_terms: c.entry_terms.clone(),
            tree_numbers: c.tree_numbers.clone(),
        })
    }
}

/// Number of dotted segments of a tree number.
pub fn tree_depth(tree_number: &str) -> usize {
    tree_number.split('.').count()
}

fn parent_tree_number(tree_number: &str) -> Option<&str> {
    tree_number.rfind('.').map(|i| &tree_number[..i])
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Accumulates descriptor records and derives the hierarchy on `build`.
#[derive(Debug)]
pub struct OntologyBuilder {
    records: BTreeMap<String, ConceptRecord>,
    max_depth: usize,
    allocated: usize,
}

impl OntologyBuilder {
    pub fn new(max_depth: usize) -> Self {
        Self { records: BTreeMap::new(), max_depth, allocated: 0 }
    }

    /// Number of records handed to the builder so far.
    pub fn allocated_records(&self) -> usize {
        self.allocated
    }

    pub fn add(&mut self, mut record: ConceptRecord) -> Result<()> {
        self.allocated += 1;
        if record.id.trim().is_empty() {
            return Err(OntologyError::Integrity("descriptor with empty id".into()));
        }
        for label in record.labels.values_mut() {
            *label = collapse_whitespace(label);
        }
        record.labels.retain(|_, l| !l.is_empty());
        if !record.labels.contains_key(PIVOT_LANGUAGE) {
            return Err(OntologyError::Integrity(format!(
                "descriptor {} has no English name",
                record.id
            )));
        }
        for (lang, terms) in record.entry_terms.iter_mut() {
            let preferred = record.labels.get(lang).map(|l| text::normalize(l));
            let mut seen = BTreeSet::new();
            terms.retain_mut(|t| {
                *t = collapse_whitespace(t);
                let key = text::normalize(t);
                !key.is_empty() && Some(&key) != preferred.as_ref() && seen.insert(key)
            });
        }
        record.entry_terms.retain(|_, terms| !terms.is_empty());
        if self.records.contains_key(&record.id) {
            return Err(OntologyError::Integrity(format!("duplicate descriptor id {}", record.id)));
        }
        self.records.insert(record.id.clone(), record);
        Ok(())
    }

    pub fn build(self) -> Result<Ontology> {
        let max_depth = self.max_depth;
        let mut owner: HashMap<&str, &str> = HashMap::new();
        for rec in self.records.values() {
            for tn in &rec.tree_numbers {
                let depth = tree_depth(tn);
                if tn.split('.').any(str::is_empty) {
                    return Err(OntologyError::Integrity(format!(
                        "malformed tree number {tn:?} on {}",
                        rec.id
                    )));
                }
                if depth > max_depth {
                    return Err(OntologyError::Integrity(format!(
                        "tree number {tn} of {} has depth {depth} > {max_depth}",
                        rec.id
                    )));
                }
                if let Some(other) = owner.insert(tn, &rec.id) {
                    return Err(OntologyError::Integrity(format!(
                        "tree number {tn} shared by {other} and {}",
                        rec.id
                    )));
                }
            }
        }

        let mut parents: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for rec in self.records.values() {
            let mut ps: Vec<String> = Vec::new();
            for tn in &rec.tree_numbers {
                let Some(parent) = parent_tree_number(tn).and_then(|p| owner.get(p)) else {
                    continue;
                };
                if *parent == rec.id {
                    return Err(OntologyError::Integrity(format!(
                        "descriptor {} is its own parent via {tn}",
                        rec.id
                    )));
                }
                if !ps.iter().any(|p| p == parent) {
                    ps.push((*parent).to_owned());
                }
            }
            parents.insert(&rec.id, ps);
        }
        check_acyclic(&parents)?;

        let mut concepts = BTreeMap::new();
        for (id, rec) in &self.records {
            let parent_ids = parents.remove(id.as_str()).unwrap_or_default();
            concepts.insert(
                id.clone(),
                Concept {
                    id: rec.id.clone(),
                    labels: rec.labels.clone(),
                    entry_terms: rec.entry_terms.clone(),
                    tree_numbers: rec.tree_numbers.clone(),
                    parent_ids,
                },
            );
        }
        drop(owner);

        let mut index: BTreeMap<String, HashMap<String, Vec<IndexEntry>>> = BTreeMap::new();
        let mut max_label_tokens: BTreeMap<String, usize> = BTreeMap::new();
        for c in concepts.values() {
            let depth = c.min_depth();
            let surfaces = c
                .labels
                .iter()
                .map(|(lang, l)| (lang, l, LabelKind::Preferred))
                .chain(c.entry_terms.iter().flat_map(|(lang, ts)| {
                    ts.iter().map(move |t| (lang, t, LabelKind::Entry))
                }));
            for (lang, surface, kind) in surfaces {
                let tokens = text::tokenize(surface);
                if tokens.is_empty() {
                    continue;
                }
                let longest = max_label_tokens.entry(lang.clone()).or_insert(0);
                *longest = (*longest).max(tokens.len());
                index
                    .entry(lang.clone())
                    .or_default()
                    .entry(tokens.join(" "))
                    .or_default()
                    .push(IndexEntry { concept: c.id.clone(), kind, depth });
            }
        }
        for lang_index in index.values_mut() {
            for entries in lang_index.values_mut() {
                order_candidates(entries);
            }
        }

        Ok(Ontology { concepts, index, max_label_tokens, max_depth })
    }
}

fn check_acyclic(parents: &BTreeMap<&str, Vec<String>>) -> Result<()> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: HashMap<&str, Mark> = HashMap::new();
    for &start in parents.keys() {
        if marks.contains_key(start) {
            continue;
        }
        // (node, next parent index)
        let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
        marks.insert(start, Mark::Active);
        while let Some((node, next)) = stack.pop() {
            let ps = &parents[node];
            if next < ps.len() {
                stack.push((node, next + 1));
                let p = ps[next].as_str();
                match marks.get(p) {
                    Some(Mark::Active) => {
                        return Err(OntologyError::Integrity(format!(
                            "cycle in parent relation through {p}"
                        )))
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(p, Mark::Active);
                        stack.push((p, 0));
                    }
                }
            } else {
                marks.insert(node, Mark::Done);
            }
        }
    }
    Ok(())
}
