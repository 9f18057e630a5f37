//! Mapping of term vectors onto ontology concepts.
//!
//! A document's term sequence is segmented by greedy longest match against a
//! per-language [`ConceptIndex`]. Each matched segment feeds the concept part
//! of a [`HybridRepresentation`] according to the disambiguation strategy;
//! the mapping strategy decides what stays in the term part.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{order_candidates, IndexEntry, Ontology, OntologyError};
use crate::preprocess::{Stemmer, TermVector};
use crate::sparse::SparseVector;

#[derive(Debug, Error)]
pub enum ConceptMapError {
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error("term vector is in {vector:?} but the concept index is for {index:?}")]
    LanguageMismatch { vector: String, index: String },
}

#[derive(Debug, Error)]
#[error("unknown {kind} {value:?} (expected one of: {expected})")]
pub struct ParseStrategyError {
    pub(crate) kind: &'static str,
    pub(crate) value: String,
    pub(crate) expected: &'static str,
}

macro_rules! named_enum {
    ($ty:ident, $kind:literal, { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn name(&self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }
        impl ::std::fmt::Display for $ty {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.name())
            }
        }
        impl ::std::str::FromStr for $ty {
            type Err = $crate::conceptmap::ParseStrategyError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim() {
                    $($name => Ok($ty::$variant),)+
                    other => Err($crate::conceptmap::ParseStrategyError {
                        kind: $kind,
                        value: other.to_owned(),
                        expected: concat!($($name, " "),+),
                    }),
                }
            }
        }
    };
}
pub(crate) use named_enum;

/// How matched terms and their concepts populate the representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum MappingStrategy {
    /// Keep every term and append the concepts.
    AddConcept,
    /// Terms with a concept are moved to the concept part.
    #[default]
    ReplaceTermsByConcepts,
    /// Only concepts are kept.
    ConceptOnly,
}

named_enum!(MappingStrategy, "mapping strategy", {
    AddConcept => "add",
    ReplaceTermsByConcepts => "replace",
    ConceptOnly => "concept-only",
});

/// Which of a term's ordered candidate concepts receive its frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DisambiguationStrategy {
    AllConcepts,
    #[default]
    FirstConcept,
}

named_enum!(DisambiguationStrategy, "disambiguation strategy", {
    AllConcepts => "all",
    FirstConcept => "first",
});

/// How hyperonym frequencies are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum HyperonymMode {
    /// Each concept's frequency is added to its direct parents; originals are kept.
    #[default]
    Propagate,
    /// Each concept's frequency is replaced by the sum of its parents' frequencies.
    Literal,
}

named_enum!(HyperonymMode, "hyperonym mode", {
    Propagate => "propagate",
    Literal => "literal",
});

/// Paired term and concept vectors of one document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HybridRepresentation {
    pub language: String,
    pub term_part: SparseVector,
    pub concept_part: SparseVector,
}

impl HybridRepresentation {
    pub fn is_empty(&self) -> bool {
        self.term_part.is_empty() && self.concept_part.is_empty()
    }
}

/// Surface-to-concept index for one language, keyed by the token sequence a
/// label produces after the same filtering applied to documents.
#[derive(Debug, Clone)]
pub struct ConceptIndex {
    language: String,
    keys: HashMap<String, Vec<String>>,
    max_tokens: usize,
}

impl ConceptIndex {
    /// Index the ontology's labels of `language` verbatim.
    pub fn new(onto: &Ontology, language: &str) -> Result<Self, ConceptMapError> {
        let keys = onto
            .index_entries(language)?
            .map(|(k, entries)| (k.to_owned(), entries.iter().map(|e| e.concept.clone()).collect()))
            .collect();
        Ok(Self { language: language.to_owned(), keys, max_tokens: onto.max_label_tokens(language) })
    }

    /// Index labels after removing `stopwords` (and stemming), so that labels
    /// match the filtered term sequence of a document. Labels whose filtered
    /// forms coincide share one candidate list, re-ranked by the usual order.
    pub fn filtered(
        onto: &Ontology,
        language: &str,
        stopwords: &HashSet<String>,
        stemmer: Option<&dyn Stemmer>,
    ) -> Result<Self, ConceptMapError> {
        let mut merged: HashMap<String, Vec<IndexEntry>> = HashMap::new();
        let mut max_tokens = 0;
        for (key, entries) in onto.index_entries(language)? {
            let content: Vec<String> = key
                .split(' ')
                .filter(|t| !stopwords.contains(*t))
                .map(|t| stemmer.map_or_else(|| t.to_owned(), |s| s.stem(t)))
                .filter(|t| !t.is_empty())
                .collect();
            if content.is_empty() {
                continue;
            }
            max_tokens = max_tokens.max(content.len());
            merged.entry(content.join(" ")).or_default().extend(entries.iter().cloned());
        }
        let keys = merged
            .into_iter()
            .map(|(k, mut entries)| {
                order_candidates(&mut entries);
                (k, entries.into_iter().map(|e| e.concept).collect())
            })
            .collect();
        Ok(Self { language: language.to_owned(), keys, max_tokens })
    }

    /// An index that maps nothing.
    pub fn empty(language: &str) -> Self {
        Self { language: language.to_owned(), keys: HashMap::new(), max_tokens: 0 }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    pub fn candidates(&self, tokens: &[String]) -> &[String] {
        self.keys.get(&tokens.join(" ")).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// One unit of the greedy segmentation.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment<'a> {
    Concept { tokens: &'a [String], candidates: &'a [String] },
    Term(&'a str),
}

/// Greedy longest-match, left to right.
pub fn segment<'a>(sequence: &'a [String], index: &'a ConceptIndex) -> Vec<Segment<'a>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sequence.len() {
        let longest = index.max_tokens.min(sequence.len() - i);
        let hit = (1..=longest).rev().find_map(|len| {
            let window = &sequence[i..i + len];
            let c = index.candidates(window);
            (!c.is_empty()).then_some((window, c))
        });
        match hit {
            Some((tokens, candidates)) => {
                i += tokens.len();
                out.push(Segment::Concept { tokens, candidates });
            }
            None => {
                out.push(Segment::Term(&sequence[i]));
                i += 1;
            }
        }
    }
    out
}

/// Map a term vector against a prepared index.
pub fn map_with_index(
    tv: &TermVector,
    index: &ConceptIndex,
    mapping: MappingStrategy,
    disambiguation: DisambiguationStrategy,
) -> Result<HybridRepresentation, ConceptMapError> {
    if tv.language != index.language {
        return Err(ConceptMapError::LanguageMismatch {
            vector: tv.language.clone(),
            index: index.language.clone(),
        });
    }
    let mut rep = HybridRepresentation { language: tv.language.clone(), ..Default::default() };
    for seg in segment(&tv.sequence, index) {
        match seg {
            Segment::Concept { tokens, candidates } => {
                match disambiguation {
                    DisambiguationStrategy::FirstConcept => rep.concept_part.add(&candidates[0], 1.0),
                    DisambiguationStrategy::AllConcepts => {
                        for c in candidates {
                            rep.concept_part.add(c, 1.0);
                        }
                    }
                }
                if mapping == MappingStrategy::AddConcept {
                    for t in tokens {
                        rep.term_part.add(t, 1.0);
                    }
                }
            }
            Segment::Term(t) => {
                if mapping != MappingStrategy::ConceptOnly {
                    rep.term_part.add(t, 1.0);
                }
            }
        }
    }
    Ok(rep)
}

/// Map a term vector using the ontology's labels for the vector's language.
pub fn map_terms(
    tv: &TermVector,
    onto: &Ontology,
    mapping: MappingStrategy,
    disambiguation: DisambiguationStrategy,
) -> Result<HybridRepresentation, ConceptMapError> {
    let index = ConceptIndex::new(onto, &tv.language)?;
    map_with_index(tv, &index, mapping, disambiguation)
}

/// One-level hyperonym enrichment of the concept part.
pub fn enrich_with_hyperonyms(
    rep: &HybridRepresentation,
    onto: &Ontology,
    mode: HyperonymMode,
) -> Result<HybridRepresentation, ConceptMapError> {
    let mut concept_part = match mode {
        HyperonymMode::Propagate => rep.concept_part.clone(),
        HyperonymMode::Literal => SparseVector::new(),
    };
    for (c, f) in rep.concept_part.iter() {
        let parents = onto.hyperonyms(c)?;
        match mode {
            HyperonymMode::Propagate => {
                for p in parents {
                    concept_part.add(p, f);
                }
            }
            HyperonymMode::Literal => {
                let from_parents: f64 = parents.iter().map(|p| rep.concept_part.get(p)).sum();
                concept_part.add(c, from_parents);
            }
        }
    }
    Ok(HybridRepresentation { language: rep.language.clone(), term_part: rep.term_part.clone(), concept_part })
}
