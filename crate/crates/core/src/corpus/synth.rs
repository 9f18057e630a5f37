//! Deterministic synthetic corpora with a matching ontology and lexicon.
//!
//! Every category owns a parent concept and several child concepts. Each
//! concept has an English and a French label built from pseudo-words that
//! occur nowhere else, so a label mention can only map to its own concept.
//! Documents mix child-concept mentions (mostly from their own category),
//! background words shared by all categories and languages, and stopwords of
//! the document's language.

use std::collections::{BTreeMap, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Corpus, CorpusError, Document};
use crate::multilingual::BilingualLexicon;
use crate::ontology::{ConceptRecord, Ontology, OntologyBuilder, DEFAULT_MAX_DEPTH};
use crate::preprocess::StopwordTable;
use crate::text;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub categories: usize,
    /// Documents per category and language.
    pub docs_per_language: usize,
    pub seed: u64,
    pub children_per_category: usize,
    /// Concept mentions per document.
    pub concept_mentions: usize,
    /// Background-word mentions per document.
    pub noise_mentions: usize,
    /// Size of the shared background vocabulary.
    pub noise_vocabulary: usize,
    /// Probability that a concept mention comes from another category.
    pub confuser_rate: f64,
    /// Share of concepts whose French label has a lexicon entry.
    pub lexicon_coverage: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            categories: 8,
            docs_per_language: 50,
            seed: 42,
            children_per_category: 4,
            concept_mentions: 6,
            noise_mentions: 8,
            noise_vocabulary: 40,
            confuser_rate: 0.05,
            lexicon_coverage: 1.0,
        }
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<(), CorpusError> {
        let bad = |m: &str| Err(CorpusError::InvalidSpec(m.to_string()));
        if self.categories < 2 {
            return bad("at least 2 categories");
        }
        if self.docs_per_language == 0 {
            return bad("at least 1 document per category and language");
        }
        if self.children_per_category == 0 || self.concept_mentions == 0 {
            return bad("categories need child concepts and documents need concept mentions");
        }
        if !(0.0..1.0).contains(&self.confuser_rate) {
            return bad("confuser rate must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.lexicon_coverage) {
            return bad("lexicon coverage must lie in [0, 1]");
        }
        Ok(())
    }
}

pub struct SyntheticBilingual {
    pub corpus: Corpus,
    pub ontology: Ontology,
    /// French to English.
    pub lexicon: BilingualLexicon,
    pub stopwords: StopwordTable,
}

pub struct SiblingHoldout {
    pub train: Corpus,
    pub test: Corpus,
    pub ontology: Ontology,
    pub stopwords: StopwordTable,
}

const LANGUAGES: [&str; 2] = ["en", "fr"];

struct Words {
    rng: ChaCha8Rng,
    used: HashSet<String>,
}

impl Words {
    const ONSETS: [[&'static str; 12]; 2] = [
        ["b", "d", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v"],
        ["br", "ch", "d", "gr", "l", "m", "n", "pl", "r", "s", "tr", "v"],
    ];
    const VOWELS: [[&'static str; 6]; 2] = [["a", "e", "i", "o", "u", "y"], ["a", "é", "i", "o", "ou", "è"]];

    /// A fresh word whose normalized form collides with nothing generated so
    /// far nor with any stopword.
    fn fresh(&mut self, style: usize) -> String {
        loop {
            let syllables = self.rng.random_range(2..=3);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(Self::ONSETS[style].choose(&mut self.rng).unwrap());
                w.push_str(Self::VOWELS[style].choose(&mut self.rng).unwrap());
            }
            if self.rng.random_bool(0.4) {
                w.push_str(["n", "x", "l", "s"][self.rng.random_range(0..4)]);
            }
            if self.used.insert(text::normalize(&w)) {
                return w;
            }
        }
    }

    /// One or two fresh words; French two-word labels sometimes carry an
    /// inner stopword ("x de y").
    fn label(&mut self, style: usize) -> String {
        match self.rng.random_range(0..10) {
            0..=5 => self.fresh(style),
            6..=7 => format!("{} {}", self.fresh(style), self.fresh(style)),
            _ if style == 1 => format!("{} de {}", self.fresh(style), self.fresh(style)),
            _ => format!("{} {}", self.fresh(style), self.fresh(style)),
        }
    }
}

struct Concept {
    labels: [String; 2],
}

struct World {
    /// Child concepts per category.
    categories: Vec<Vec<Concept>>,
    names: Vec<String>,
    noise: Vec<String>,
    stop_exclusive: [Vec<String>; 2],
    ontology: Ontology,
    lexicon: BilingualLexicon,
    rng: ChaCha8Rng,
}

fn build_world(spec: &SyntheticSpec, stopwords: &StopwordTable) -> Result<World, CorpusError> {
    let mut words = Words { rng: ChaCha8Rng::seed_from_u64(spec.seed), used: HashSet::new() };
    for lang in LANGUAGES {
        for w in stopwords.words(lang).into_iter().flatten() {
            words.used.insert(w.clone());
        }
    }
    let stop_exclusive = LANGUAGES.map(|lang| {
        let other = if lang == "en" { "fr" } else { "en" };
        let mut list: Vec<String> = stopwords
            .words(lang)
            .into_iter()
            .flatten()
            .filter(|w| !stopwords.is_stopword(other, w) && w.chars().count() > 1)
            .cloned()
            .collect();
        list.sort();
        list
    });
    let mut categories = Vec::new();
    let mut builder = OntologyBuilder::new(DEFAULT_MAX_DEPTH);
    let mut lexicon = BilingualLexicon::new("fr");
    let mut concept = |id: String, tree: String, words: &mut Words, lexicon: &mut BilingualLexicon| {
        let labels = [words.label(0), words.label(1)];
        builder.add(ConceptRecord {
            id,
            labels: LANGUAGES.iter().zip(&labels).map(|(l, s)| (l.to_string(), s.clone())).collect(),
            entry_terms: BTreeMap::new(),
            tree_numbers: vec![tree],
        })?;
        if words.rng.random::<f64>() < spec.lexicon_coverage {
            lexicon.insert(&labels[1], &[labels[0].as_str()]);
        }
        Ok::<_, CorpusError>(Concept { labels })
    };
    for c in 0..spec.categories {
        concept(format!("S{:03}000", c + 1), format!("Z{:02}", c + 1), &mut words, &mut lexicon)?;
        let children = (0..spec.children_per_category)
            .map(|j| {
                concept(format!("S{:03}{:03}", c + 1, j + 1), format!("Z{:02}.{:03}", c + 1, j + 1), &mut words, &mut lexicon)
            })
            .collect::<Result<Vec<_>, _>>()?;
        categories.push(children);
    }
    let noise = (0..spec.noise_vocabulary).map(|_| words.fresh(0)).collect();
    let names = (0..spec.categories).map(|c| format!("category-{:02}", c + 1)).collect();
    Ok(World {
        categories,
        names,
        noise,
        stop_exclusive,
        ontology: builder.build()?,
        lexicon,
        rng: words.rng,
    })
}

impl World {
    /// Text of one document of `category` in language `lang` (0 English,
    /// 1 French), drawing its own concepts from `children`.
    fn document(&mut self, spec: &SyntheticSpec, category: usize, children: std::ops::Range<usize>, lang: usize) -> String {
        let mut chunks: Vec<String> = Vec::new();
        for _ in 0..spec.concept_mentions {
            let owner = if self.rng.random::<f64>() < spec.confuser_rate {
                let other = self.rng.random_range(0..self.categories.len() - 1);
                if other >= category { other + 1 } else { other }
            } else {
                category
            };
            let j = self.rng.random_range(children.clone());
            chunks.push(self.categories[owner][j].labels[lang].clone());
        }
        for _ in 0..spec.noise_mentions {
            chunks.push(self.noise.choose(&mut self.rng).unwrap().clone());
        }
        chunks.shuffle(&mut self.rng);
        let mut words = Vec::new();
        for chunk in chunks {
            words.push(self.stop_exclusive[lang].choose(&mut self.rng).unwrap().clone());
            words.push(chunk);
        }
        let mut text = words.join(" ");
        if let Some(first) = text.get(..1) {
            text = first.to_uppercase() + &text[1..];
        }
        text.push('.');
        text
    }
}

/// English and French documents for every category, with an ontology that
/// labels each concept in both languages and a French-to-English lexicon.
pub fn generate_synthetic_bilingual(spec: &SyntheticSpec) -> Result<SyntheticBilingual, CorpusError> {
    spec.validate()?;
    let stopwords = StopwordTable::bundled();
    let mut world = build_world(spec, &stopwords)?;
    let mut documents = Vec::new();
    for c in 0..spec.categories {
        for (l, lang) in LANGUAGES.iter().enumerate() {
            for i in 0..spec.docs_per_language {
                let body = world.document(spec, c, 0..spec.children_per_category, l);
                let id = format!("{}-{lang}-{:04}", world.names[c], i + 1);
                documents.push(Document::new(id, world.names[c].clone(), body));
            }
        }
    }
    Ok(SyntheticBilingual { corpus: Corpus::new(documents), ontology: world.ontology, lexicon: world.lexicon, stopwords })
}

/// English corpora where training documents mention the first half of each
/// category's child concepts and test documents only the second half, so
/// the shared parent concept is the sole link between them.
pub fn generate_sibling_holdout(spec: &SyntheticSpec) -> Result<SiblingHoldout, CorpusError> {
    spec.validate()?;
    if spec.children_per_category < 2 {
        return Err(CorpusError::InvalidSpec("sibling holdout needs at least 2 children per category".into()));
    }
    let stopwords = StopwordTable::bundled();
    let mut world = build_world(spec, &stopwords)?;
    let half = spec.children_per_category / 2;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for c in 0..spec.categories {
        for i in 0..spec.docs_per_language {
            let name = &world.names[c].clone();
            let body = world.document(spec, c, 0..half, 0);
            train.push(Document::new(format!("{name}-train-{:04}", i + 1), name.clone(), body));
            let body = world.document(spec, c, half..spec.children_per_category, 0);
            test.push(Document::new(format!("{name}-test-{:04}", i + 1), name.clone(), body));
        }
    }
    Ok(SiblingHoldout { train: Corpus::new(train), test: Corpus::new(test), ontology: world.ontology, stopwords })
}
