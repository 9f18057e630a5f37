//! Pivoting non-English documents into the English concept space.
//!
//! Two routes produce the same kind of output:
//!
//! * **Translation**: the source term sequence is translated phrase by phrase
//!   with a [`TermTranslator`], then mapped with the English label index.
//! * **Multilingual ontology**: the source terms are mapped with the source
//!   language labels of the shared ontology. Concept ids are language-neutral,
//!   so the result is already expressed in pivot concepts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conceptmap::{
    map_with_index, named_enum, ConceptIndex, ConceptMapError, DisambiguationStrategy, HybridRepresentation,
    MappingStrategy,
};
use crate::ontology::{Ontology, PIVOT_LANGUAGE};
use crate::preprocess::{Stemmer, StopwordTable, TermVector};
use crate::text;

#[derive(Debug, Error)]
pub enum MultilingualError {
    #[error("lexicon line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("translation approach needs a lexicon for {0:?}")]
    MissingLexicon(String),
    #[error("ontology has no labels for language {0:?}")]
    UnindexedLanguage(String),
    #[error("term vector is in {vector:?} but the translator reads {translator:?}")]
    LanguageMismatch { vector: String, translator: String },
    #[error(transparent)]
    ConceptMap(#[from] ConceptMapError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Source of phrase translations into the pivot language.
///
/// [`BilingualLexicon`] is the offline implementation; other providers can
/// be plugged in behind the same interface.
pub trait TermTranslator {
    fn source_language(&self) -> &str;
    /// Longest source phrase, in tokens, that may have a translation.
    fn max_phrase_tokens(&self) -> usize;
    /// Preferred translation of a normalized source phrase, as target tokens.
    fn translate(&self, phrase: &[String]) -> Option<Vec<String>>;
}

/// Phrase table from one source language into English.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BilingualLexicon {
    source: String,
    target: String,
    /// normalized source phrase -> normalized translations, preferred first
    entries: BTreeMap<String, Vec<String>>,
    max_phrase_tokens: usize,
}

impl BilingualLexicon {
    pub fn new(source: &str) -> Self {
        Self { source: source.to_owned(), target: PIVOT_LANGUAGE.to_owned(), ..Default::default() }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Add translations for a phrase. Returns false (and adds nothing) when
    /// the phrase or every translation normalizes to nothing. Translations of
    /// an existing phrase are appended after the current ones.
    pub fn insert<S: AsRef<str>>(&mut self, phrase: &str, translations: &[S]) -> bool {
        let key = text::normalize(phrase);
        let mut values: Vec<String> =
            translations.iter().map(|t| text::normalize(t.as_ref())).filter(|t| !t.is_empty()).collect();
        if key.is_empty() || values.is_empty() {
            return false;
        }
        self.max_phrase_tokens = self.max_phrase_tokens.max(key.split(' ').count());
        let slot = self.entries.entry(key).or_default();
        values.retain(|v| !slot.contains(v));
        slot.extend(values);
        true
    }

    pub fn translations(&self, phrase: &str) -> Option<&[String]> {
        self.entries.get(&text::normalize(phrase)).map(Vec::as_slice)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &[String])> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Read `source_phrase <TAB> translation1|translation2…` lines.
    pub fn load_tsv<R: BufRead>(source: R, source_language: &str) -> Result<Self, MultilingualError> {
        let mut lex = Self::new(source_language);
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((phrase, translations)) = line.split_once('\t') else {
                return Err(MultilingualError::Parse { line: i + 1, message: "missing tab separator".into() });
            };
            let translations: Vec<&str> = translations.split('|').collect();
            if !lex.insert(phrase, &translations) {
                return Err(MultilingualError::Parse {
                    line: i + 1,
                    message: format!("empty phrase or translation list for {phrase:?}"),
                });
            }
        }
        Ok(lex)
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "{k}\t{}", v.join("|"))?;
        }
        out.flush()
    }

    /// Re-key the lexicon on stopword-filtered (and stemmed) phrases so it can
    /// be applied to term sequences, which no longer contain stopwords.
    pub fn filtered(
        &self,
        source_stopwords: &HashSet<String>,
        target_stopwords: &HashSet<String>,
        stemmer: Option<&dyn Stemmer>,
    ) -> Self {
        let clean = |phrase: &str, stop: &HashSet<String>| -> String {
            phrase
                .split(' ')
                .filter(|t| !stop.contains(*t))
                .map(|t| stemmer.map_or_else(|| t.to_owned(), |s| s.stem(t)))
                .filter(|t| !t.is_empty())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = Self::new(&self.source);
        out.target = self.target.clone();
        for (phrase, translations) in &self.entries {
            let key = clean(phrase, source_stopwords);
            let values: Vec<String> =
                translations.iter().map(|t| clean(t, target_stopwords)).filter(|t| !t.is_empty()).collect();
            if key.is_empty() || values.is_empty() || out.entries.contains_key(&key) {
                continue;
            }
            out.max_phrase_tokens = out.max_phrase_tokens.max(key.split(' ').count());
            out.entries.insert(key, values);
        }
        out
    }
}

impl TermTranslator for BilingualLexicon {
    fn source_language(&self) -> &str {
        &self.source
    }

    fn max_phrase_tokens(&self) -> usize {
        self.max_phrase_tokens
    }

    fn translate(&self, phrase: &[String]) -> Option<Vec<String>> {
        self.entries.get(&phrase.join(" ")).map(|v| v[0].split(' ').map(str::to_owned).collect())
    }
}

/// Result of translating a term vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub vector: TermVector,
    /// Source token occurrences left untranslated.
    pub untranslated: usize,
}

/// Translate a term sequence by greedy longest phrase match. Each phrase is
/// replaced by the tokens of its preferred translation, kept contiguous so
/// multiword translations can still match multiword English labels.
/// Untranslated tokens pass through unchanged.
pub fn translate_term_vector(
    tv: &TermVector,
    translator: &dyn TermTranslator,
) -> Result<Translation, MultilingualError> {
    if tv.language != translator.source_language() {
        return Err(MultilingualError::LanguageMismatch {
            vector: tv.language.clone(),
            translator: translator.source_language().to_owned(),
        });
    }
    let seq = &tv.sequence;
    let mut out = Vec::with_capacity(seq.len());
    let mut untranslated = 0;
    let mut i = 0;
    while i < seq.len() {
        let longest = translator.max_phrase_tokens().min(seq.len() - i);
        let hit = (1..=longest).rev().find_map(|len| translator.translate(&seq[i..i + len]).map(|t| (len, t)));
        match hit {
            Some((len, tokens)) => {
                out.extend(tokens);
                i += len;
            }
            None => {
                out.push(seq[i].clone());
                untranslated += 1;
                i += 1;
            }
        }
    }
    Ok(Translation { vector: TermVector::from_sequence(PIVOT_LANGUAGE, out), untranslated })
}

/// How non-English documents reach the English concept space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PivotApproach {
    Translation,
    #[default]
    MultilingualOntology,
}

named_enum!(PivotApproach, "pivot approach", {
    Translation => "translate",
    MultilingualOntology => "multi-onto",
});

/// Prepared indices and lexicons for pivoting many documents.
#[derive(Debug, Clone)]
pub struct Pivoter {
    approach: PivotApproach,
    english: ConceptIndex,
    source_indices: HashMap<String, ConceptIndex>,
    lexicons: HashMap<String, BilingualLexicon>,
}

impl Pivoter {
    /// Indices built from raw ontology labels; lexicons used as given.
    pub fn new(
        onto: &Ontology,
        approach: PivotApproach,
        lexicons: impl IntoIterator<Item = BilingualLexicon>,
    ) -> Result<Self, MultilingualError> {
        let english = index_or_empty(onto, PIVOT_LANGUAGE, |l| ConceptIndex::new(onto, l))?;
        let mut source_indices = HashMap::new();
        for lang in onto.languages().filter(|l| *l != PIVOT_LANGUAGE) {
            source_indices.insert(lang.to_owned(), ConceptIndex::new(onto, lang)?);
        }
        let lexicons = lexicons.into_iter().map(|l| (l.source().to_owned(), l)).collect();
        Ok(Self { approach, english, source_indices, lexicons })
    }

    /// Indices and lexicons filtered with the stopword table, matching term
    /// vectors produced by [`crate::preprocess::to_term_vector`].
    pub fn with_stopwords(
        onto: &Ontology,
        approach: PivotApproach,
        lexicons: impl IntoIterator<Item = BilingualLexicon>,
        stopwords: &StopwordTable,
        stemmer: Option<&dyn Stemmer>,
    ) -> Result<Self, MultilingualError> {
        let empty = HashSet::new();
        let stop = |lang: &str| stopwords.words(lang).unwrap_or(&empty);
        let english =
            index_or_empty(onto, PIVOT_LANGUAGE, |l| ConceptIndex::filtered(onto, l, stop(l), stemmer))?;
        let mut source_indices = HashMap::new();
        for lang in onto.languages().filter(|l| *l != PIVOT_LANGUAGE) {
            source_indices.insert(lang.to_owned(), ConceptIndex::filtered(onto, lang, stop(lang), stemmer)?);
        }
        let lexicons = lexicons
            .into_iter()
            .map(|l| {
                let f = l.filtered(stop(l.source()), stop(l.target()), stemmer);
                (f.source().to_owned(), f)
            })
            .collect();
        Ok(Self { approach, english, source_indices, lexicons })
    }

    pub fn approach(&self) -> PivotApproach {
        self.approach
    }

    /// Check that documents in `language` can be pivoted.
    pub fn supports(&self, language: &str) -> Result<(), MultilingualError> {
        if language == PIVOT_LANGUAGE {
            return Ok(());
        }
        match self.approach {
            PivotApproach::Translation if !self.lexicons.contains_key(language) => {
                Err(MultilingualError::MissingLexicon(language.to_owned()))
            }
            PivotApproach::MultilingualOntology if !self.source_indices.contains_key(language) => {
                Err(MultilingualError::UnindexedLanguage(language.to_owned()))
            }
            _ => Ok(()),
        }
    }

    /// Map a document of any supported language into English concepts.
    pub fn pivot(
        &self,
        tv: &TermVector,
        mapping: MappingStrategy,
        disambiguation: DisambiguationStrategy,
    ) -> Result<PivotOutcome, MultilingualError> {
        self.supports(&tv.language)?;
        if tv.language == PIVOT_LANGUAGE {
            let rep = map_with_index(tv, &self.english, mapping, disambiguation)?;
            return Ok(PivotOutcome { representation: rep, untranslated: 0 });
        }
        match self.approach {
            PivotApproach::Translation => {
                let translation = translate_term_vector(tv, &self.lexicons[&tv.language])?;
                let rep = map_with_index(&translation.vector, &self.english, mapping, disambiguation)?;
                Ok(PivotOutcome { representation: rep, untranslated: translation.untranslated })
            }
            PivotApproach::MultilingualOntology => {
                let mut rep = map_with_index(tv, &self.source_indices[&tv.language], mapping, disambiguation)?;
                rep.language = PIVOT_LANGUAGE.to_owned();
                Ok(PivotOutcome { representation: rep, untranslated: 0 })
            }
        }
    }
}

fn index_or_empty(
    onto: &Ontology,
    language: &str,
    build: impl FnOnce(&str) -> Result<ConceptIndex, ConceptMapError>,
) -> Result<ConceptIndex, MultilingualError> {
    if onto.has_language(language) {
        Ok(build(language)?)
    } else {
        // empty ontology: every term stays unmapped
        Ok(ConceptIndex::empty(language))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PivotOutcome {
    pub representation: HybridRepresentation,
    pub untranslated: usize,
}

/// One-shot pivot of a single document; see [`Pivoter`] for batch use.
pub fn pivot_to_english_concepts(
    tv: &TermVector,
    onto: &Ontology,
    lexicon: Option<&BilingualLexicon>,
    approach: PivotApproach,
    mapping: MappingStrategy,
    disambiguation: DisambiguationStrategy,
) -> Result<HybridRepresentation, MultilingualError> {
    let pivoter = Pivoter::new(onto, approach, lexicon.cloned())?;
    Ok(pivoter.pivot(tv, mapping, disambiguation)?.representation)
}
