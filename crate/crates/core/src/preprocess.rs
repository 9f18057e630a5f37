//! Tokenization, stopword-based language detection and term vectors.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

use crate::sparse::SparseVector;
use crate::text;

pub const DEFAULT_LANGUAGE: &str = "en";

const BUNDLED_EN: &str = include_str!("../data/stopwords/en.txt");
const BUNDLED_FR: &str = include_str!("../data/stopwords/fr.txt");

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("no stopword list for language {requested:?} (available: {available})")]
    UnknownLanguage { requested: String, available: String },
    #[error("stopword directory {0} contains no <lang>.txt files")]
    EmptyStopwordDir(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Normalized tokens of one document, in text order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    tokens: Vec<String>,
}

impl TokenStream {
    /// Wrap tokens that are already normalized. Empty strings are dropped.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { tokens: tokens.into_iter().map(Into::into).filter(|t: &String| !t.is_empty()).collect() }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn tokenize(text: &str) -> TokenStream {
    TokenStream { tokens: text::tokenize(text) }
}

/// Per-language stopword sets plus the fallback language for detection.
#[derive(Debug, Clone)]
pub struct StopwordTable {
    sets: BTreeMap<String, HashSet<String>>,
    default_language: String,
}

/// Parse a stopword list: one entry per line, `#` starts a comment line.
pub fn parse_stopword_list<R: BufRead>(source: R) -> std::io::Result<HashSet<String>> {
    let mut set = HashSet::new();
    for line in source.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        set.extend(text::tokenize(line));
    }
    Ok(set)
}

impl StopwordTable {
    pub fn new(default_language: &str) -> Self {
        Self { sets: BTreeMap::new(), default_language: default_language.to_owned() }
    }

    /// The English and French lists shipped with the crate.
    pub fn bundled() -> Self {
        let mut table = Self::new(DEFAULT_LANGUAGE);
        for (lang, src) in [("en", BUNDLED_EN), ("fr", BUNDLED_FR)] {
            let set = parse_stopword_list(src.as_bytes()).expect("bundled list is valid UTF-8");
            table.insert(lang, set);
        }
        table
    }

    /// Load every `<lang>.txt` file of a directory.
    pub fn from_dir(dir: &Path) -> Result<Self, PreprocessError> {
        let io_err = |path: &Path, source| PreprocessError::Io { path: path.display().to_string(), source };
        let mut entries: Vec<_> = fs::read_dir(dir)
            .map_err(|e| io_err(dir, e))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        entries.sort();
        let mut table = Self::new(DEFAULT_LANGUAGE);
        for path in entries {
            let Some(lang) = path.file_stem().and_then(|s| s.to_str()) else { continue };
            let file = fs::File::open(&path).map_err(|e| io_err(&path, e))?;
            let set = parse_stopword_list(std::io::BufReader::new(file)).map_err(|e| io_err(&path, e))?;
            table.insert(&lang.to_ascii_lowercase(), set);
        }
        if table.sets.is_empty() {
            return Err(PreprocessError::EmptyStopwordDir(dir.display().to_string()));
        }
        Ok(table)
    }

    pub fn insert(&mut self, language: &str, words: HashSet<String>) {
        let normalized = words.iter().flat_map(|w| text::tokenize(w)).collect();
        self.sets.insert(language.to_owned(), normalized);
    }

    pub fn with_default_language(mut self, language: &str) -> Self {
        self.default_language = language.to_owned();
        self
    }

    pub fn default_language(&self) -> &str {
        &self.default_language
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> + '_ {
        self.sets.keys().map(String::as_str)
    }

    pub fn has_language(&self, language: &str) -> bool {
        self.sets.contains_key(language)
    }

    pub fn words(&self, language: &str) -> Option<&HashSet<String>> {
        self.sets.get(language)
    }

    pub fn is_stopword(&self, language: &str, token: &str) -> bool {
        self.sets.get(language).is_some_and(|s| s.contains(token))
    }

    fn require(&self, language: &str) -> Result<&HashSet<String>, PreprocessError> {
        self.sets.get(language).ok_or_else(|| PreprocessError::UnknownLanguage {
            requested: language.to_owned(),
            available: self.languages().collect::<Vec<_>>().join(", "),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageGuess {
    pub language: String,
    /// Share of tokens that are stopwords of each language.
    pub scores: BTreeMap<String, f64>,
}

/// Pick the language whose stopwords make up the largest share of the
/// tokens. A tie for the maximum, or no stopword at all, yields the table's
/// default language.
pub fn detect_language(tokens: &TokenStream, table: &StopwordTable) -> LanguageGuess {
    let denom = tokens.len().max(1) as f64;
    let scores: BTreeMap<String, f64> = table
        .sets
        .iter()
        .map(|(lang, set)| {
            let hits = tokens.tokens.iter().filter(|t| set.contains(*t)).count();
            (lang.clone(), hits as f64 / denom)
        })
        .collect();
    let best = scores.values().copied().fold(0.0_f64, f64::max);
    let mut leaders = scores.iter().filter(|(_, s)| **s == best);
    let language = match (best > 0.0, leaders.next(), leaders.next()) {
        (true, Some((lang, _)), None) => lang.clone(),
        _ => table.default_language.clone(),
    };
    LanguageGuess { language, scores }
}

/// Pluggable stemming; off unless a stemmer is passed explicitly.
pub trait Stemmer: Send + Sync {
    fn stem(&self, token: &str) -> String;
}

/// A document's non-stopword terms: their text-order sequence and counts.
///
/// The sequence is kept for multiword concept matching; `counts` is always
/// the bag of `sequence`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector {
    pub language: String,
    pub sequence: Vec<String>,
    pub counts: SparseVector,
}

impl TermVector {
    pub fn from_sequence(language: &str, sequence: Vec<String>) -> Self {
        let mut counts = SparseVector::new();
        for t in &sequence {
            counts.add(t, 1.0);
        }
        Self { language: language.to_owned(), sequence, counts }
    }

    /// Build from a bag of counts. Keys may be phrases; their tokens are
    /// laid out contiguously, keys in sorted order, each repeated `count` times.
    pub fn from_counts<'a, I>(language: &str, counts: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        let mut bag: BTreeMap<String, usize> = BTreeMap::new();
        for (k, n) in counts {
            *bag.entry(k.to_owned()).or_default() += n;
        }
        let mut sequence = Vec::new();
        for (k, n) in bag {
            let toks: Vec<&str> = k.split(' ').filter(|t| !t.is_empty()).collect();
            for _ in 0..n {
                sequence.extend(toks.iter().map(|t| t.to_string()));
            }
        }
        Self::from_sequence(language, sequence)
    }

    pub fn total(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

/// Drop stopwords of `language`, optionally stem, and count.
pub fn to_term_vector(
    tokens: &TokenStream,
    language: &str,
    table: &StopwordTable,
    stemmer: Option<&dyn Stemmer>,
) -> Result<TermVector, PreprocessError> {
    let stop = table.require(language)?;
    let sequence = tokens
        .tokens
        .iter()
        .filter(|t| !stop.contains(*t))
        .map(|t| match stemmer {
            Some(s) => s.stem(t),
            None => t.clone(),
        })
        .filter(|t| !t.is_empty())
        .collect();
    Ok(TermVector::from_sequence(language, sequence))
}
