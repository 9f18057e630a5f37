//! Labeled document collections: loaders and synthetic generators.

mod ohsumed;
mod synth;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use ohsumed::{load_label_sidecar, load_ohsumed, OhsumedLoad};
pub use synth::{
    generate_sibling_holdout, generate_synthetic_bilingual, SiblingHoldout, SyntheticBilingual, SyntheticSpec,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("record {0} has no category label")]
    Unlabeled(String),
    #[error("invalid generator settings: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Ontology(#[from] crate::ontology::OntologyError),
}

pub(crate) fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub title: Option<String>,
    pub body: String,
    pub category: String,
    /// Other tagged fields kept verbatim (e.g. authors, source). Never used
    /// as classification features.
    pub fields: BTreeMap<String, String>,
}

impl Document {
    pub fn new(id: impl Into<String>, category: impl Into<String>, body: impl Into<String>) -> Self {
        Self { id: id.into(), title: None, body: body.into(), category: category.into(), fields: BTreeMap::new() }
    }

    /// Title and body: the only text that feeds the representation.
    pub fn text(&self) -> String {
        match &self.title {
            Some(t) if !self.body.is_empty() => format!("{t}\n{}", self.body),
            Some(t) => t.clone(),
            None => self.body.clone(),
        }
    }
}

/// Documents sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(mut documents: Vec<Document>) -> Self {
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        Self { documents }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Document count per category.
    pub fn counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for d in &self.documents {
            *counts.entry(d.category.as_str()).or_insert(0) += 1;
        }
        counts
    }

    pub fn categories(&self) -> Vec<String> {
        self.counts().into_keys().map(str::to_string).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.category.clone()).collect()
    }

    /// Documents at the given positions.
    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus::new(indices.iter().map(|&i| self.documents[i].clone()).collect())
    }

    /// Write one `<category>/<name>.txt` file per document, where the name is
    /// the id with path separators replaced.
    pub fn write_directory(&self, root: &Path) -> Result<(), CorpusError> {
        for d in &self.documents {
            let dir = root.join(&d.category);
            fs::create_dir_all(&dir).map_err(io_error(&dir))?;
            let name = d.id.rsplit('/').next().unwrap_or(&d.id).replace('\\', "_");
            let path = dir.join(format!("{name}.txt"));
            fs::write(&path, d.text()).map_err(io_error(&path))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct DirectoryLoad {
    pub corpus: Corpus,
    /// Directories below a category directory, which are not read.
    pub ignored_dirs: Vec<PathBuf>,
}

/// One subdirectory per category, one document per regular file. Document
/// ids are `<category>/<file name>`. Loose files at the root are ignored.
pub fn load_directory_corpus(root: &Path) -> Result<DirectoryLoad, CorpusError> {
    let mut load = DirectoryLoad::default();
    let mut documents = Vec::new();
    let mut categories: Vec<PathBuf> = Vec::new();
    for entry in fs::read_dir(root).map_err(io_error(root))? {
        let path = entry.map_err(io_error(root))?.path();
        if path.is_dir() {
            categories.push(path);
        }
    }
    categories.sort();
    for dir in categories {
        let category = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let mut files = Vec::new();
        for entry in fs::read_dir(&dir).map_err(io_error(&dir))? {
            let path = entry.map_err(io_error(&dir))?.path();
            if path.is_dir() {
                log::warn!("ignoring nested directory {}", path.display());
                load.ignored_dirs.push(path);
            } else {
                files.push(path);
            }
        }
        files.sort();
        for path in files {
            let body = fs::read_to_string(&path).map_err(io_error(&path))?;
            let name = path.file_name().unwrap_or_default().to_string_lossy();
            documents.push(Document::new(format!("{category}/{name}"), category.clone(), body));
        }
    }
    load.ignored_dirs.sort();
    load.corpus = Corpus::new(documents);
    Ok(load)
}
