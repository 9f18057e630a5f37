use std::collections::BTreeMap;
use std::io::BufRead;

use super::{Corpus, CorpusError, Document};

/// Parse a `doc_id <TAB> category` file. Blank lines and `#` comments are
/// skipped.
pub fn load_label_sidecar(source: impl BufRead) -> Result<BTreeMap<String, String>, CorpusError> {
    let mut labels = BTreeMap::new();
    for (n, line) in source.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Io { path: "label file".into(), source: e })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, category) = line
            .split_once('\t')
            .ok_or_else(|| CorpusError::Parse { line: n + 1, message: "expected `doc_id<TAB>category`".into() })?;
        let (id, category) = (id.trim(), category.trim());
        if id.is_empty() || category.is_empty() {
            return Err(CorpusError::Parse { line: n + 1, message: "empty id or category".into() });
        }
        labels.insert(id.to_string(), category.to_string());
    }
    Ok(labels)
}

#[derive(Debug, Clone, Default)]
pub struct OhsumedLoad {
    pub corpus: Corpus,
    pub records: usize,
    /// Records with neither title nor abstract.
    pub skipped_empty: usize,
}

#[derive(Default)]
struct Record {
    id: String,
    line: usize,
    fields: BTreeMap<String, String>,
}

impl Record {
    fn into_document(self, labels: &BTreeMap<String, String>) -> Result<Option<Document>, CorpusError> {
        let mut fields = self.fields;
        let title = fields.remove("T").filter(|t| !t.trim().is_empty());
        let body = fields.remove("W").unwrap_or_default();
        if title.is_none() && body.trim().is_empty() {
            log::warn!("record {} (line {}) has no title or abstract; skipped", self.id, self.line);
            return Ok(None);
        }
        let category = labels.get(&self.id).ok_or_else(|| CorpusError::Unlabeled(self.id.clone()))?;
        Ok(Some(Document { id: self.id, title, body, category: category.clone(), fields }))
    }
}

const KNOWN_TAGS: [&str; 6] = ["T", "W", "M", "A", "S", "P"];

/// Read field-tagged records. A line `.I <id>` opens a record; `.T`, `.W`,
/// `.M`, `.A`, `.S` and `.P` open fields whose content runs until the next
/// tag line. Other tags are skipped. Title (`.T`) and abstract (`.W`) become
/// the document text; the remaining fields are kept aside.
pub fn load_ohsumed(source: impl BufRead, labels: &BTreeMap<String, String>) -> Result<OhsumedLoad, CorpusError> {
    let mut load = OhsumedLoad::default();
    let mut documents = Vec::new();
    let mut current: Option<Record> = None;
    let mut field: Option<String> = None;
    let mut finish = |record: Option<Record>, load: &mut OhsumedLoad| -> Result<(), CorpusError> {
        if let Some(r) = record {
            load.records += 1;
            match r.into_document(labels)? {
                Some(d) => documents.push(d),
                None => load.skipped_empty += 1,
            }
        }
        Ok(())
    };
    for (n, line) in source.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Io { path: "corpus".into(), source: e })?;
        let line = line.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix(".I") {
            if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
                return Err(CorpusError::Parse { line: n + 1, message: format!("unknown tag line {line:?}") });
            }
            let id = rest.trim();
            if id.is_empty() {
                return Err(CorpusError::Parse { line: n + 1, message: "record without id".into() });
            }
            finish(current.take(), &mut load)?;
            current = Some(Record { id: id.to_string(), line: n + 1, fields: BTreeMap::new() });
            field = None;
            continue;
        }
        if let Some(tag) = line.strip_prefix('.').filter(|t| !t.is_empty() && t.chars().all(|c| c.is_ascii_uppercase()))
        {
            let record = current
                .as_mut()
                .ok_or_else(|| CorpusError::Parse { line: n + 1, message: "field before first `.I` line".into() })?;
            field = KNOWN_TAGS.contains(&tag).then(|| tag.to_string());
            if let Some(f) = &field {
                record.fields.entry(f.clone()).or_default();
            }
            continue;
        }
        match (current.as_mut(), &field) {
            (Some(record), Some(f)) => {
                let value = record.fields.get_mut(f).expect("field opened");
                if !value.is_empty() {
                    value.push('\n');
                }
                value.push_str(line);
            }
            (None, _) if !line.trim().is_empty() => {
                return Err(CorpusError::Parse { line: n + 1, message: "text before first `.I` line".into() });
            }
            _ => {}
        }
    }
    finish(current.take(), &mut load)?;
    load.corpus = Corpus::new(documents);
    Ok(load)
}
