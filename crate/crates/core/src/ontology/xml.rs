//! Streaming reader and writer for the supported MeSH descriptor XML subset.
//!
//! The reader keeps a single scratch record that is reset at every
//! `DescriptorRecord`; a [`ConceptRecord`] is only materialized for
//! descriptors that pass the tree-number filter, so memory grows with the
//! retained ontology and not with the input size.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use super::{ConceptRecord, Ontology, OntologyBuilder, OntologyError, Result, DEFAULT_MAX_DEPTH, PIVOT_LANGUAGE};

/// Options for [`ingest_ontology_xml`].
#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Keep only descriptors with a tree number starting with this prefix.
    /// Non-matching tree numbers of retained descriptors are discarded.
    pub filter_prefix: Option<String>,
    pub max_depth: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { filter_prefix: None, max_depth: DEFAULT_MAX_DEPTH }
    }
}

/// Counters reported by a streaming ingest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub records_seen: usize,
    pub records_retained: usize,
    /// Descriptor records materialized in memory.
    pub records_allocated: usize,
    pub bytes_read: u64,
}

#[derive(Debug)]
pub struct Ingested {
    pub ontology: Ontology,
    pub stats: IngestStats,
}

/// Load an ontology from MeSH descriptor XML, optionally keeping only one
/// tree-number branch.
pub fn load_ontology_xml<R: BufRead>(source: R, filter_prefix: Option<&str>) -> Result<Ontology> {
    let options = IngestOptions { filter_prefix: filter_prefix.map(str::to_owned), ..Default::default() };
    ingest_ontology_xml(source, &options).map(|i| i.ontology)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Record,
    Ui,
    Name,
    String,
    TreeList,
    Tree,
    ConceptList,
    Concept,
    TermList,
    Term,
    Other,
}

impl Tag {
    fn from_name(name: &str) -> Tag {
        match name {
            "DescriptorRecord" => Tag::Record,
            "DescriptorUI" => Tag::Ui,
            "DescriptorName" => Tag::Name,
            "String" => Tag::String,
            "TreeNumberList" => Tag::TreeList,
            "TreeNumber" => Tag::Tree,
            "ConceptList" => Tag::ConceptList,
            "Concept" => Tag::Concept,
            "TermList" => Tag::TermList,
            "Term" => Tag::Term,
            _ => Tag::Other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Ui,
    Label,
    Tree,
    EntryTerm,
}

const UI_PATH: &[Tag] = &[Tag::Ui];
const LABEL_PATH: &[Tag] = &[Tag::Name, Tag::String];
const TREE_PATH: &[Tag] = &[Tag::TreeList, Tag::Tree];
const TERM_PATH: &[Tag] = &[Tag::ConceptList, Tag::Concept, Tag::TermList, Tag::Term, Tag::String];

/// Per-record scratch space, reused across descriptors.
#[derive(Default)]
struct Scratch {
    ui: String,
    labels: Vec<(String, String)>,
    trees: Vec<String>,
    terms: Vec<(String, String)>,
}

impl Scratch {
    fn clear(&mut self) {
        self.ui.clear();
        self.labels.clear();
        self.trees.clear();
        self.terms.clear();
    }
}

fn lang_attribute(e: &BytesStart<'_>) -> Option<String> {
    e.attributes().flatten().find_map(|a| {
        let key: &str = a.key.as_ref();
        if matches!(key, "lang" | "xml:lang" | "Lang") {
            a.normalized_value(XmlVersion::Implicit1_0).ok().map(|v| v.trim().to_ascii_lowercase())
        } else {
            None
        }
    })
}

/// Streaming ingest with counters.
pub fn ingest_ontology_xml<R: BufRead>(source: R, options: &IngestOptions) -> Result<Ingested> {
    let mut reader = Reader::from_reader(source);
    let mut buf = Vec::with_capacity(4096);
    let mut stack: Vec<Tag> = Vec::with_capacity(16);
    let mut record_at: Option<usize> = None;
    // language inherited from the closest Term/String carrying an attribute
    let mut lang_stack: Vec<Option<String>> = Vec::with_capacity(16);
    let mut capture: Option<Field> = None;
    let mut text = String::new();
    let mut scratch = Scratch::default();
    let mut builder = OntologyBuilder::new(options.max_depth);
    let mut stats = IngestStats::default();

    let xml_error = |reader: &Reader<R>, message: String| OntologyError::Xml {
        offset: reader.error_position(),
        message,
    };

    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| xml_error(&reader, e.to_string()))?;
        match event {
            Event::Start(ref e) => {
                let tag = Tag::from_name(e.local_name().as_ref());
                stack.push(tag);
                lang_stack.push(lang_attribute(e));
                if tag == Tag::Record && record_at.is_none() {
                    record_at = Some(stack.len() - 1);
                    scratch.clear();
                    stats.records_seen += 1;
                } else if let Some(at) = record_at {
                    let rel = &stack[at + 1..];
                    capture = match rel {
                        p if p == UI_PATH => Some(Field::Ui),
                        p if p == LABEL_PATH => Some(Field::Label),
                        p if p == TREE_PATH => Some(Field::Tree),
                        p if p == TERM_PATH => Some(Field::EntryTerm),
                        _ => None,
                    };
                    text.clear();
                }
            }
            Event::Empty(_) => {}
            Event::Text(t) => {
                if capture.is_some() {
                    text.push_str(&t.xml10_content());
                }
            }
            Event::CData(t) => {
                if capture.is_some() {
                    text.push_str(&t);
                }
            }
            Event::GeneralRef(r) => {
                if capture.is_some() {
                    let resolved = r.resolve_char_ref().map_err(|e| xml_error(&reader, e.to_string()))?;
                    match resolved {
                        Some(ch) => text.push(ch),
                        None => {
                            let name: &str = &r;
                            match quick_xml::escape::resolve_xml_entity(name) {
                                Some(s) => text.push_str(s),
                                None => {
                                    return Err(xml_error(&reader, format!("unknown entity &{name};")));
                                }
                            }
                        }
                    }
                }
            }
            Event::End(_) => {
                let Some(tag) = stack.pop() else {
                    return Err(xml_error(&reader, "unbalanced end tag".into()));
                };
                if let Some(field) = capture.take() {
                    let lang = lang_stack
                        .iter()
                        .rev()
                        .find_map(|l| l.clone())
                        .unwrap_or_else(|| PIVOT_LANGUAGE.to_owned());
                    let value = text.trim().to_owned();
                    match field {
                        Field::Ui => scratch.ui = value,
                        Field::Label => scratch.labels.push((lang, value)),
                        Field::Tree => scratch.trees.push(value),
                        Field::EntryTerm => scratch.terms.push((lang, value)),
                    }
                }
                lang_stack.pop();
                if tag == Tag::Record && record_at == Some(stack.len()) {
                    record_at = None;
                    finish_record(&mut scratch, options, &mut builder, &mut stats)?;
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !stack.is_empty() {
        return Err(OntologyError::Xml {
            offset: reader.buffer_position(),
            message: "unexpected end of document".into(),
        });
    }
    stats.bytes_read = reader.buffer_position();
    stats.records_allocated = builder.allocated_records();
    let ontology = builder.build()?;
    Ok(Ingested { ontology, stats })
}

fn finish_record(
    scratch: &mut Scratch,
    options: &IngestOptions,
    builder: &mut OntologyBuilder,
    stats: &mut IngestStats,
) -> Result<()> {
    if scratch.ui.is_empty() {
        return Err(OntologyError::Integrity(format!(
            "descriptor record #{} has no DescriptorUI",
            stats.records_seen
        )));
    }
    if !scratch.labels.iter().any(|(l, _)| l == PIVOT_LANGUAGE) {
        return Err(OntologyError::Integrity(format!(
            "descriptor {} has no English name",
            scratch.ui
        )));
    }
    if let Some(prefix) = &options.filter_prefix {
        scratch.trees.retain(|t| t.starts_with(prefix.as_str()));
        if scratch.trees.is_empty() {
            return Ok(());
        }
    }
    stats.records_retained += 1;
    let mut labels = BTreeMap::new();
    for (lang, label) in scratch.labels.drain(..) {
        labels.entry(lang).or_insert(label);
    }
    let mut entry_terms: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (lang, term) in scratch.terms.drain(..) {
        entry_terms.entry(lang).or_default().push(term);
    }
    builder.add(ConceptRecord {
        id: std::mem::take(&mut scratch.ui),
        labels,
        entry_terms,
        tree_numbers: std::mem::take(&mut scratch.trees),
    })
}

fn escape(s: &str) -> std::borrow::Cow<'_, str> {
    quick_xml::escape::escape(s)
}

fn write_string<W: Write>(out: &mut W, indent: &str, lang: &str, value: &str) -> std::io::Result<()> {
    if lang == PIVOT_LANGUAGE {
        writeln!(out, "{indent}<String>{}</String>", escape(value))
    } else {
        writeln!(out, "{indent}<String lang=\"{}\">{}</String>", escape(lang), escape(value))
    }
}

/// Serialize an ontology as descriptor XML readable by [`load_ontology_xml`].
pub fn write_ontology_xml<W: Write>(ontology: &Ontology, mut out: W) -> Result<()> {
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>")?;
    writeln!(out, "<DescriptorRecordSet>")?;
    for rec in ontology.records() {
        writeln!(out, "  <DescriptorRecord>")?;
        writeln!(out, "    <DescriptorUI>{}</DescriptorUI>", escape(&rec.id))?;
        writeln!(out, "    <DescriptorName>")?;
        for (lang, label) in &rec.labels {
            write_string(&mut out, "      ", lang, label)?;
        }
        writeln!(out, "    </DescriptorName>")?;
        if !rec.tree_numbers.is_empty() {
            writeln!(out, "    <TreeNumberList>")?;
            for tn in &rec.tree_numbers {
                writeln!(out, "      <TreeNumber>{}</TreeNumber>", escape(tn))?;
            }
            writeln!(out, "    </TreeNumberList>")?;
        }
        if !rec.entry_terms.is_empty() {
            writeln!(out, "    <ConceptList>\n      <Concept>\n        <TermList>")?;
            for (lang, terms) in &rec.entry_terms {
                for t in terms {
                    writeln!(out, "          <Term>")?;
                    write_string(&mut out, "            ", lang, t)?;
                    writeln!(out, "          </Term>")?;
                }
            }
            writeln!(out, "        </TermList>\n      </Concept>\n    </ConceptList>")?;
        }
        writeln!(out, "  </DescriptorRecord>")?;
    }
    writeln!(out, "</DescriptorRecordSet>")?;
    out.flush()?;
    Ok(())
}
