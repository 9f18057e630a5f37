//! Tab-separated ontology format.
//!
//! ```text
//! # id <TAB> tree numbers <TAB> preferred labels <TAB> entry terms
//! D009369  C04  en=Neoplasms;fr=Tumeurs  en=Tumors|Neoplasia;fr=Néoplasmes
//! ```
//!
//! Tree numbers are comma-separated, languages are `;`-separated and
//! entry terms `|`-separated. Empty lines and lines starting with `#` are
//! ignored.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{ConceptRecord, Ontology, OntologyBuilder, OntologyError, Result};

const COLUMNS: usize = 4;

fn parse_lang_pairs(field: &str, line: usize) -> Result<Vec<(String, String)>> {
    field
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (lang, value) = pair.split_once('=').ok_or_else(|| OntologyError::Parse {
                line,
                message: format!("expected lang=value, got {pair:?}"),
            })?;
            Ok((lang.trim().to_ascii_lowercase(), value.trim().to_owned()))
        })
        .collect()
}

/// Read the tabular format with the default depth bound.
pub fn load_ontology_tabular<R: BufRead>(source: R) -> Result<Ontology> {
    load_ontology_tabular_with_depth(source, super::DEFAULT_MAX_DEPTH)
}

pub fn load_ontology_tabular_with_depth<R: BufRead>(source: R, max_depth: usize) -> Result<Ontology> {
    let mut builder = OntologyBuilder::new(max_depth);
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return Err(OntologyError::Parse {
                line: line_no,
                message: format!("expected {COLUMNS} tab-separated columns, found {}", cols.len()),
            });
        }
        let tree_numbers = cols[1]
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_owned)
            .collect();
        let labels: BTreeMap<String, String> = parse_lang_pairs(cols[2], line_no)?.into_iter().collect();
        let mut entry_terms: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (lang, terms) in parse_lang_pairs(cols[3], line_no)? {
            entry_terms
                .entry(lang)
                .or_default()
                .extend(terms.split('|').map(str::trim).filter(|t| !t.is_empty()).map(str::to_owned));
        }
        builder
            .add(ConceptRecord { id: cols[0].trim().to_owned(), labels, entry_terms, tree_numbers })
            .map_err(|e| match e {
                OntologyError::Integrity(m) => OntologyError::Integrity(format!("line {line_no}: {m}")),
                other => other,
            })?;
    }
    builder.build()
}

/// Characters with a structural meaning in the format are replaced by spaces.
fn clean(s: &str) -> String {
    s.chars().map(|c| if matches!(c, '\t' | ';' | '|' | '\n' | '\r') { ' ' } else { c }).collect()
}

pub fn write_ontology_tabular<W: Write>(ontology: &Ontology, mut out: W) -> Result<()> {
    writeln!(out, "# id\ttree_numbers\tlabels\tentry_terms")?;
    for rec in ontology.records() {
        let labels: Vec<String> = rec.labels.iter().map(|(l, s)| format!("{l}={}", clean(s))).collect();
        let entries: Vec<String> = rec
            .entry_terms
            .iter()
            .map(|(l, ts)| format!("{l}={}", ts.iter().map(|t| clean(t)).collect::<Vec<_>>().join("|")))
            .collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            clean(&rec.id),
            rec.tree_numbers.join(","),
            labels.join(";"),
            entries.join(";")
        )?;
    }
    out.flush()?;
    Ok(())
}
