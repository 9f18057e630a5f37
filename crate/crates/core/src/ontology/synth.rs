use std::io::Write;

/// Counts emitted by [`generate_descriptor_xml`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticDescriptorCounts {
    pub total: usize,
    /// Descriptors placed under the `C` branch.
    pub in_c_branch: usize,
}

fn tree_number(root: &str, index: usize) -> String {
    // ten children per node, breadth-first numbering
    let mut segments = Vec::new();
    let mut j = index;
    while j > 0 {
        segments.push((j - 1) % 10);
        j = (j - 1) / 10;
    }
    let mut tn = root.to_owned();
    for s in segments.iter().rev() {
        tn.push_str(&format!(".{s:03}"));
    }
    tn
}

/// Write `total` descriptor records in MeSH XML form. Every `c_every`-th
/// descriptor (starting with the first) lives in the `C01` branch, the others
/// under `A01`; each branch is a ten-ary tree.
pub fn generate_descriptor_xml<W: Write>(
    mut out: W,
    total: usize,
    c_every: usize,
) -> std::io::Result<SyntheticDescriptorCounts> {
    assert!(c_every >= 1);
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>")?;
    writeln!(out, "<DescriptorRecordSet LanguageCode=\"eng\">")?;
    let (mut c_count, mut a_count) = (0usize, 0usize);
    for i in 0..total {
        let tn = if i % c_every == 0 {
            c_count += 1;
            tree_number("C01", c_count - 1)
        } else {
            a_count += 1;
            tree_number("A01", a_count - 1)
        };
        write!(
            out,
            "  <DescriptorRecord DescriptorClass=\"1\">\n    <DescriptorUI>D{i:07}</DescriptorUI>\n    \
             <DescriptorName><String>Synthetic descriptor {i}</String>\
             <String lang=\"fr\">Descripteur synth&#233;tique {i}</String></DescriptorName>\n    \
             <DateCreated><Year>2010</Year><Month>01</Month><Day>01</Day></DateCreated>\n    \
             <TreeNumberList><TreeNumber>{tn}</TreeNumber></TreeNumberList>\n    \
             <ConceptList><Concept PreferredConceptYN=\"Y\"><ConceptUI>M{i:07}</ConceptUI>\
             <TermList><Term><String>Synthetic descriptor {i}</String></Term>\
             <Term><String>Entry term {i}</String></Term></TermList></Concept></ConceptList>\n  \
             </DescriptorRecord>\n"
        )?;
    }
    writeln!(out, "</DescriptorRecordSet>")?;
    out.flush()?;
    Ok(SyntheticDescriptorCounts { total, in_c_branch: c_count })
}
