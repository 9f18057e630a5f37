//! Property checks shared by the invariant tests and the acceptance harness.
//!
//! Every check runs a deterministic proptest and reports the first failure,
//! shrunk, as an error string.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use meshclass::conceptmap::{
    enrich_with_hyperonyms, map_terms, map_with_index, ConceptIndex, DisambiguationStrategy, HybridRepresentation,
    HyperonymMode, MappingStrategy,
};
use meshclass::corpus::{
    generate_synthetic_bilingual, load_directory_corpus, load_ohsumed, Corpus, Document, SyntheticSpec,
};
use meshclass::evaluate::{score, stratified_folds, stratified_split};
use meshclass::model::{
    build_profiles, load_model, AdaBoostNb, Classifier, ClassifierKind, GainRatioTree, Hyperparameters, KnnIndex,
    ModelError, NaiveBayes, Node, TrainedModel, TreeParams, WeightedVector,
};
use meshclass::multilingual::PivotApproach;
use meshclass::ontology::{
    generate_descriptor_xml, ingest_ontology_xml, load_ontology_xml, tree_depth, write_ontology_xml, ConceptRecord,
    IngestOptions, Ontology, OntologyBuilder,
};
use meshclass::pipeline::{Pipeline, RepresentationSettings};
use meshclass::preprocess::{detect_language, to_term_vector, tokenize, StopwordTable, TermVector, TokenStream};
use meshclass::sparse::SparseVector;
use meshclass::text::normalize;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

/// Extra descriptor records the streaming ingest may hold beyond the
/// retained ones.
pub const ALLOCATION_SLACK: usize = 1;

pub type Check = fn() -> Result<(), String>;

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn fail(message: impl Into<String>) -> TestCaseError {
    TestCaseError::fail(message.into())
}

// ---------------------------------------------------------------- fixtures

const VOCAB: [&str; 10] = ["alpha", "beta", "gamma", "delta", "fievre", "reseau", "tumeur", "virus", "cellule", "grippe"];
const ACCENTED: [&str; 4] = ["Fièvre", "RÉSEAU", "tumeur", "Cœur"];

#[derive(Debug, Clone)]
pub struct NodeSpec {
    parent: Option<usize>,
    second_parent: Option<usize>,
    c_branch: bool,
    label: Vec<usize>,
    french: Option<Vec<usize>>,
    entries: Vec<Vec<usize>>,
}

fn words(strategy_len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..VOCAB.len(), strategy_len)
}

fn node_spec() -> impl Strategy<Value = NodeSpec> {
    (
        prop::option::of(0..1000usize),
        prop::option::of(0..1000usize),
        any::<bool>(),
        words(1..=3),
        prop::option::of(words(1..=3)),
        prop::collection::vec(words(1..=3), 0..3),
    )
        .prop_map(|(parent, second_parent, c_branch, label, french, entries)| NodeSpec {
            parent,
            second_parent,
            c_branch,
            label,
            french,
            entries,
        })
}

fn ontology_spec() -> impl Strategy<Value = Vec<NodeSpec>> {
    prop::collection::vec(node_spec(), 1..25)
}

fn phrase(ws: &[usize]) -> String {
    ws.iter().map(|&w| VOCAB[w]).collect::<Vec<_>>().join(" ")
}

/// Records whose tree numbers form a forest under `A` and `C` roots, never
/// deeper than `max_depth`.
fn records(specs: &[NodeSpec], max_depth: usize) -> Vec<ConceptRecord> {
    let mut trees: Vec<Vec<String>> = Vec::new();
    let mut out = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        let under = |pick: Option<usize>| {
            let p = pick.filter(|_| i > 0).map(|x| x % i)?;
            let tn = &trees[p][0];
            (tree_depth(tn) < max_depth).then(|| format!("{tn}.{i:03}"))
        };
        let mut tns = vec![under(s.parent).unwrap_or_else(|| format!("{}{i:02}", if s.c_branch { 'C' } else { 'A' }))];
        if let Some(tn) = under(s.second_parent) {
            if !tns.contains(&tn) {
                tns.push(tn);
            }
        }
        trees.push(tns.clone());
        let mut labels = BTreeMap::from([("en".to_string(), phrase(&s.label))]);
        let mut entry_terms = BTreeMap::new();
        if let Some(fr) = &s.french {
            labels.insert("fr".into(), phrase(fr));
        }
        if !s.entries.is_empty() {
            entry_terms.insert("en".to_string(), s.entries.iter().map(|e| phrase(e)).collect());
        }
        out.push(ConceptRecord { id: format!("D{i:03}"), labels, entry_terms, tree_numbers: tns });
    }
    out
}

fn build(specs: &[NodeSpec], max_depth: usize) -> Result<Ontology, TestCaseError> {
    let mut builder = OntologyBuilder::new(max_depth);
    for r in records(specs, max_depth) {
        builder.add(r).map_err(|e| fail(e.to_string()))?;
    }
    builder.build().map_err(|e| fail(e.to_string()))
}

fn owner_of(onto: &Ontology) -> BTreeMap<String, String> {
    onto.concepts()
        .flat_map(|c| c.tree_numbers.iter().map(move |t| (t.clone(), c.id.clone())))
        .collect()
}

/// Concept-level ontology invariants, checked against independent oracles.
pub fn check_ontology(onto: &Ontology) -> Result<(), String> {
    let owners = owner_of(onto);
    for c in onto.concepts() {
        if !c.labels.contains_key("en") {
            return Err(format!("{} lacks an English label", c.id));
        }
        for t in &c.tree_numbers {
            if tree_depth(t) > onto.max_depth() {
                return Err(format!("{t} deeper than {}", onto.max_depth()));
            }
        }
        let expected: BTreeSet<&str> = c
            .tree_numbers
            .iter()
            .filter_map(|t| t.rsplit_once('.'))
            .filter_map(|(up, _)| owners.get(up).map(String::as_str))
            .collect();
        let actual: BTreeSet<&str> = c.parent_ids.iter().map(String::as_str).collect();
        if expected != actual {
            return Err(format!("{}: parents {actual:?}, expected {expected:?}", c.id));
        }
    }
    let n_tree_numbers: usize = onto.concepts().map(|c| c.tree_numbers.len()).sum();
    if n_tree_numbers != owners.len() {
        return Err("a tree number is shared by two concepts".into());
    }
    // acyclicity: the ancestor frontier empties within the depth bound when
    // the hierarchy is a tree; concepts with several tree numbers can chain
    // further, so there the bound is the number of concepts
    let tree_shaped = onto.concepts().all(|c| c.tree_numbers.len() <= 1);
    let bound = if tree_shaped { onto.max_depth() } else { onto.len() };
    for c in onto.concepts() {
        let mut frontier: BTreeSet<String> = BTreeSet::from([c.id.clone()]);
        for _ in 0..bound {
            let mut next = BTreeSet::new();
            for id in &frontier {
                let parents = onto.hyperonyms(id).map_err(|e| e.to_string())?;
                next.extend(parents.iter().cloned());
            }
            frontier = next;
        }
        if !frontier.is_empty() {
            return Err(format!("ancestors of {} do not terminate within {bound} steps", c.id));
        }
    }
    // index completeness and ordering
    for c in onto.concepts() {
        let surfaces = c
            .labels
            .iter()
            .chain(c.entry_terms.iter().flat_map(|(l, ts)| ts.iter().map(move |t| (l, t))));
        for (lang, surface) in surfaces {
            let found = onto.lookup_text(lang, surface).map_err(|e| e.to_string())?;
            if !found.contains(&c.id.as_str()) {
                return Err(format!("lookup({lang}, {surface:?}) misses {}", c.id));
            }
        }
    }
    for lang in onto.languages() {
        for (key, entries) in onto.index_entries(lang).map_err(|e| e.to_string())? {
            let ranks: Vec<_> = entries.iter().map(|e| (e.kind, e.depth, e.concept.clone())).collect();
            if ranks.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("candidates of {key:?} not strictly ordered: {ranks:?}"));
            }
            for e in entries {
                if !onto.contains(&e.concept) {
                    return Err(format!("index entry {} is not a concept", e.concept));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- ontology

pub fn ontology_acyclic_and_closed() -> Result<(), String> {
    run(96, (ontology_spec(), 2..=11usize, any::<bool>()), |(mut specs, depth, single)| {
        if single {
            for s in &mut specs {
                s.second_parent = None;
            }
        }
        let onto = build(&specs, depth)?;
        check_ontology(&onto).map_err(fail)
    })?;
    // two descriptors that are each other's parent through different branches
    let mut builder = OntologyBuilder::new(11);
    for (id, trees) in [("A", ["R1", "R2.005"]), ("B", ["R1.007", "R2"])] {
        let record = ConceptRecord {
            id: id.into(),
            labels: BTreeMap::from([("en".into(), id.to_lowercase())]),
            tree_numbers: trees.iter().map(|t| t.to_string()).collect(),
            ..Default::default()
        };
        builder.add(record).map_err(|e| e.to_string())?;
    }
    match builder.build() {
        Err(_) => Ok(()),
        Ok(_) => Err("a cyclic parent relation was accepted".into()),
    }
}

pub fn ontology_depth_bound_enforced() -> Result<(), String> {
    run(48, (1..=11usize, 0..3usize), |(bound, extra)| {
        let deep = (0..bound - 1 + extra).map(|i| format!(".{i:03}")).collect::<String>();
        let mut builder = OntologyBuilder::new(bound);
        let record = ConceptRecord {
            id: "D1".into(),
            labels: BTreeMap::from([("en".into(), "deep".into())]),
            tree_numbers: vec![format!("C01{deep}")],
            ..Default::default()
        };
        builder.add(record).map_err(|e| fail(e.to_string()))?;
        let accepted = builder.build().is_ok();
        prop_assert_eq!(accepted, extra == 0);
        Ok(())
    })
}

pub fn ontology_index_complete() -> Result<(), String> {
    run(96, (ontology_spec(), prop::collection::vec(0..ACCENTED.len(), 1..4)), |(specs, accented)| {
        let mut builder = OntologyBuilder::new(11);
        for r in records(&specs, 11) {
            builder.add(r).map_err(|e| fail(e.to_string()))?;
        }
        let label = accented.iter().map(|&i| ACCENTED[i]).collect::<Vec<_>>().join("  ");
        builder
            .add(ConceptRecord {
                id: "X999".into(),
                labels: BTreeMap::from([("en".into(), label.clone()), ("fr".into(), label.to_uppercase())]),
                tree_numbers: vec!["Z99".into()],
                ..Default::default()
            })
            .map_err(|e| fail(e.to_string()))?;
        let onto = builder.build().map_err(|e| fail(e.to_string()))?;
        let found = onto.lookup_text("fr", &label.to_lowercase()).map_err(|e| fail(e.to_string()))?;
        prop_assert!(found.contains(&"X999"));
        check_ontology(&onto).map_err(fail)
    })
}

pub fn ontology_filter_sound() -> Result<(), String> {
    run(64, ontology_spec(), |specs| {
        let full = build(&specs, 11)?;
        let mut xml = Vec::new();
        write_ontology_xml(&full, &mut xml).map_err(|e| fail(e.to_string()))?;
        let filtered = load_ontology_xml(&xml[..], Some("C")).map_err(|e| fail(e.to_string()))?;
        let expected: BTreeSet<&str> = full
            .concepts()
            .filter(|c| c.tree_numbers.iter().any(|t| t.starts_with('C')))
            .map(|c| c.id.as_str())
            .collect();
        let kept: BTreeSet<&str> = filtered.concepts().map(|c| c.id.as_str()).collect();
        prop_assert_eq!(&kept, &expected);
        for c in filtered.concepts() {
            prop_assert!(c.tree_numbers.iter().all(|t| t.starts_with('C')), "{:?}", c.tree_numbers);
            for p in &c.parent_ids {
                prop_assert!(filtered.contains(p), "dangling parent {}", p);
            }
            let original = full.concept(&c.id).unwrap();
            prop_assert_eq!(&c.labels, &original.labels);
        }
        check_ontology(&filtered).map_err(fail)
    })
}

pub fn ontology_streaming_bound() -> Result<(), String> {
    run(48, (1..400usize, 1..12usize), |(total, c_every)| {
        let mut xml = Vec::new();
        let counts = generate_descriptor_xml(&mut xml, total, c_every).map_err(|e| fail(e.to_string()))?;
        let options = IngestOptions { filter_prefix: Some("C01".into()), ..Default::default() };
        let ingested = ingest_ontology_xml(&xml[..], &options).map_err(|e| fail(e.to_string()))?;
        let s = ingested.stats;
        prop_assert_eq!(s.records_seen, total);
        prop_assert_eq!(s.records_retained, counts.in_c_branch);
        prop_assert_eq!(ingested.ontology.len(), counts.in_c_branch);
        prop_assert!(s.records_allocated <= s.records_retained + ALLOCATION_SLACK, "{:?}", s);
        Ok(())
    })
}

// ---------------------------------------------------------------- preprocess

const TOKENS: [&str; 14] =
    ["the", "of", "and", "le", "la", "de", "et", "virus", "fievre", "cellule", "infection", "is", "est", "a"];

fn token_list() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(&TOKENS[..]).prop_map(str::to_owned), 0..40)
}

pub fn preprocess_permutation_invariant() -> Result<(), String> {
    let table = StopwordTable::bundled();
    let strategy = token_list().prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()));
    run(128, (strategy, prop::sample::select(vec!["en", "fr"])), |((tokens, shuffled), lang)| {
        let a = to_term_vector(&TokenStream::from_tokens(tokens), lang, &table, None).map_err(|e| fail(e.to_string()))?;
        let b = to_term_vector(&TokenStream::from_tokens(shuffled), lang, &table, None).map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(a.counts, b.counts);
        Ok(())
    })
}

pub fn preprocess_count_conservation() -> Result<(), String> {
    let table = StopwordTable::bundled();
    run(128, (token_list(), prop::sample::select(vec!["en", "fr"])), |(tokens, lang)| {
        let stops = tokens.iter().filter(|t| table.is_stopword(lang, t)).count();
        let tv = to_term_vector(&TokenStream::from_tokens(tokens.clone()), lang, &table, None)
            .map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(tv.counts.sum() as usize, tokens.len() - stops);
        for (k, v) in tv.counts.iter() {
            prop_assert!(v >= 1.0 && v.fract() == 0.0, "count {} for {}", v, k);
            prop_assert!(!table.is_stopword(lang, k), "stopword {} kept", k);
        }
        Ok(())
    })
}

pub fn preprocess_tokens_normalized() -> Result<(), String> {
    run(256, "\\PC{0,80}", |text| {
        let once = normalize(&text);
        prop_assert_eq!(normalize(&once), once.clone());
        let tokens = tokenize(&text);
        for t in tokens.tokens() {
            prop_assert!(!t.is_empty());
            prop_assert_eq!(&normalize(t), t);
        }
        prop_assert_eq!(tokenize(&tokens.tokens().join(" ")), tokens);
        Ok(())
    })
}

pub fn preprocess_detection_total() -> Result<(), String> {
    let table = StopwordTable::bundled();
    let text = prop_oneof!["\\PC{0,80}", token_list().prop_map(|v| v.join(" "))];
    run(256, text, |text| {
        let tokens = tokenize(&text);
        let a = detect_language(&tokens, &table);
        let b = detect_language(&tokens, &table);
        prop_assert_eq!(&a, &b);
        prop_assert!(table.has_language(&a.language), "{}", a.language);
        Ok(())
    })
}

// ---------------------------------------------------------------- conceptmap

fn sequence() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(&VOCAB[..]).prop_map(str::to_owned), 0..30)
}

/// Greedy longest match computed from `Ontology::lookup` alone.
fn oracle_segments(onto: &Ontology, seq: &[String]) -> Vec<(Vec<String>, Vec<String>)> {
    let max = onto.max_label_tokens("en");
    let mut out = Vec::new();
    let mut i = 0;
    while i < seq.len() {
        let mut matched = false;
        for len in (1..=max.min(seq.len() - i)).rev() {
            let cands = onto.lookup("en", &seq[i..i + len]).unwrap();
            if !cands.is_empty() {
                out.push((seq[i..i + len].to_vec(), cands.iter().map(|c| c.to_string()).collect()));
                i += len;
                matched = true;
                break;
            }
        }
        if !matched {
            out.push((vec![seq[i].clone()], Vec::new()));
            i += 1;
        }
    }
    out
}

fn mapped(onto: &Ontology, tv: &TermVector, m: MappingStrategy, d: DisambiguationStrategy) -> Result<HybridRepresentation, TestCaseError> {
    map_terms(tv, onto, m, d).map_err(|e| fail(e.to_string()))
}

pub fn conceptmap_mass_accounting() -> Result<(), String> {
    run(128, (ontology_spec(), sequence()), |(specs, seq)| {
        let onto = build(&specs, 11)?;
        let tv = TermVector::from_sequence("en", seq.clone());
        let first = mapped(&onto, &tv, MappingStrategy::ReplaceTermsByConcepts, DisambiguationStrategy::FirstConcept)?;
        let all = mapped(&onto, &tv, MappingStrategy::ReplaceTermsByConcepts, DisambiguationStrategy::AllConcepts)?;
        let segments = oracle_segments(&onto, &seq);
        let mut concepts = SparseVector::new();
        let mut terms = SparseVector::new();
        let mut all_mass = 0.0;
        for (tokens, cands) in &segments {
            match cands.first() {
                Some(c) => concepts.add(c, 1.0),
                None => terms.add(&tokens[0], 1.0),
            }
            all_mass += cands.len() as f64;
        }
        prop_assert_eq!(&first.concept_part, &concepts);
        prop_assert_eq!(&first.term_part, &terms);
        prop_assert_eq!(first.concept_part.sum() + first.term_part.sum(), segments.len() as f64);
        prop_assert_eq!(all.concept_part.sum(), all_mass);
        prop_assert!(all.concept_part.sum() >= first.concept_part.sum());
        prop_assert_eq!(&all.term_part, &first.term_part);
        Ok(())
    })
}

fn mapping_strategy() -> impl Strategy<Value = MappingStrategy> {
    prop::sample::select(vec![
        MappingStrategy::AddConcept,
        MappingStrategy::ReplaceTermsByConcepts,
        MappingStrategy::ConceptOnly,
    ])
}

fn disambiguation() -> impl Strategy<Value = DisambiguationStrategy> {
    prop::sample::select(vec![DisambiguationStrategy::FirstConcept, DisambiguationStrategy::AllConcepts])
}

pub fn conceptmap_enrichment_monotone() -> Result<(), String> {
    run(128, (ontology_spec(), sequence(), mapping_strategy(), disambiguation()), |(specs, seq, m, d)| {
        let onto = build(&specs, 11)?;
        let rep = mapped(&onto, &TermVector::from_sequence("en", seq), m, d)?;
        let out = enrich_with_hyperonyms(&rep, &onto, HyperonymMode::Propagate).map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(&out.term_part, &rep.term_part);
        prop_assert!(out.concept_part.sum() >= rep.concept_part.sum());
        for (c, v) in rep.concept_part.iter() {
            prop_assert!(out.concept_part.contains(c), "{} dropped", c);
            prop_assert!(out.concept_part.get(c) >= v, "{} decreased", c);
        }
        // propagation oracle: own value plus every child's value
        let mut expected = rep.concept_part.clone();
        for (c, v) in rep.concept_part.iter() {
            for p in &onto.concept(c).unwrap().parent_ids {
                expected.add(p, v);
            }
        }
        prop_assert_eq!(&out.concept_part, &expected);
        Ok(())
    })
}

pub fn conceptmap_literal_formula() -> Result<(), String> {
    run(128, (ontology_spec(), sequence(), disambiguation()), |(specs, seq, d)| {
        let onto = build(&specs, 11)?;
        let rep = mapped(&onto, &TermVector::from_sequence("en", seq), MappingStrategy::ConceptOnly, d)?;
        let out = enrich_with_hyperonyms(&rep, &onto, HyperonymMode::Literal).map_err(|e| fail(e.to_string()))?;
        for c in rep.concept_part.keys() {
            let parents = &onto.concept(c).unwrap().parent_ids;
            let expected: f64 = parents.iter().map(|p| rep.concept_part.get(p)).sum();
            prop_assert!((out.concept_part.get(c) - expected).abs() < 1e-12);
        }
        for c in out.concept_part.keys() {
            prop_assert!(rep.concept_part.contains(c));
        }
        Ok(())
    })
}

pub fn conceptmap_deterministic() -> Result<(), String> {
    run(64, (ontology_spec(), sequence(), mapping_strategy(), disambiguation()), |(specs, seq, m, d)| {
        let onto = build(&specs, 11)?;
        let tv = TermVector::from_sequence("en", seq);
        let a = mapped(&onto, &tv, m, d)?;
        let b = mapped(&build(&specs, 11)?, &tv, m, d)?;
        prop_assert_eq!(&a, &b);
        let ea = enrich_with_hyperonyms(&a, &onto, HyperonymMode::Propagate).unwrap();
        let eb = enrich_with_hyperonyms(&b, &onto, HyperonymMode::Propagate).unwrap();
        prop_assert_eq!(ea, eb);
        Ok(())
    })
}

pub fn conceptmap_strategy_containment() -> Result<(), String> {
    run(128, (ontology_spec(), sequence(), disambiguation()), |(specs, seq, d)| {
        let onto = build(&specs, 11)?;
        let tv = TermVector::from_sequence("en", seq);
        let only = mapped(&onto, &tv, MappingStrategy::ConceptOnly, d)?;
        let replace = mapped(&onto, &tv, MappingStrategy::ReplaceTermsByConcepts, d)?;
        let add = mapped(&onto, &tv, MappingStrategy::AddConcept, d)?;
        prop_assert_eq!(&only.concept_part, &replace.concept_part);
        prop_assert_eq!(&add.concept_part, &replace.concept_part);
        prop_assert!(only.term_part.is_empty());
        prop_assert_eq!(&add.term_part, &tv.counts);
        for (t, v) in replace.term_part.iter() {
            prop_assert!(v <= tv.counts.get(t));
            prop_assert!(onto.lookup("en", &[t.to_string()]).unwrap().is_empty(), "{} has a concept", t);
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- multilingual

fn small_synthetic() -> impl Strategy<Value = SyntheticSpec> {
    (any::<u64>(), 2..4usize, 1..4usize, 1..4usize).prop_map(|(seed, categories, docs, children)| SyntheticSpec {
        categories,
        docs_per_language: docs,
        seed,
        children_per_category: children,
        ..SyntheticSpec::default()
    })
}

fn settings(approach: PivotApproach, mapping: MappingStrategy, d: DisambiguationStrategy) -> RepresentationSettings {
    RepresentationSettings { mapping, disambiguation: d, approach, ..Default::default() }
}

pub fn multilingual_pivot_closure() -> Result<(), String> {
    run(24, (small_synthetic(), 0.0..=1.0f64, mapping_strategy(), disambiguation()), |(mut spec, coverage, m, d)| {
        spec.lexicon_coverage = coverage;
        let s = generate_synthetic_bilingual(&spec).map_err(|e| fail(e.to_string()))?;
        for approach in [PivotApproach::Translation, PivotApproach::MultilingualOntology] {
            let p = Pipeline::new(s.ontology.clone(), s.stopwords.clone(), vec![s.lexicon.clone()], settings(approach, m, d))
                .map_err(|e| fail(e.to_string()))?;
            for r in p.represent_corpus(&s.corpus).map_err(|e| fail(e.to_string()))? {
                for c in r.representation.concept_part.keys() {
                    prop_assert!(s.ontology.contains(c), "{} outside the ontology", c);
                }
                prop_assert_eq!(r.representation.language.as_str(), "en");
            }
        }
        Ok(())
    })
}

/// Representations of the aligned corpus under both pivot approaches.
pub fn aligned_representations(
    spec: &SyntheticSpec,
    mapping: MappingStrategy,
    d: DisambiguationStrategy,
) -> Result<(Vec<HybridRepresentation>, Vec<HybridRepresentation>), String> {
    let s = generate_synthetic_bilingual(spec).map_err(|e| e.to_string())?;
    let reps = |approach| -> Result<Vec<HybridRepresentation>, String> {
        let p = Pipeline::new(s.ontology.clone(), s.stopwords.clone(), vec![s.lexicon.clone()], settings(approach, mapping, d))
            .map_err(|e| e.to_string())?;
        let out = p.represent_corpus(&s.corpus).map_err(|e| e.to_string())?;
        Ok(out.into_iter().map(|r| r.representation).collect())
    };
    Ok((reps(PivotApproach::Translation)?, reps(PivotApproach::MultilingualOntology)?))
}

pub fn multilingual_alignment_equivalence() -> Result<(), String> {
    let replace_like = prop::sample::select(vec![MappingStrategy::ReplaceTermsByConcepts, MappingStrategy::ConceptOnly]);
    run(24, (small_synthetic(), replace_like, disambiguation()), |(spec, m, d)| {
        let (translated, multi) = aligned_representations(&spec, m, d).map_err(fail)?;
        prop_assert_eq!(translated.len(), multi.len());
        for (i, (a, b)) in translated.iter().zip(&multi).enumerate() {
            prop_assert_eq!(a, b, "document {}", i);
        }
        Ok(())
    })
}

pub fn multilingual_english_invariance() -> Result<(), String> {
    run(24, (small_synthetic(), mapping_strategy(), disambiguation()), |(spec, m, d)| {
        let s = generate_synthetic_bilingual(&spec).map_err(|e| fail(e.to_string()))?;
        let index = ConceptIndex::filtered(&s.ontology, "en", s.stopwords.words("en").unwrap(), None).unwrap();
        for approach in [PivotApproach::Translation, PivotApproach::MultilingualOntology] {
            let p = Pipeline::new(s.ontology.clone(), s.stopwords.clone(), vec![s.lexicon.clone()], settings(approach, m, d))
                .map_err(|e| fail(e.to_string()))?;
            for doc in s.corpus.documents().iter().filter(|d| d.id.contains("-en-")) {
                let tv = to_term_vector(&tokenize(&doc.text()), "en", &s.stopwords, None).unwrap();
                let direct = map_with_index(&tv, &index, m, d).unwrap();
                let pivoted = p.represent(&doc.text()).map_err(|e| fail(e.to_string()))?;
                prop_assert_eq!(pivoted.language.as_str(), "en");
                prop_assert_eq!(pivoted.untranslated, 0);
                prop_assert_eq!(&pivoted.representation, &direct);
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- model

/// Labeled bags of `w<n>` terms; every class gets at least two documents.
type Dataset = (usize, Vec<(usize, BTreeMap<usize, u32>)>);

fn dataset() -> impl Strategy<Value = Dataset> {
    (2..5usize).prop_flat_map(|nc| {
        let doc = prop::collection::btree_map(0..14usize, 1..6u32, 1..6);
        (Just(nc), prop::collection::vec(doc, 2 * nc..6 * nc))
            .prop_map(|(nc, docs)| (nc, docs.into_iter().enumerate().map(|(i, d)| (i % nc, d)).collect()))
    })
}

fn rep_of(bag: &BTreeMap<usize, u32>) -> HybridRepresentation {
    let mut rep = HybridRepresentation { language: "en".into(), ..Default::default() };
    for (&f, &n) in bag {
        if f % 3 == 0 {
            rep.concept_part.add(&format!("C{f}"), f64::from(n));
        } else {
            rep.term_part.add(&format!("w{f}"), f64::from(n));
        }
    }
    rep
}

fn training(data: &[(usize, BTreeMap<usize, u32>)]) -> (Vec<HybridRepresentation>, Vec<String>) {
    data.iter().map(|(l, bag)| (rep_of(bag), format!("cat{l}"))).unzip()
}

fn vectors(data: &[(usize, BTreeMap<usize, u32>)]) -> (Vec<WeightedVector>, Vec<usize>) {
    data.iter()
        .map(|(l, bag)| (WeightedVector::from_sorted(bag.iter().map(|(&f, &n)| (f, f64::from(n))).collect()), *l))
        .unzip()
}

fn queries() -> impl Strategy<Value = Vec<BTreeMap<usize, u32>>> {
    prop::collection::vec(prop::collection::btree_map(0..16usize, 1..6u32, 0..6), 1..8)
}

const FP: &str = "fingerprint";

pub fn model_zero_law() -> Result<(), String> {
    run(128, dataset(), |(nc, mut data)| {
        for class in 0..nc {
            let doc = data.iter_mut().find(|(l, _)| *l == class).unwrap();
            doc.1.insert(100, 1);
        }
        let (reps, labels) = training(&data);
        let pairs: Vec<_> = reps.iter().cloned().zip(labels.iter().cloned()).collect();
        let (space, profiles, weighting) = build_profiles(&pairs).map_err(|e| fail(e.to_string()))?;
        let shared = space.ordinal("t:w100").unwrap();
        prop_assert_eq!(weighting.idf(shared), 0.0);
        for p in &profiles {
            prop_assert_eq!(p.tfidf.get("t:w100"), 0.0);
            for (_, v) in p.tfidf.iter() {
                prop_assert!(v >= 0.0);
            }
        }
        for r in &reps {
            prop_assert_eq!(weighting.weigh(&space, r).value(shared), 0.0);
        }
        for (i, f) in space.features().iter().enumerate() {
            prop_assert_eq!(space.ordinal(f), Some(i));
        }
        Ok(())
    })
}

pub fn model_nb_normalized() -> Result<(), String> {
    let weights = prop::collection::vec(0.1..10.0f64, 40);
    run(128, (dataset(), weights, queries(), 0.1..3.0f64), |((nc, data), w, qs, alpha)| {
        let (docs, labels) = vectors(&data);
        let nb = NaiveBayes::fit(&docs, &labels, &w[..docs.len()], nc, 16, alpha);
        for c in 0..nc {
            let total: f64 = (0..16).map(|f| nb.likelihood(c, f)).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12, "class {} sums to {}", c, total);
        }
        for q in &qs {
            let v = WeightedVector::from_sorted(q.iter().map(|(&f, &n)| (f, f64::from(n))).collect());
            let post: f64 = nb.posterior(&v).iter().sum();
            prop_assert!((post - 1.0).abs() <= 1e-9);
        }
        Ok(())
    })
}

pub fn model_knn_self_consistent() -> Result<(), String> {
    run(128, dataset(), |(nc, data)| {
        let (mut docs, labels) = vectors(&data);
        // a private feature per document rules out duplicate directions
        for (i, d) in docs.iter_mut().enumerate() {
            let mut e = d.entries().to_vec();
            e.push((100 + i, 1.0));
            *d = WeightedVector::from_sorted(e);
        }
        let knn = KnnIndex::new(1, nc, &docs, &labels);
        for (i, d) in docs.iter().enumerate() {
            prop_assert_eq!(knn.predict(d).0, labels[i]);
            prop_assert_eq!(knn.neighbours(d)[0].doc, i);
        }
        Ok(())
    })
}

pub fn model_adaboost_reduction() -> Result<(), String> {
    run(128, (dataset(), queries()), |((nc, data), qs)| {
        let (docs, labels) = vectors(&data);
        let boost = AdaBoostNb::fit(&docs, &labels, nc, 16, 1.0, 1);
        let nb = NaiveBayes::fit(&docs, &labels, &vec![1.0; docs.len()], nc, 16, 1.0);
        let probes = qs.iter().map(|q| WeightedVector::from_sorted(q.iter().map(|(&f, &n)| (f, f64::from(n))).collect()));
        for v in docs.iter().cloned().chain(probes) {
            prop_assert_eq!(boost.predict(&v), nb.predict(&v));
        }
        Ok(())
    })
}

pub fn model_scale_invariance() -> Result<(), String> {
    run(96, (dataset(), queries(), 2..6u32), |((_, data), qs, factor)| {
        let (reps, labels) = training(&data);
        let scaled: Vec<_> = reps
            .iter()
            .map(|r| HybridRepresentation {
                language: r.language.clone(),
                term_part: r.term_part.scaled(f64::from(factor)),
                concept_part: r.concept_part.scaled(f64::from(factor)),
            })
            .collect();
        for kind in [ClassifierKind::NaiveBayes, ClassifierKind::Knn] {
            let h = Hyperparameters::default();
            let a = TrainedModel::train(&reps, &labels, kind, h, FP).map_err(|e| fail(e.to_string()))?;
            let b = TrainedModel::train(&scaled, &labels, kind, h, FP).map_err(|e| fail(e.to_string()))?;
            for r in reps.iter().chain(qs.iter().map(rep_of).collect::<Vec<_>>().iter()) {
                let pa = a.classify(r, FP).unwrap();
                let pb = b.classify(r, FP).unwrap();
                prop_assert_eq!(pa.category, pb.category, "{}", kind);
            }
        }
        Ok(())
    })
}

pub fn model_tree_sanity() -> Result<(), String> {
    let data = (2..8usize, 2..8usize, 1..6usize).prop_flat_map(|(n0, n1, noise)| {
        let n = n0 + n1;
        (
            Just((n0, n1)),
            prop::collection::vec(0.1..5.0f64, n0),
            prop::collection::vec(prop::collection::vec(prop::option::of(0.1..5.0f64), noise), n),
        )
    });
    run(128, data, |((n0, n1), sep, noise)| {
        let n = n0 + n1;
        let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= n0)).collect();
        let docs: Vec<WeightedVector> = (0..n)
            .map(|i| {
                let mut e = Vec::new();
                if i < n0 {
                    e.push((0, sep[i]));
                }
                for (j, v) in noise[i].iter().enumerate() {
                    // the first and last documents (different classes) share
                    // every noise value, so no noise feature separates
                    let v = if i == 0 || i == n - 1 { Some(1.0) } else { *v };
                    if let Some(v) = v {
                        e.push((j + 1, v));
                    }
                }
                WeightedVector::from_sorted(e)
            })
            .collect();
        let tree = GainRatioTree::fit(&docs, &labels, 2, TreeParams::default());
        prop_assert!(matches!(tree.nodes()[0], Node::Split { feature: 0, .. }), "root {:?}", tree.nodes()[0]);
        for (d, l) in docs.iter().zip(&labels) {
            prop_assert_eq!(tree.predict(d), *l);
        }
        Ok(())
    })
}

pub fn model_fit_sanity() -> Result<(), String> {
    run(64, (dataset(), 1..8usize, 1..4usize), |((nc, data), max_depth, min_leaf)| {
        let (docs, labels) = vectors(&data);
        let boost = AdaBoostNb::fit(&docs, &labels, nc, 16, 1.0, 10);
        for (_, w) in boost.members() {
            prop_assert!(w.is_finite() && *w > 0.0);
        }
        let tree = GainRatioTree::fit(&docs, &labels, nc, TreeParams { max_depth, min_leaf });
        prop_assert!(tree.depth() <= max_depth);
        prop_assert!(tree.nodes().len() < 2 * docs.len());
        for (id, node) in tree.nodes().iter().enumerate() {
            if let Node::Split { below, above, .. } = node {
                prop_assert!(*below > id && *above > id && below != above);
            }
        }
        let (reps, names) = training(&data);
        let model = TrainedModel::train(&reps, &names, ClassifierKind::NaiveBayes, Hyperparameters::default(), FP).unwrap();
        let refused = matches!(model.classify(&reps[0], "other"), Err(ModelError::FingerprintMismatch { .. }));
        prop_assert!(refused);
        Ok(())
    })
}

pub fn model_order_invariance() -> Result<(), String> {
    let strategy = dataset().prop_flat_map(|(nc, data)| {
        let order: Vec<usize> = (0..data.len()).collect();
        (Just(nc), Just(data), Just(order).prop_shuffle(), queries())
    });
    run(96, strategy, |(_, data, order, qs)| {
        let (reps, labels) = training(&data);
        let (preps, plabels): (Vec<_>, Vec<_>) = order.iter().map(|&i| (reps[i].clone(), labels[i].clone())).unzip();
        let h = Hyperparameters::default();
        let a = TrainedModel::train(&reps, &labels, ClassifierKind::NaiveBayes, h, FP).unwrap();
        let b = TrainedModel::train(&preps, &plabels, ClassifierKind::NaiveBayes, h, FP).unwrap();
        prop_assert_eq!(&a.profiles, &b.profiles);
        prop_assert_eq!(&a.features, &b.features);
        prop_assert_eq!(&a.weighting, &b.weighting);
        let (Classifier::NaiveBayes(na), Classifier::NaiveBayes(nb)) = (&a.classifier, &b.classifier) else {
            return Err(fail("expected naive Bayes"));
        };
        for c in 0..na.n_classes() {
            prop_assert!((na.prior(c) - nb.prior(c)).abs() < 1e-12);
            for f in 0..a.features.len() {
                prop_assert!((na.likelihood(c, f) - nb.likelihood(c, f)).abs() < 1e-12);
            }
        }
        let ka = TrainedModel::train(&reps, &labels, ClassifierKind::Knn, h, FP).unwrap();
        let kb = TrainedModel::train(&preps, &plabels, ClassifierKind::Knn, h, FP).unwrap();
        for r in reps.iter().cloned().chain(qs.iter().map(rep_of)) {
            prop_assert_eq!(ka.classify(&r, FP).unwrap().category, kb.classify(&r, FP).unwrap().category);
            prop_assert_eq!(a.classify(&r, FP).unwrap().category, b.classify(&r, FP).unwrap().category);
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- evaluate

fn judgements() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..6usize).prop_flat_map(|k| (Just(k), prop::collection::vec((0..k, 0..k), 1..60)))
}

fn names(k: usize, prefix: &str) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

pub fn evaluate_f_bounds() -> Result<(), String> {
    run(256, judgements(), |(k, pairs)| {
        let cats = names(k, "c");
        let gold: Vec<String> = pairs.iter().map(|p| cats[p.0].clone()).collect();
        let pred: Vec<String> = pairs.iter().map(|p| cats[p.1].clone()).collect();
        let r = score(&gold, &pred, &cats).map_err(|e| fail(e.to_string()))?;
        let mut tp_total = 0;
        let mut predicted_total = 0;
        for (i, c) in r.categories.iter().enumerate() {
            let (p, rc, f) = (c.precision, c.recall, c.f_measure);
            if p + rc > 0.0 {
                prop_assert!(f <= p.max(rc) + 1e-12 && f >= p.min(rc) - 1e-12);
                prop_assert!((f - 2.0 * p * rc / (p + rc)).abs() < 1e-12);
            } else {
                prop_assert_eq!(f, 0.0);
            }
            let gold_n = pairs.iter().filter(|x| x.0 == i).count();
            prop_assert_eq!(c.counts.true_positive + c.counts.false_negative, gold_n);
            prop_assert_eq!(c.support, gold_n);
            tp_total += c.counts.true_positive;
            predicted_total += c.counts.true_positive + c.counts.false_positive;
        }
        prop_assert_eq!(tp_total, pairs.iter().filter(|x| x.0 == x.1).count());
        prop_assert_eq!(predicted_total, pairs.len());
        let mean = |f: fn(&meshclass::evaluate::CategoryScore) -> f64| r.categories.iter().map(f).sum::<f64>() / k as f64;
        prop_assert!((r.macro_f - mean(|c| c.f_measure)).abs() < 1e-12);
        prop_assert!((r.macro_precision - mean(|c| c.precision)).abs() < 1e-12);
        prop_assert!((r.macro_recall - mean(|c| c.recall)).abs() < 1e-12);
        Ok(())
    })
}

pub fn evaluate_relabel_invariance() -> Result<(), String> {
    let strategy = judgements().prop_flat_map(|(k, pairs)| (Just(k), Just(pairs), Just((0..k).collect::<Vec<_>>()).prop_shuffle()));
    run(256, strategy, |(k, pairs, sigma)| {
        let cats = names(k, "c");
        let renamed: Vec<String> = sigma.iter().map(|&s| format!("r{s}")).collect();
        let pick = |v: &Vec<String>, f: fn(&(usize, usize)) -> usize| pairs.iter().map(|p| v[f(p)].clone()).collect::<Vec<_>>();
        let a = score(&pick(&cats, |p| p.0), &pick(&cats, |p| p.1), &cats).unwrap();
        let b = score(&pick(&renamed, |p| p.0), &pick(&renamed, |p| p.1), &renamed).unwrap();
        for (i, row) in a.categories.iter().enumerate() {
            let other = b.categories.iter().find(|c| c.category == renamed[i]).unwrap();
            prop_assert_eq!(&row.counts, &other.counts);
            prop_assert_eq!(row.f_measure, other.f_measure);
        }
        prop_assert!((a.macro_f - b.macro_f).abs() < 1e-12);
        prop_assert!((a.macro_precision - b.macro_precision).abs() < 1e-12);
        prop_assert!((a.macro_recall - b.macro_recall).abs() < 1e-12);
        Ok(())
    })
}

pub fn evaluate_joint_permutation() -> Result<(), String> {
    let strategy = judgements().prop_flat_map(|(k, pairs)| (Just(k), Just(pairs.clone()), Just(pairs).prop_shuffle()));
    run(256, strategy, |(k, pairs, shuffled)| {
        let cats = names(k, "c");
        let split = |ps: &[(usize, usize)]| -> (Vec<String>, Vec<String>) {
            ps.iter().map(|p| (cats[p.0].clone(), cats[p.1].clone())).unzip()
        };
        let (g1, p1) = split(&pairs);
        let (g2, p2) = split(&shuffled);
        prop_assert_eq!(score(&g1, &p1, &cats).unwrap(), score(&g2, &p2, &cats).unwrap());
        Ok(())
    })
}

pub fn evaluate_split_partition() -> Result<(), String> {
    let labels = prop::collection::vec(0..4usize, 0..40).prop_map(|extra| {
        let mut l: Vec<String> = (0..4).flat_map(|c| [format!("c{c}"), format!("c{c}")]).collect();
        l.extend(extra.into_iter().map(|c| format!("c{c}")));
        l
    });
    run(128, (labels, 0.05..0.95f64, any::<u64>()), |(labels, ratio, seed)| {
        let s = stratified_split(&labels, ratio, seed).unwrap();
        prop_assert_eq!(&s, &stratified_split(&labels, ratio, seed).unwrap());
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        for c in 0..4 {
            let name = format!("c{c}");
            let n = labels.iter().filter(|l| **l == name).count();
            let train = s.train.iter().filter(|&&i| labels[i] == name).count();
            let expected = ((ratio * n as f64).round() as usize).clamp(1, n - 1);
            prop_assert_eq!(train, expected);
        }
        let folds = stratified_folds(&labels, 2, seed).unwrap();
        let mut seen: Vec<usize> = folds.concat();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..labels.len()).collect::<Vec<_>>());
        Ok(())
    })
}

// ---------------------------------------------------------------- corpus

fn documents() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::btree_map(0..500u32, (0..3usize, prop::collection::vec(0..VOCAB.len(), 1..8)), 1..20).prop_map(
        |m| {
            m.into_iter()
                .map(|(id, (cat, ws))| Document::new(format!("c{cat}/d{id}.txt"), format!("c{cat}"), phrase(&ws)))
                .collect()
        },
    )
}

pub fn corpus_load_order_deterministic() -> Result<(), String> {
    let strategy = documents().prop_flat_map(|docs| (Just(docs.clone()), Just(docs).prop_shuffle()));
    run(32, strategy, |(docs, shuffled)| {
        let dir = tempfile::tempdir().map_err(|e| fail(e.to_string()))?;
        for d in &shuffled {
            let path = dir.path().join(&d.id);
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(&path, &d.body).unwrap();
        }
        let a = load_directory_corpus(dir.path()).map_err(|e| fail(e.to_string()))?.corpus;
        let b = load_directory_corpus(dir.path()).map_err(|e| fail(e.to_string()))?.corpus;
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &Corpus::new(docs.clone()));
        prop_assert_eq!(&Corpus::new(shuffled), &Corpus::new(docs));
        let ids: Vec<&str> = a.documents().iter().map(|d| d.id.as_str()).collect();
        prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Ok(())
    })
}

fn ohsumed_records() -> impl Strategy<Value = Vec<(u32, Vec<usize>, Vec<usize>, u32)>> {
    prop::collection::btree_map(
        0..5000u32,
        (prop::collection::vec(0..VOCAB.len(), 0..4), prop::collection::vec(0..VOCAB.len(), 1..8), 0..1000u32),
        1..15,
    )
    .prop_map(|m| m.into_iter().map(|(id, (t, w, mark))| (id, t, w, mark)).collect())
    .prop_shuffle()
}

pub fn corpus_mesh_field_hidden() -> Result<(), String> {
    let table = StopwordTable::bundled();
    run(64, ohsumed_records(), |records| {
        let mut text = String::new();
        let mut labels = BTreeMap::new();
        for (id, title, body, mark) in &records {
            text.push_str(&format!(".I {id}\n"));
            if !title.is_empty() {
                text.push_str(&format!(".T\n{}\n", phrase(title)));
            }
            text.push_str(&format!(".M\nMeshonlyterm{mark}; Heading/qualifier\n.W\n{}\n.A\nAuthor A\n", phrase(body)));
            labels.insert(id.to_string(), format!("cat{}", id % 3));
        }
        let load = load_ohsumed(text.as_bytes(), &labels).map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(load.corpus.len(), records.len());
        let ids: Vec<&str> = load.corpus.documents().iter().map(|d| d.id.as_str()).collect();
        prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        for d in load.corpus.documents() {
            let t = d.text();
            prop_assert!(!t.to_lowercase().contains("meshonlyterm"), "{}", t);
            prop_assert!(d.fields.get("M").is_some_and(|m| m.contains("Meshonlyterm")));
            let tv = to_term_vector(&tokenize(&t), "en", &table, None).unwrap();
            prop_assert!(tv.counts.keys().all(|k| !k.contains("meshonlyterm")));
        }
        Ok(())
    })
}

pub fn corpus_synthetic_ontology_valid() -> Result<(), String> {
    run(16, (small_synthetic(), 0.0..=1.0f64), |(mut spec, coverage)| {
        spec.lexicon_coverage = coverage;
        let a = generate_synthetic_bilingual(&spec).map_err(|e| fail(e.to_string()))?;
        check_ontology(&a.ontology).map_err(fail)?;
        let b = generate_synthetic_bilingual(&spec).unwrap();
        prop_assert_eq!(&a.corpus, &b.corpus);
        prop_assert_eq!(&a.ontology, &b.ontology);
        for d in a.corpus.documents() {
            let lang = detect_language(&tokenize(&d.text()), &a.stopwords).language;
            prop_assert!(d.id.contains(&format!("-{lang}-")), "{} detected as {}", d.id, lang);
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- cli

fn cli(args: &[&str]) -> Result<(), TestCaseError> {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_meshclass"))
        .args(args)
        .output()
        .map_err(|e| fail(e.to_string()))?;
    if out.status.success() {
        Ok(())
    } else {
        Err(fail(format!("meshclass {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))))
    }
}

fn synth_dir(dir: &Path, categories: usize, docs: usize, seed: u64) -> Result<(), TestCaseError> {
    cli(&[
        "synth",
        "--output",
        dir.to_str().unwrap(),
        "--categories",
        &categories.to_string(),
        "--docs-per-language",
        &docs.to_string(),
        "--seed",
        &seed.to_string(),
    ])
}

fn kind_name(kind: ClassifierKind) -> String {
    kind.to_string()
}

pub fn cli_deterministic() -> Result<(), String> {
    let kinds = prop::sample::select(ClassifierKind::ALL.to_vec());
    run(6, (0..1000u64, 2..4usize, 4..7usize, kinds, any::<bool>(), any::<u64>()), |(seed, cats, docs, kind, hyper, eval_seed)| {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        synth_dir(root, cats, docs, seed)?;
        let p = |name: &str| root.join(name).to_string_lossy().into_owned();
        let (corpus, onto, lex) = (p("corpus"), p("ontology.tsv"), p("lexicon.tsv"));
        let kind = kind_name(kind);
        let hyper = if hyper { "on" } else { "off" };
        let common = ["--ontology", &onto, "--lexicon", &lex, "--approach", "translate", "--classifier", &kind, "--hyperonyms", hyper];
        for name in ["m1", "m2"] {
            let model = p(name);
            let mut args = vec!["train", "--corpus", &corpus, "--model", &model];
            args.extend_from_slice(&common);
            cli(&args)?;
        }
        prop_assert_eq!(fs::read(p("m1")).unwrap(), fs::read(p("m2")).unwrap());
        let seed_arg = eval_seed.to_string();
        for (protocol, format) in [("split", "text"), ("kfold", "json")] {
            for name in ["r1", "r2"] {
                let out = p(name);
                let mut args = vec!["evaluate", "--corpus", &corpus, "--protocol", protocol, "--folds", "2"];
                args.extend_from_slice(&["--seed", &seed_arg, "--report-format", format, "--output", &out]);
                args.extend_from_slice(&common);
                cli(&args)?;
            }
            prop_assert_eq!(fs::read(p("r1")).unwrap(), fs::read(p("r2")).unwrap());
        }
        Ok(())
    })
}

fn representation_settings() -> impl Strategy<Value = RepresentationSettings> {
    (
        mapping_strategy(),
        disambiguation(),
        any::<bool>(),
        prop::sample::select(vec![HyperonymMode::Propagate, HyperonymMode::Literal]),
        prop::sample::select(vec![PivotApproach::Translation, PivotApproach::MultilingualOntology]),
    )
        .prop_map(|(mapping, disambiguation, hyperonyms, hyperonym_mode, approach)| RepresentationSettings {
            mapping,
            disambiguation,
            hyperonyms,
            hyperonym_mode,
            approach,
        })
}

pub fn cli_config_round_trip() -> Result<(), String> {
    use meshclass::cli::{PipelineArgs, PipelineConfig};
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path().to_path_buf();
    synth_dir(&root, 2, 4, 7).map_err(|e| e.to_string())?;
    run(12, (representation_settings(), prop::sample::select(vec!["fr", "de"])), |(settings, lang)| {
        let fp = settings.fingerprint();
        prop_assert_eq!(RepresentationSettings::from_fingerprint(&fp).unwrap(), settings);
        let config = PipelineConfig {
            ontology: Some(root.join("ontology.tsv")),
            lexicon: Some(root.join("lexicon.tsv")),
            lexicon_lang: lang.into(),
            settings,
            ..Default::default()
        };
        let back = PipelineConfig::resolve(&PipelineArgs::default(), &config.to_settings()).map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(back.settings, config.settings);
        prop_assert_eq!(&back.lexicon, &config.lexicon);
        prop_assert_eq!(&back.ontology, &config.ontology);
        prop_assert_eq!(&back.lexicon_lang, &config.lexicon_lang);
        // literal hyperonyms over leaf-only documents empty every concept-only
        // representation, leaving nothing to train on
        let empty = settings.mapping == MappingStrategy::ConceptOnly
            && settings.hyperonyms
            && settings.hyperonym_mode == HyperonymMode::Literal;
        if lang == "de" || empty {
            return Ok(());
        }
        // through a config file and a saved model
        let conf = root.join("run.conf");
        let mut text = String::new();
        for (k, v) in config.to_settings() {
            text.push_str(&format!("{k} = {v}\n"));
        }
        fs::write(&conf, text).unwrap();
        let model = root.join("model");
        let corpus = root.join("corpus");
        cli(&["train", "--corpus", corpus.to_str().unwrap(), "--model", model.to_str().unwrap(), "--config", conf.to_str().unwrap()])?;
        let loaded = load_model(std::io::BufReader::new(fs::File::open(&model).unwrap())).unwrap();
        prop_assert_eq!(&loaded.fingerprint, &fp);
        let from_model = PipelineConfig::resolve(&PipelineArgs::default(), &loaded.settings).unwrap();
        prop_assert_eq!(from_model.settings, settings);
        Ok(())
    })
}

/// Every invariant check, by name.
pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("ontology: acyclic, closed, parents from tree numbers", ontology_acyclic_and_closed as Check),
        ("ontology: depth bound enforced", ontology_depth_bound_enforced),
        ("ontology: index completeness and ordering", ontology_index_complete),
        ("ontology: filter soundness", ontology_filter_sound),
        ("ontology: streaming allocation bound", ontology_streaming_bound),
        ("preprocess: permutation invariance", preprocess_permutation_invariant),
        ("preprocess: count conservation", preprocess_count_conservation),
        ("preprocess: tokens normalized, normalization idempotent", preprocess_tokens_normalized),
        ("preprocess: language detection deterministic and total", preprocess_detection_total),
        ("conceptmap: mass accounting", conceptmap_mass_accounting),
        ("conceptmap: enrichment monotonicity", conceptmap_enrichment_monotone),
        ("conceptmap: literal hyperonym formula", conceptmap_literal_formula),
        ("conceptmap: determinism", conceptmap_deterministic),
        ("conceptmap: strategy containment", conceptmap_strategy_containment),
        ("multilingual: pivot closure", multilingual_pivot_closure),
        ("multilingual: alignment equivalence", multilingual_alignment_equivalence),
        ("multilingual: English invariance", multilingual_english_invariance),
        ("model: zero law and vocabulary bijection", model_zero_law),
        ("model: NB normalization", model_nb_normalized),
        ("model: KNN self-consistency", model_knn_self_consistent),
        ("model: AdaBoost T=1 reduces to NB", model_adaboost_reduction),
        ("model: scale argmax invariance", model_scale_invariance),
        ("model: tree sanity", model_tree_sanity),
        ("model: finite ensembles, trees and fingerprint guard", model_fit_sanity),
        ("model: training order invariance", model_order_invariance),
        ("evaluate: F bounds and count consistency", evaluate_f_bounds),
        ("evaluate: relabeling invariance", evaluate_relabel_invariance),
        ("evaluate: joint permutation invariance", evaluate_joint_permutation),
        ("evaluate: stratified split and fold partition", evaluate_split_partition),
        ("corpus: load order determinism", corpus_load_order_deterministic),
        ("corpus: MeSH field never exposed", corpus_mesh_field_hidden),
        ("corpus: synthetic ontology valid and deterministic", corpus_synthetic_ontology_valid),
        ("cli: deterministic train and evaluate", cli_deterministic),
        ("cli: configuration round-trips through the fingerprint", cli_config_round_trip),
    ]
}
