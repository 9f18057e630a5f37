//! End-to-end document handling: detect language, build term vectors, pivot
//! to English concepts, enrich with hyperonyms, then train or classify.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::conceptmap::{
    enrich_with_hyperonyms, ConceptMapError, DisambiguationStrategy, HybridRepresentation, HyperonymMode,
    MappingStrategy,
};
use crate::corpus::Corpus;
use crate::evaluate::{self, EvaluateError, EvaluationReport};
use crate::model::{ClassifierKind, Hyperparameters, ModelError, Prediction, TrainedModel};
use crate::multilingual::{BilingualLexicon, MultilingualError, PivotApproach, Pivoter};
use crate::ontology::Ontology;
use crate::preprocess::{detect_language, to_term_vector, tokenize, PreprocessError, StopwordTable};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Multilingual(#[from] MultilingualError),
    #[error(transparent)]
    ConceptMap(#[from] ConceptMapError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Evaluate(#[from] EvaluateError),
}

/// Choices that shape document representations. Models remember them as a
/// fingerprint and refuse input represented differently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RepresentationSettings {
    pub mapping: MappingStrategy,
    pub disambiguation: DisambiguationStrategy,
    pub hyperonyms: bool,
    pub hyperonym_mode: HyperonymMode,
    pub approach: PivotApproach,
}

impl RepresentationSettings {
    pub fn fingerprint(&self) -> String {
        format!(
            "mapping={};disambiguation={};hyperonyms={};hyperonym-mode={};approach={}",
            self.mapping,
            self.disambiguation,
            if self.hyperonyms { "on" } else { "off" },
            self.hyperonym_mode,
            self.approach
        )
    }

    /// Inverse of [`RepresentationSettings::fingerprint`].
    pub fn from_fingerprint(fingerprint: &str) -> Result<Self, PipelineError> {
        let fields: BTreeMap<&str, &str> = fingerprint.split(';').filter_map(|kv| kv.split_once('=')).collect();
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| PipelineError::Config(format!("fingerprint lacks `{k}`")));
        let parse_err = |e: crate::conceptmap::ParseStrategyError| PipelineError::Config(e.to_string());
        let settings = Self {
            mapping: get("mapping")?.parse().map_err(parse_err)?,
            disambiguation: get("disambiguation")?.parse().map_err(parse_err)?,
            hyperonyms: match get("hyperonyms")? {
                "on" => true,
                "off" => false,
                other => return Err(PipelineError::Config(format!("bad hyperonyms value `{other}`"))),
            },
            hyperonym_mode: get("hyperonym-mode")?.parse().map_err(parse_err)?,
            approach: get("approach")?.parse().map_err(parse_err)?,
        };
        if settings.fingerprint() != fingerprint {
            return Err(PipelineError::Config(format!("unrecognized fingerprint `{fingerprint}`")));
        }
        Ok(settings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Represented {
    pub language: String,
    pub representation: HybridRepresentation,
    /// Source tokens left untranslated by the translation approach.
    pub untranslated: usize,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: TrainedModel,
    /// Ids of training documents whose representation came out empty.
    pub dropped: Vec<String>,
}

pub struct Pipeline {
    ontology: Ontology,
    stopwords: StopwordTable,
    pivoter: Pivoter,
    settings: RepresentationSettings,
}

impl Pipeline {
    pub fn new(
        ontology: Ontology,
        stopwords: StopwordTable,
        lexicons: Vec<BilingualLexicon>,
        settings: RepresentationSettings,
    ) -> Result<Self, PipelineError> {
        if settings.approach == PivotApproach::Translation && lexicons.is_empty() {
            return Err(PipelineError::Config("the translate approach needs a lexicon".into()));
        }
        let pivoter = Pivoter::with_stopwords(&ontology, settings.approach, lexicons, &stopwords, None)?;
        Ok(Self { ontology, stopwords, pivoter, settings })
    }

    pub fn settings(&self) -> RepresentationSettings {
        self.settings
    }

    pub fn fingerprint(&self) -> String {
        self.settings.fingerprint()
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn stopwords(&self) -> &StopwordTable {
        &self.stopwords
    }

    pub fn represent(&self, text: &str) -> Result<Represented, PipelineError> {
        let tokens = tokenize(text);
        let language = detect_language(&tokens, &self.stopwords).language;
        let tv = to_term_vector(&tokens, &language, &self.stopwords, None)?;
        let outcome = self.pivoter.pivot(&tv, self.settings.mapping, self.settings.disambiguation)?;
        let representation = if self.settings.hyperonyms {
            enrich_with_hyperonyms(&outcome.representation, &self.ontology, self.settings.hyperonym_mode)?
        } else {
            outcome.representation
        };
        Ok(Represented { language, representation, untranslated: outcome.untranslated })
    }

    pub fn represent_corpus(&self, corpus: &Corpus) -> Result<Vec<Represented>, PipelineError> {
        corpus.documents().iter().map(|d| self.represent(&d.text())).collect()
    }

    /// Train on a corpus. Documents whose representation is empty carry no
    /// features and are left out, with their ids reported.
    pub fn train(
        &self,
        corpus: &Corpus,
        kind: ClassifierKind,
        hyperparameters: Hyperparameters,
    ) -> Result<TrainOutcome, PipelineError> {
        let represented = self.represent_corpus(corpus)?;
        self.train_represented(corpus, &represented, kind, hyperparameters)
    }

    fn train_represented(
        &self,
        corpus: &Corpus,
        represented: &[Represented],
        kind: ClassifierKind,
        hyperparameters: Hyperparameters,
    ) -> Result<TrainOutcome, PipelineError> {
        let mut reps = Vec::new();
        let mut labels = Vec::new();
        let mut dropped = Vec::new();
        for (doc, r) in corpus.documents().iter().zip(represented) {
            if r.representation.is_empty() {
                log::warn!("training document {} has no features; left out", doc.id);
                dropped.push(doc.id.clone());
            } else {
                reps.push(r.representation.clone());
                labels.push(doc.category.clone());
            }
        }
        let model = TrainedModel::train(&reps, &labels, kind, hyperparameters, &self.fingerprint())?;
        Ok(TrainOutcome { model, dropped })
    }

    pub fn classify(&self, model: &TrainedModel, text: &str) -> Result<Prediction, PipelineError> {
        model.check_fingerprint(&self.fingerprint())?;
        let r = self.represent(text)?;
        Ok(model.classify(&r.representation, &self.fingerprint())?)
    }

    fn score_subset(
        &self,
        corpus: &Corpus,
        represented: &[Represented],
        train: &[usize],
        test: &[usize],
        kind: ClassifierKind,
        hyperparameters: Hyperparameters,
    ) -> Result<EvaluationReport, PipelineError> {
        let pick = |idx: &[usize]| idx.iter().map(|&i| represented[i].clone()).collect::<Vec<_>>();
        let outcome = self.train_represented(&corpus.subset(train), &pick(train), kind, hyperparameters)?;
        let gold: Vec<String> = test.iter().map(|&i| corpus.documents()[i].category.clone()).collect();
        let predicted = test
            .iter()
            .map(|&i| Ok(outcome.model.classify(&represented[i].representation, &self.fingerprint())?.category))
            .collect::<Result<Vec<_>, PipelineError>>()?;
        Ok(evaluate::score(&gold, &predicted, &corpus.categories())?.with_fingerprint(self.fingerprint()))
    }

    /// Train on a stratified share of the corpus and score the rest.
    pub fn evaluate_split(
        &self,
        corpus: &Corpus,
        kind: ClassifierKind,
        hyperparameters: Hyperparameters,
        train_ratio: f64,
        seed: u64,
    ) -> Result<EvaluationReport, PipelineError> {
        let split = evaluate::stratified_split(&corpus.labels(), train_ratio, seed)?;
        let represented = self.represent_corpus(corpus)?;
        self.score_subset(corpus, &represented, &split.train, &split.test, kind, hyperparameters)
    }

    /// One report per stratified fold.
    pub fn cross_validate(
        &self,
        corpus: &Corpus,
        kind: ClassifierKind,
        hyperparameters: Hyperparameters,
        folds: usize,
        seed: u64,
    ) -> Result<Vec<EvaluationReport>, PipelineError> {
        evaluate::stratified_folds(&corpus.labels(), folds, seed)?;
        let represented = self.represent_corpus(corpus)?;
        evaluate::cross_validate(&corpus.labels(), folds, seed, |train, test| {
            self.score_subset(corpus, &represented, train, test, kind, hyperparameters)
        })
    }
}
