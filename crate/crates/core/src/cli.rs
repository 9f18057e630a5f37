//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 data error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::conceptmap::{DisambiguationStrategy, HyperonymMode, MappingStrategy};
use crate::corpus::{
    generate_synthetic_bilingual, load_directory_corpus, load_label_sidecar, load_ohsumed, Corpus, CorpusError,
    SyntheticSpec,
};
use crate::evaluate::{mean_macro, EvaluateError, EvaluationReport};
use crate::model::{load_model, save_model, ClassifierKind, Hyperparameters, ModelError, TrainedModel};
use crate::multilingual::{BilingualLexicon, MultilingualError, PivotApproach};
use crate::ontology::{
    ingest_ontology_xml, load_ontology_tabular, load_ontology_xml, write_ontology_tabular, IngestOptions, Ontology,
    OntologyError, DEFAULT_MAX_DEPTH,
};
use crate::pipeline::{Pipeline, PipelineError, RepresentationSettings};
use crate::preprocess::{detect_language, tokenize, PreprocessError, StopwordTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn config(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(_) => config(e),
            PipelineError::Model(ModelError::InvalidHyperparameter(_) | ModelError::FingerprintMismatch { .. }) => {
                config(e)
            }
            PipelineError::Multilingual(MultilingualError::MissingLexicon(_)) => config(e),
            PipelineError::Evaluate(EvaluateError::InvalidRatio(_) | EvaluateError::InvalidFolds(_)) => config(e),
            _ => data(e),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        PipelineError::Model(e).into()
    }
}

impl From<OntologyError> for CliError {
    fn from(e: OntologyError) -> Self {
        data(e)
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::InvalidSpec(_) => config(e),
            _ => data(e),
        }
    }
}

impl From<PreprocessError> for CliError {
    fn from(e: PreprocessError) -> Self {
        data(e)
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| data(format!("{}: {e}", path.display())))
}

#[derive(Debug, Parser)]
#[command(name = "meshclass", version, about = "Classify English and French medical documents through MeSH-style concepts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model on a labeled corpus.
    Train {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Where to write the model.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        options: PipelineArgs,
    },
    /// Classify documents with a trained model.
    Classify {
        #[arg(long)]
        model: PathBuf,
        /// Files or directories of documents.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        options: PipelineArgs,
    },
    /// Evaluate a configuration on a labeled corpus.
    Evaluate {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_enum, default_value_t = Protocol::Split)]
        protocol: Protocol,
        /// Training share for the split protocol.
        #[arg(long, default_value_t = 0.8)]
        ratio: f64,
        /// Number of folds for the k-fold protocol.
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Run every approach, hyperonym setting and classifier combination.
        #[arg(long)]
        grid: bool,
        /// Write the report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        options: PipelineArgs,
    },
    /// Print the detected language of each document.
    DetectLang {
        #[arg(long)]
        stopwords_dir: Option<PathBuf>,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Convert descriptor XML to the tabular ontology format.
    IngestOntology {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Keep only descriptors with a tree number starting with this prefix.
        #[arg(long)]
        filter_prefix: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Write a synthetic bilingual corpus with its ontology and lexicon.
    Synth {
        /// Output directory; receives `corpus/`, `ontology.tsv` and `lexicon.tsv`.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 8)]
        categories: usize,
        #[arg(long, default_value_t = 50)]
        docs_per_language: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        lexicon_coverage: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Split,
    Kfold,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Directory with one subdirectory per category, or an Ohsumed file.
    #[arg(long)]
    pub corpus: PathBuf,
    /// `doc_id<TAB>category` labels for an Ohsumed file.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OntologyFormat {
    Tabular,
    Xml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

/// Options shared by the pipeline commands. Each may also come from a
/// `key = value` config file, using the flag name as key; flags win.
#[derive(Debug, Default, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub ontology: Option<PathBuf>,
    /// Defaults to xml for `.xml` files, tabular otherwise.
    #[arg(long, value_enum)]
    pub ontology_format: Option<OntologyFormat>,
    #[arg(long)]
    pub stopwords_dir: Option<PathBuf>,
    /// add | replace | concept-only
    #[arg(long)]
    pub mapping: Option<MappingStrategy>,
    /// all | first
    #[arg(long)]
    pub disambiguation: Option<DisambiguationStrategy>,
    #[arg(long, value_enum)]
    pub hyperonyms: Option<Switch>,
    /// propagate | literal
    #[arg(long)]
    pub hyperonym_mode: Option<HyperonymMode>,
    /// translate | multi-onto
    #[arg(long)]
    pub approach: Option<PivotApproach>,
    /// Bilingual lexicon TSV (`source<TAB>target[|alternative...]`).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Source language of the lexicon.
    #[arg(long)]
    pub lexicon_lang: Option<String>,
    /// knn | nb | adaboost-nb | tree
    #[arg(long)]
    pub classifier: Option<ClassifierKind>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_leaf: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub report_format: Option<ReportFormat>,
}

const CONFIG_KEYS: [&str; 18] = [
    "ontology",
    "ontology-format",
    "stopwords-dir",
    "mapping",
    "disambiguation",
    "hyperonyms",
    "hyperonym-mode",
    "approach",
    "lexicon",
    "lexicon-lang",
    "classifier",
    "k",
    "rounds",
    "alpha",
    "max-depth",
    "min-leaf",
    "seed",
    "report-format",
];

/// Parse `key = value` lines; `#` starts a comment line.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config(format!("config line {}: expected `key = value`", n + 1)))?;
        let k = k.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&k.as_str()) {
            return Err(config(format!("config line {}: unknown key `{k}`", n + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

/// Fully resolved pipeline options.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub ontology: Option<PathBuf>,
    pub ontology_format: OntologyFormat,
    pub stopwords_dir: Option<PathBuf>,
    pub settings: RepresentationSettings,
    pub lexicon: Option<PathBuf>,
    pub lexicon_lang: String,
    pub classifier: ClassifierKind,
    pub hyperparameters: Hyperparameters,
    pub seed: u64,
    pub report_format: ReportFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            ontology: None,
            ontology_format: OntologyFormat::Tabular,
            stopwords_dir: None,
            settings: RepresentationSettings::default(),
            lexicon: None,
            lexicon_lang: "fr".into(),
            classifier: ClassifierKind::default(),
            hyperparameters: Hyperparameters::default(),
            seed: 42,
            report_format: ReportFormat::Text,
        }
    }
}

fn value_enum<T: ValueEnum>(s: &str) -> Result<T, String> {
    T::from_str(s, true)
}

fn parsed<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

impl PipelineConfig {
    /// Layer: defaults, then `base` (e.g. settings stored in a model), then
    /// the config file, then flags.
    pub fn resolve(args: &PipelineArgs, base: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut values = base.clone();
        if let Some(path) = &args.config {
            let text = fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
            values.extend(parse_config_file(&text)?);
        }
        let mut c = PipelineConfig::default();
        let mut format_given = false;
        for (key, v) in &values {
            let result: Result<(), String> = (|| {
                match key.as_str() {
                    "ontology" => c.ontology = Some(PathBuf::from(v)),
                    "ontology-format" => {
                        c.ontology_format = value_enum(v)?;
                        format_given = true;
                    }
                    "stopwords-dir" => c.stopwords_dir = Some(PathBuf::from(v)),
                    "mapping" => c.settings.mapping = parsed(v)?,
                    "disambiguation" => c.settings.disambiguation = parsed(v)?,
                    "hyperonyms" => c.settings.hyperonyms = value_enum::<Switch>(v)? == Switch::On,
                    "hyperonym-mode" => c.settings.hyperonym_mode = parsed(v)?,
                    "approach" => c.settings.approach = parsed(v)?,
                    "lexicon" => c.lexicon = Some(PathBuf::from(v)),
                    "lexicon-lang" => c.lexicon_lang = v.clone(),
                    "classifier" => c.classifier = parsed(v)?,
                    "k" => c.hyperparameters.k = parsed(v)?,
                    "rounds" => c.hyperparameters.rounds = parsed(v)?,
                    "alpha" => c.hyperparameters.alpha = parsed(v)?,
                    "max-depth" => c.hyperparameters.max_depth = parsed(v)?,
                    "min-leaf" => c.hyperparameters.min_leaf = parsed(v)?,
                    "seed" => c.seed = parsed(v)?,
                    "report-format" => c.report_format = value_enum(v)?,
                    other => return Err(format!("unknown setting `{other}`")),
                }
                Ok(())
            })();
            result.map_err(|e| config(format!("{key}: {e}")))?;
        }
        if let Some(v) = &args.ontology {
            c.ontology = Some(v.clone());
        }
        if let Some(v) = args.ontology_format {
            c.ontology_format = v;
            format_given = true;
        }
        if !format_given {
            let is_xml = c.ontology.as_ref().and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case("xml"));
            c.ontology_format = if is_xml { OntologyFormat::Xml } else { OntologyFormat::Tabular };
        }
        if let Some(v) = &args.stopwords_dir {
            c.stopwords_dir = Some(v.clone());
        }
        if let Some(v) = args.mapping {
            c.settings.mapping = v;
        }
        if let Some(v) = args.disambiguation {
            c.settings.disambiguation = v;
        }
        if let Some(v) = args.hyperonyms {
            c.settings.hyperonyms = v == Switch::On;
        }
        if let Some(v) = args.hyperonym_mode {
            c.settings.hyperonym_mode = v;
        }
        if let Some(v) = args.approach {
            c.settings.approach = v;
        }
        if let Some(v) = &args.lexicon {
            c.lexicon = Some(v.clone());
        }
        if let Some(v) = &args.lexicon_lang {
            c.lexicon_lang = v.clone();
        }
        if let Some(v) = args.classifier {
            c.classifier = v;
        }
        let h = &mut c.hyperparameters;
        h.k = args.k.unwrap_or(h.k);
        h.rounds = args.rounds.unwrap_or(h.rounds);
        h.alpha = args.alpha.unwrap_or(h.alpha);
        h.max_depth = args.max_depth.unwrap_or(h.max_depth);
        h.min_leaf = args.min_leaf.unwrap_or(h.min_leaf);
        c.seed = args.seed.unwrap_or(c.seed);
        c.report_format = args.report_format.unwrap_or(c.report_format);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.settings.approach == PivotApproach::Translation && self.lexicon.is_none() {
            return Err(config("--approach translate needs --lexicon"));
        }
        self.hyperparameters.validate().map_err(config)
    }

    /// Key/value form stored in model files so `classify` can rebuild the
    /// same pipeline.
    pub fn to_settings(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let path = |p: &Path| p.to_string_lossy().into_owned();
        if let Some(p) = &self.ontology {
            m.insert("ontology".into(), path(p));
        }
        let format = match self.ontology_format {
            OntologyFormat::Tabular => "tabular",
            OntologyFormat::Xml => "xml",
        };
        m.insert("ontology-format".into(), format.into());
        if let Some(p) = &self.stopwords_dir {
            m.insert("stopwords-dir".into(), path(p));
        }
        m.insert("mapping".into(), self.settings.mapping.to_string());
        m.insert("disambiguation".into(), self.settings.disambiguation.to_string());
        m.insert("hyperonyms".into(), if self.settings.hyperonyms { "on" } else { "off" }.into());
        m.insert("hyperonym-mode".into(), self.settings.hyperonym_mode.to_string());
        m.insert("approach".into(), self.settings.approach.to_string());
        if let Some(p) = &self.lexicon {
            m.insert("lexicon".into(), path(p));
        }
        m.insert("lexicon-lang".into(), self.lexicon_lang.clone());
        m
    }

    fn load_ontology(&self) -> Result<Ontology, CliError> {
        let Some(path) = &self.ontology else {
            log::warn!("no ontology given; documents are represented by terms only");
            return Ok(Ontology::empty());
        };
        let reader = open(path)?;
        let onto = match self.ontology_format {
            OntologyFormat::Xml => load_ontology_xml(reader, None),
            OntologyFormat::Tabular => load_ontology_tabular(reader),
        };
        onto.map_err(|e| data(format!("{}: {e}", path.display())))
    }

    fn load_stopwords(&self) -> Result<StopwordTable, CliError> {
        match &self.stopwords_dir {
            Some(dir) => Ok(StopwordTable::from_dir(dir)?),
            None => Ok(StopwordTable::bundled()),
        }
    }

    fn load_lexicons(&self) -> Result<Vec<BilingualLexicon>, CliError> {
        let Some(path) = &self.lexicon else { return Ok(Vec::new()) };
        let lex = BilingualLexicon::load_tsv(open(path)?, &self.lexicon_lang)
            .map_err(|e| data(format!("{}: {e}", path.display())))?;
        Ok(vec![lex])
    }

    pub fn pipeline(&self) -> Result<Pipeline, CliError> {
        let pipeline = Pipeline::new(self.load_ontology()?, self.load_stopwords()?, self.load_lexicons()?, self.settings)?;
        Ok(pipeline)
    }
}

fn load_corpus(args: &CorpusArgs) -> Result<Corpus, CliError> {
    if args.corpus.is_dir() {
        let load = load_directory_corpus(&args.corpus)?;
        if !load.ignored_dirs.is_empty() {
            eprintln!("warning: ignored {} nested directories", load.ignored_dirs.len());
        }
        return Ok(load.corpus);
    }
    let labels_path = args.labels.as_ref().ok_or_else(|| config("an Ohsumed corpus file needs --labels"))?;
    let labels = load_label_sidecar(open(labels_path)?)?;
    let load = load_ohsumed(open(&args.corpus)?, &labels)?;
    if load.skipped_empty > 0 {
        eprintln!("warning: skipped {} records without title or abstract", load.skipped_empty);
    }
    Ok(load.corpus)
}

/// Documents named on the command line: files as given, directories walked
/// recursively with ids relative to the directory. Sorted by id.
fn read_inputs(inputs: &[PathBuf]) -> Result<Vec<(String, String)>, CliError> {
    fn walk(dir: &Path, prefix: &str, out: &mut Vec<(String, PathBuf)>) -> Result<(), CliError> {
        let entries = fs::read_dir(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
        for entry in entries {
            let path = entry.map_err(|e| data(format!("{}: {e}", dir.display())))?.path();
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            let id = if prefix.is_empty() { name } else { format!("{prefix}/{name}") };
            if path.is_dir() {
                walk(&path, &id, out)?;
            } else {
                out.push((id, path));
            }
        }
        Ok(())
    }
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            walk(input, "", &mut files)?;
        } else {
            files.push((input.to_string_lossy().into_owned(), input.clone()));
        }
    }
    files.sort();
    files
        .into_iter()
        .map(|(id, path)| {
            let text = fs::read_to_string(&path).map_err(|e| data(format!("{}: {e}", path.display())))?;
            Ok((id, text))
        })
        .collect()
}

fn cmd_train(corpus: &CorpusArgs, model_path: &Path, options: &PipelineArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig::resolve(options, &BTreeMap::new())?;
    let corpus = load_corpus(corpus)?;
    let pipeline = cfg.pipeline()?;
    let outcome = pipeline.train(&corpus, cfg.classifier, cfg.hyperparameters)?;
    if !outcome.dropped.is_empty() {
        eprintln!("warning: {} training documents had no features and were left out", outcome.dropped.len());
    }
    let model = outcome.model.with_settings(cfg.to_settings());
    let mut out = create(model_path)?;
    save_model(&model, &mut out)?;
    out.flush().map_err(data)?;
    for (category, n) in corpus.counts() {
        println!("{category}\t{n}");
    }
    println!("documents\t{}", corpus.len());
    println!("vocabulary\t{}", model.features.len());
    println!("classifier\t{}", model.kind().label());
    Ok(())
}

fn cmd_classify(model_path: &Path, inputs: &[PathBuf], options: &PipelineArgs) -> Result<(), CliError> {
    let model: TrainedModel = load_model(open(model_path)?)?;
    let cfg = PipelineConfig::resolve(options, &model.settings)?;
    let pipeline = cfg.pipeline()?;
    model.check_fingerprint(&pipeline.fingerprint())?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (id, text) in read_inputs(inputs)? {
        let p = pipeline.classify(&model, &text)?;
        if p.fallback {
            eprintln!("warning: {id}: no known features; assigned default category");
        }
        match writeln!(out, "{id}\t{}\t{:.6}", p.category, p.score) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => return Ok(()),
            other => other.map_err(data)?,
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GridRow {
    approach: String,
    hyperonyms: bool,
    classifier: String,
    macro_precision: f64,
    macro_recall: f64,
    macro_f: f64,
}

#[derive(Serialize)]
struct FoldSummary<'a> {
    folds: &'a [EvaluationReport],
    mean_macro_precision: f64,
    mean_macro_recall: f64,
    mean_macro_f: f64,
}

const GRID_CLASSIFIERS: [ClassifierKind; 3] = [ClassifierKind::NaiveBayes, ClassifierKind::Knn, ClassifierKind::AdaBoostNb];

fn run_protocol(
    pipeline: &Pipeline,
    corpus: &Corpus,
    cfg: &PipelineConfig,
    kind: ClassifierKind,
    protocol: Protocol,
    ratio: f64,
    folds: usize,
) -> Result<Vec<EvaluationReport>, CliError> {
    Ok(match protocol {
        Protocol::Split => vec![pipeline.evaluate_split(corpus, kind, cfg.hyperparameters, ratio, cfg.seed)?],
        Protocol::Kfold => pipeline.cross_validate(corpus, kind, cfg.hyperparameters, folds, cfg.seed)?,
    })
}

pub fn render_evaluation(reports: &[EvaluationReport], format: ReportFormat) -> String {
    let (p, r, f) = mean_macro(reports);
    match (format, reports) {
        (ReportFormat::Text, [single]) => single.render_text(),
        (ReportFormat::Json, [single]) => single.to_json() + "\n",
        (ReportFormat::Text, _) => {
            let mut out = String::new();
            for (i, rep) in reports.iter().enumerate() {
                writeln!(out, "fold {}", i + 1).unwrap();
                out.push_str(&rep.render_text());
                out.push('\n');
            }
            writeln!(out, "mean over {} folds: precision {p:.4}  recall {r:.4}  f-measure {f:.4}", reports.len()).unwrap();
            out
        }
        (ReportFormat::Json, _) => {
            let summary =
                FoldSummary { folds: reports, mean_macro_precision: p, mean_macro_recall: r, mean_macro_f: f };
            serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"
        }
    }
}

fn render_grid(rows: &[GridRow], format: ReportFormat) -> String {
    if format == ReportFormat::Json {
        return serde_json::to_string_pretty(rows).expect("grid serializes") + "\n";
    }
    let mut out = String::new();
    write!(out, "{:<12}  {:<10}", "approach", "hyperonyms").unwrap();
    for kind in GRID_CLASSIFIERS {
        write!(out, "  {:>14}", kind.label()).unwrap();
    }
    out.push('\n');
    for chunk in rows.chunks(GRID_CLASSIFIERS.len()) {
        let first = &chunk[0];
        write!(out, "{:<12}  {:<10}", first.approach, if first.hyperonyms { "on" } else { "off" }).unwrap();
        for row in chunk {
            write!(out, "  {:>14.4}", row.macro_f).unwrap();
        }
        out.push('\n');
    }
    out.push_str("values are macro-averaged f-measures\n");
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    corpus: &CorpusArgs,
    protocol: Protocol,
    ratio: f64,
    folds: usize,
    grid: bool,
    output: Option<&Path>,
    options: &PipelineArgs,
) -> Result<(), CliError> {
    let cfg = PipelineConfig::resolve(options, &BTreeMap::new())?;
    let corpus = load_corpus(corpus)?;
    let text = if grid {
        let mut rows = Vec::new();
        for approach in [PivotApproach::Translation, PivotApproach::MultilingualOntology] {
            for hyperonyms in [false, true] {
                let mut c = cfg.clone();
                c.settings.approach = approach;
                c.settings.hyperonyms = hyperonyms;
                c.validate()?;
                let pipeline = c.pipeline()?;
                for kind in GRID_CLASSIFIERS {
                    let reports = run_protocol(&pipeline, &corpus, &c, kind, protocol, ratio, folds)?;
                    let (p, r, f) = mean_macro(&reports);
                    rows.push(GridRow {
                        approach: approach.to_string(),
                        hyperonyms,
                        classifier: kind.label().to_string(),
                        macro_precision: p,
                        macro_recall: r,
                        macro_f: f,
                    });
                }
            }
        }
        render_grid(&rows, cfg.report_format)
    } else {
        let pipeline = cfg.pipeline()?;
        let reports = run_protocol(&pipeline, &corpus, &cfg, cfg.classifier, protocol, ratio, folds)?;
        render_evaluation(&reports, cfg.report_format)
    };
    match output {
        Some(path) => fs::write(path, text).map_err(|e| data(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_detect_lang(stopwords_dir: Option<&Path>, inputs: &[PathBuf]) -> Result<(), CliError> {
    let table = match stopwords_dir {
        Some(dir) => StopwordTable::from_dir(dir)?,
        None => StopwordTable::bundled(),
    };
    for (id, text) in read_inputs(inputs)? {
        let guess = detect_language(&tokenize(&text), &table);
        let scores: Vec<String> = guess.scores.iter().map(|(l, s)| format!("{l}={s:.4}")).collect();
        println!("{id}\t{}\t{}", guess.language, scores.join(","));
    }
    Ok(())
}

fn cmd_ingest(input: &Path, output: &Path, filter_prefix: Option<&str>, max_depth: usize) -> Result<(), CliError> {
    let options = IngestOptions { filter_prefix: filter_prefix.map(str::to_string), max_depth };
    let ingested = ingest_ontology_xml(open(input)?, &options).map_err(|e| data(format!("{}: {e}", input.display())))?;
    let mut out = create(output)?;
    write_ontology_tabular(&ingested.ontology, &mut out)?;
    out.flush().map_err(data)?;
    let s = &ingested.stats;
    println!("records_seen\t{}", s.records_seen);
    println!("records_retained\t{}", s.records_retained);
    println!("records_allocated\t{}", s.records_allocated);
    println!("bytes_read\t{}", s.bytes_read);
    Ok(())
}

fn cmd_synth(output: &Path, spec: &SyntheticSpec) -> Result<(), CliError> {
    let s = generate_synthetic_bilingual(spec)?;
    let corpus_dir = output.join("corpus");
    fs::create_dir_all(&corpus_dir).map_err(|e| data(format!("{}: {e}", corpus_dir.display())))?;
    s.corpus.write_directory(&corpus_dir)?;
    let mut onto = create(&output.join("ontology.tsv"))?;
    write_ontology_tabular(&s.ontology, &mut onto)?;
    onto.flush().map_err(data)?;
    let mut lex = create(&output.join("lexicon.tsv"))?;
    s.lexicon.write_tsv(&mut lex).map_err(data)?;
    lex.flush().map_err(data)?;
    println!("documents\t{}", s.corpus.len());
    println!("concepts\t{}", s.ontology.len());
    println!("lexicon_entries\t{}", s.lexicon.len());
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { corpus, model, options } => cmd_train(&corpus, &model, &options),
        Command::Classify { model, inputs, options } => cmd_classify(&model, &inputs, &options),
        Command::Evaluate { corpus, protocol, ratio, folds, grid, output, options } => {
            cmd_evaluate(&corpus, protocol, ratio, folds, grid, output.as_deref(), &options)
        }
        Command::DetectLang { stopwords_dir, inputs } => cmd_detect_lang(stopwords_dir.as_deref(), &inputs),
        Command::IngestOntology { input, output, filter_prefix, max_depth } => {
            cmd_ingest(&input, &output, filter_prefix.as_deref(), max_depth)
        }
        Command::Synth { output, categories, docs_per_language, seed, lexicon_coverage } => {
            let spec = SyntheticSpec { categories, docs_per_language, seed, lexicon_coverage, ..SyntheticSpec::default() };
            cmd_synth(&output, &spec)
        }
    }
}

/// Parse arguments, run, and map errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
