//! Configuration-driven orchestration with cached, hash-stamped stage artifacts.
//!
//! Artifacts in the output directory:
//!
//! | file | producer |
//! |------|----------|
//! | `triples.csv` | `extract` |
//! | `graph.json` | `graph build` |
//! | `embeddings.csv` (+ `embeddings.config.json`) | `embed` |
//! | `model.json` | `train` |
//! | `report.json`, `histogram.csv` (+ `folds.csv` for cv) | `eval` / `cv` / `run` |
//!
//! Each artifact has a `<name>.meta.json` sidecar recording the stage, the
//! hash of every configuration value and input the stage depends on, and the
//! seed. A cached artifact is reused only when its recorded hash matches.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::baselines::{self, Representation, TextVectorizer, Word2VecConfig};
use crate::classify::{self, ClassifierConfig, ClassifierKind, TrainedModel};
use crate::corpus::{self, CorpusStats, ReviewRecord};
use crate::error::{Error, Result};
use crate::evaluate::{self, Metrics};
use crate::extraction::{self, TermFilter, Triple};
use crate::features::{self, FeatureMatrix, FeatureMode, Sampling, Scaler};
use crate::kgraph::{ExportFormat, KnowledgeGraph, SentimentAggregate};
use crate::node2vec::{self, EmbeddingTable, WalkConfig};
use crate::resources;
use crate::rng;
use crate::sentiment::Lexicon;
use crate::textprep::{self, TokenList};

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineKind {
    /// Text representation (BoW, TF-IDF, Word2Vec) plus classifier.
    Baseline,
    /// Triples -> knowledge graph -> node embeddings + sentiment aggregates -> classifier.
    #[default]
    #[serde(alias = "graph", alias = "review-graph")]
    Reviewgraph,
    /// TF-IDF + logistic regression trained on a small random subset.
    SubsetBaseline,
}

impl PipelineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PipelineKind::Baseline => "baseline",
            PipelineKind::Reviewgraph => "reviewgraph",
            PipelineKind::SubsetBaseline => "subset-baseline",
        }
    }
}

impl FromStr for PipelineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(PipelineKind::Baseline),
            "reviewgraph" | "review-graph" | "graph" => Ok(PipelineKind::Reviewgraph),
            "subset-baseline" | "subset" => Ok(PipelineKind::SubsetBaseline),
            other => Err(Error::input(format!("unknown pipeline `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    #[default]
    Split,
    Cv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub mode: EvalMode,
    pub test_fraction: f64,
    pub k: usize,
    pub stratified: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            mode: EvalMode::Split,
            test_fraction: 0.2,
            k: 10,
            stratified: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Number of valid reviews to read; 0 reads everything.
    pub limit: usize,
    pub pipeline: PipelineKind,
    /// Defaults to node2vec for the graph pipeline and tfidf otherwise.
    pub representation: Option<Representation>,
    pub feature_mode: FeatureMode,
    /// Append the review-level compound sentiment as a column (baseline pipeline).
    pub review_sentiment: bool,
    pub sampling: Sampling,
    pub classifier: ClassifierKind,
    pub classifier_params: ClassifierConfig,
    /// Walk and embedding settings; its `seed` is overridden by the run seed.
    pub walk: WalkConfig,
    pub word2vec: Word2VecConfig,
    pub term_filter: TermFilter,
    pub evaluation: EvalConfig,
    pub subset_size: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::from("reviews.jsonl"),
            limit: 10_000,
            pipeline: PipelineKind::Reviewgraph,
            representation: None,
            feature_mode: FeatureMode::N2vAvg,
            review_sentiment: false,
            sampling: Sampling::None,
            classifier: ClassifierKind::RandomForest,
            classifier_params: ClassifierConfig::default(),
            walk: WalkConfig::default(),
            word2vec: Word2VecConfig::default(),
            term_filter: TermFilter::default(),
            evaluation: EvalConfig::default(),
            subset_size: 2000,
            seed: 42,
            out_dir: PathBuf::from("runs/default"),
        }
    }
}

impl RunConfig {
    pub fn representation(&self) -> Representation {
        self.representation.unwrap_or(match self.pipeline {
            PipelineKind::Reviewgraph => Representation::Node2vec,
            _ => Representation::Tfidf,
        })
    }

    pub fn walk_config(&self) -> WalkConfig {
        WalkConfig {
            seed: self.seed,
            ..self.walk.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let repr = self.representation();
        match self.pipeline {
            PipelineKind::Reviewgraph if repr != Representation::Node2vec => {
                return Err(Error::domain(format!("the reviewgraph pipeline uses node2vec, not {repr}")));
            }
            PipelineKind::Baseline if repr == Representation::Node2vec => {
                return Err(Error::domain("the baseline pipeline needs bow, tfidf or word2vec"));
            }
            _ => {}
        }
        self.walk_config().validate()?;
        let e = &self.evaluation;
        if !(e.test_fraction > 0.0 && e.test_fraction < 1.0) {
            return Err(Error::domain(format!("test_fraction must be in (0, 1), got {}", e.test_fraction)));
        }
        if e.k < 2 {
            return Err(Error::domain("k must be at least 2"));
        }
        if self.pipeline == PipelineKind::SubsetBaseline && self.subset_size == 0 {
            return Err(Error::domain("subset_size must be positive"));
        }
        Ok(())
    }

    /// The configuration as echoed into reports: everything except the output location.
    pub fn echo(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("config serialises");
        if let Value::Object(m) = &mut v {
            m.remove("out_dir");
        }
        v
    }
}

/// Hex SHA-256 of the canonical (key-sorted, compact) JSON form of `v`.
pub fn config_hash<T: Serialize>(v: &T) -> Result<String> {
    let canonical = serde_json::to_string(&serde_json::to_value(v)?)?;
    Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactMeta {
    pub stage: String,
    pub config_hash: String,
    pub seed: u64,
    #[serde(default)]
    pub counts: Value,
}

fn meta_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    artifact.with_file_name(name)
}

fn write_json_file<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, v)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// How a stage treats an artifact already on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CachePolicy {
    /// Reuse a matching artifact, otherwise compute and write it.
    Reuse,
    /// Reuse a matching artifact, otherwise fail naming the producing subcommand.
    Require,
    /// Always recompute and overwrite.
    Refresh,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub records: Vec<ReviewRecord>,
    pub skipped: usize,
    /// Hash of the loaded records; changes whenever the effective input changes.
    pub digest: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractCounts {
    pub reviews: usize,
    pub reviews_with_triples: usize,
    pub extracted: usize,
    pub dropped_empty: usize,
    pub dropped_length: usize,
    pub kept: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    pub config_hash: String,
    pub seed: u64,
    pub vectorizer: Option<TextVectorizer>,
    pub scaler: Option<Scaler>,
    pub model: TrainedModel,
    pub feature_names: Vec<String>,
    pub train_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
}

impl ModelBundle {
    pub fn load(path: &Path) -> Result<Self> {
        let mut b: Self = read_json_file(path)?;
        if b.format_version != BUNDLE_FORMAT_VERSION {
            return Err(Error::input(format!("unsupported model bundle version {}", b.format_version)));
        }
        if let Some(v) = &mut b.vectorizer {
            v.reindex();
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config_hash: String,
    pub seed: u64,
    /// `split`, `cv` or `subset`.
    pub evaluation: String,
    /// Held-out metrics; the mean over folds for cross-validation.
    pub metrics: Metrics,
    pub histogram: BTreeMap<u8, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folds: Option<Vec<Metrics>>,
    /// Most-frequent classifier on the same training data, for reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dummy: Option<Metrics>,
    /// Per-stage counts that localise where a run diverges.
    pub counts: BTreeMap<String, Value>,
    pub config: Value,
}

/// Model inputs before any split-dependent fitting.
enum Inputs {
    /// Graph features are fixed per review and only need row selection.
    Matrix(FeatureMatrix),
    /// Text documents still need a vectoriser fitted on the training rows.
    Docs {
        reviews: Vec<ReviewRecord>,
        docs: Vec<TokenList>,
        sentiment: Option<Vec<f64>>,
    },
}

impl Inputs {
    fn labels(&self) -> Vec<u8> {
        match self {
            Inputs::Matrix(m) => m.labels.clone(),
            Inputs::Docs { reviews, .. } => reviews.iter().map(|r| r.rating).collect(),
        }
    }
}

/// Everything fitted on one training split.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldFit {
    pub vectorizer: Option<TextVectorizer>,
    pub scaler: Option<Scaler>,
    pub model: TrainedModel,
    pub dummy: TrainedModel,
    pub feature_names: Vec<String>,
    /// Review ids of the training rows after resampling, in order.
    pub sampled_ids: Vec<usize>,
    pub train_counts: BTreeMap<u8, usize>,
}

pub struct Pipeline {
    cfg: RunConfig,
    lexicon: &'static Lexicon,
}

impl Pipeline {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            lexicon: Lexicon::bundled(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.cfg.out_dir.join(name)
    }

    fn ensure_out_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.cfg.out_dir).map_err(|e| Error::io(&self.cfg.out_dir, e))
    }

    fn fresh_meta(&self, artifact: &Path, hash: &str) -> Option<ArtifactMeta> {
        if !artifact.exists() {
            return None;
        }
        let meta: ArtifactMeta = read_json_file(&meta_path(artifact)).ok()?;
        (meta.config_hash == hash).then_some(meta)
    }

    fn check_cached(&self, artifact: &Path, hash: &str, policy: CachePolicy, producer: &str) -> Result<Option<ArtifactMeta>> {
        if policy == CachePolicy::Refresh {
            return Ok(None);
        }
        match self.fresh_meta(artifact, hash) {
            Some(m) => Ok(Some(m)),
            None if policy == CachePolicy::Require => Err(Error::MissingArtifact {
                path: artifact.to_path_buf(),
                producer: producer.to_string(),
                reason: if artifact.exists() { "stale" } else { "missing" }.to_string(),
            }),
            None => Ok(None),
        }
    }

    fn write_meta(&self, artifact: &Path, stage: &str, hash: &str, counts: Value) -> Result<()> {
        let meta = ArtifactMeta {
            stage: stage.to_string(),
            config_hash: hash.to_string(),
            seed: self.cfg.seed,
            counts,
        };
        write_json_file(&meta_path(artifact), &meta)
    }

    // -- hashes -------------------------------------------------------------

    fn hash_triples(&self, c: &Corpus) -> Result<String> {
        config_hash(&json!({
            "stage": "extract",
            "input": c.digest,
            "term_filter": self.cfg.term_filter,
            "seed": self.cfg.seed,
        }))
    }

    fn hash_graph(&self, c: &Corpus) -> Result<String> {
        config_hash(&json!({ "stage": "graph", "upstream": self.hash_triples(c)? }))
    }

    fn hash_embeddings(&self, c: &Corpus) -> Result<String> {
        config_hash(&json!({
            "stage": "embed",
            "upstream": self.hash_graph(c)?,
            "walk": self.cfg.walk_config(),
        }))
    }

    /// Hash of everything a trained model and its report depend on.
    pub fn run_hash(&self, c: &Corpus) -> Result<String> {
        let mut cfg = self.cfg.echo();
        if let Value::Object(m) = &mut cfg {
            m.remove("input");
        }
        config_hash(&json!({ "stage": "model", "input": c.digest, "config": cfg }))
    }

    // -- stages -------------------------------------------------------------

    pub fn load_corpus(&self) -> Result<Corpus> {
        let inner = || -> Result<Corpus> {
            let loaded = corpus::load_reviews(&self.cfg.input, self.cfg.limit)?;
            if loaded.records.is_empty() {
                return Err(Error::input(format!("{} contains no valid reviews", self.cfg.input.display())));
            }
            let digest = config_hash(&loaded.records)?;
            Ok(Corpus {
                records: loaded.records,
                skipped: loaded.skipped,
                digest,
            })
        };
        inner().map_err(|e| e.in_stage("ingest"))
    }

    /// Corpus statistics, also written to `stats.json`.
    pub fn stats(&self, c: &Corpus) -> Result<CorpusStats> {
        let inner = || -> Result<CorpusStats> {
            let stats = corpus::corpus_stats(&c.records)?;
            self.ensure_out_dir()?;
            let path = self.artifact("stats.json");
            write_json_file(&path, &stats)?;
            let hash = config_hash(&json!({ "stage": "stats", "input": c.digest }))?;
            self.write_meta(&path, "stats", &hash, json!({ "skipped_lines": c.skipped }))?;
            Ok(stats)
        };
        inner().map_err(|e| e.in_stage("stats"))
    }

    /// Export the built graph (which must be current) in another format.
    pub fn export_graph(&self, c: &Corpus, format: ExportFormat) -> Result<Vec<PathBuf>> {
        let g = self.graph(c, None, CachePolicy::Require)?;
        let inner = || -> Result<Vec<PathBuf>> {
            let hash = self.hash_graph(c)?;
            let files = g.export(format, &self.cfg.out_dir)?;
            for f in &files {
                self.write_meta(f, "graph", &hash, json!({ "nodes": g.node_count(), "edges": g.edge_count() }))?;
            }
            Ok(files)
        };
        inner().map_err(|e| e.in_stage("graph export"))
    }

    /// Triples for every review: graph-oriented text cleaning, extraction,
    /// sentiment of the raw triple, then normalisation and the length filter.
    pub fn extract(&self, reviews: &[ReviewRecord]) -> (Vec<Triple>, ExtractCounts) {
        let per_review: Vec<(Vec<Triple>, extraction::PrepareCounts)> = reviews
            .par_iter()
            .map(|r| {
                let text = textprep::prepare_graph_text(&r.text, None);
                let raw: Vec<Triple> = extraction::extract_triples_for(r.review_id, &text)
                    .into_iter()
                    .map(|t| {
                        let s = self.lexicon.score_triple(&t);
                        t.with_sentiment(s)
                    })
                    .collect();
                extraction::normalize_and_filter(&raw, &self.cfg.term_filter)
            })
            .collect();
        let mut counts = ExtractCounts {
            reviews: reviews.len(),
            ..Default::default()
        };
        let mut out = Vec::new();
        for (ts, c) in per_review {
            counts.extracted += c.input;
            counts.dropped_empty += c.dropped_empty;
            counts.dropped_length += c.dropped_length;
            counts.kept += c.kept;
            counts.reviews_with_triples += usize::from(!ts.is_empty());
            out.extend(ts);
        }
        (out, counts)
    }

    pub fn triples(&self, c: &Corpus, policy: CachePolicy) -> Result<(Vec<Triple>, ExtractCounts)> {
        let inner = || -> Result<(Vec<Triple>, ExtractCounts)> {
            let path = self.artifact("triples.csv");
            let hash = self.hash_triples(c)?;
            if let Some(meta) = self.check_cached(&path, &hash, policy, "extract")? {
                let imported = extraction::import_triples(&path)?;
                let counts = serde_json::from_value(meta.counts).unwrap_or_default();
                return Ok((imported.triples, counts));
            }
            let (triples, counts) = self.extract(&c.records);
            self.ensure_out_dir()?;
            extraction::export_triples(&path, &triples)?;
            self.write_meta(&path, "extract", &hash, serde_json::to_value(counts)?)?;
            log::info!("extracted {} triples ({} kept)", counts.extracted, counts.kept);
            Ok((triples, counts))
        };
        inner().map_err(|e| e.in_stage("extract"))
    }

    pub fn graph(&self, c: &Corpus, triples: Option<&[Triple]>, policy: CachePolicy) -> Result<KnowledgeGraph> {
        let inner = || -> Result<KnowledgeGraph> {
            let path = self.artifact("graph.json");
            let hash = self.hash_graph(c)?;
            if self.check_cached(&path, &hash, policy, "graph build")?.is_some() {
                return KnowledgeGraph::load_json(&path);
            }
            let owned;
            let triples = match triples {
                Some(t) => t,
                None => {
                    owned = self.triples(c, CachePolicy::Require)?.0;
                    &owned
                }
            };
            let (mut g, counts) = KnowledgeGraph::build(&c.records, triples, &resources::amenities());
            g.annotate_sentiment()?;
            self.ensure_out_dir()?;
            let mut w = create(&path)?;
            g.write_json(&mut w)?;
            w.flush().map_err(|e| Error::io(&path, e))?;
            self.write_meta(
                &path,
                "graph",
                &hash,
                json!({
                    "nodes": g.node_count(),
                    "edges": g.edge_count(),
                    "review_nodes": g.review_nodes().count(),
                    "triples_used": counts.triples_used,
                    "skipped_unknown_review": counts.skipped_unknown_review,
                }),
            )?;
            Ok(g)
        };
        inner().map_err(|e| e.in_stage("graph"))
    }

    pub fn embeddings(&self, c: &Corpus, g: &KnowledgeGraph, policy: CachePolicy) -> Result<EmbeddingTable> {
        let inner = || -> Result<EmbeddingTable> {
            let path = self.artifact("embeddings.csv");
            let hash = self.hash_embeddings(c)?;
            if self.check_cached(&path, &hash, policy, "embed")?.is_some() {
                let f = File::open(&path).map_err(|e| Error::io(&path, e))?;
                return EmbeddingTable::read_csv(BufReader::new(f));
            }
            let walk = self.cfg.walk_config();
            let (table, report) = node2vec::embed_graph(g, &walk)?;
            self.ensure_out_dir()?;
            let mut w = create(&path)?;
            table.write_csv(&mut w, Some(g))?;
            w.flush().map_err(|e| Error::io(&path, e))?;
            write_json_file(
                &self.artifact("embeddings.config.json"),
                &json!({ "walk": walk, "training": report }),
            )?;
            self.write_meta(
                &path,
                "embed",
                &hash,
                json!({ "vectors": table.len(), "dims": table.dims, "epoch_losses": report.epoch_losses }),
            )?;
            Ok(table)
        };
        inner().map_err(|e| e.in_stage("embed"))
    }

    /// Graph features for every review in the corpus, in ascending review id.
    /// Reviews without triples get zero embeddings and zero aggregates.
    pub fn graph_features(&self, c: &Corpus, g: &KnowledgeGraph, table: &EmbeddingTable) -> Result<FeatureMatrix> {
        let review_vecs = node2vec::review_embeddings(table, g);
        let mut emb = BTreeMap::new();
        let mut agg = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for r in &c.records {
            let a = match g.review_node(r.review_id) {
                Some(node) => g.aggregate_sentiment(node)?,
                None => SentimentAggregate::ZERO,
            };
            let v = review_vecs
                .get(&r.review_id)
                .cloned()
                .unwrap_or_else(|| vec![0.0; table.dims]);
            emb.insert(r.review_id, v);
            agg.insert(r.review_id, a);
            labels.insert(r.review_id, r.rating);
        }
        features::assemble(&emb, &agg, &labels, self.cfg.feature_mode)
    }

    fn inputs(&self, c: &Corpus, policy: CachePolicy, counts: &mut BTreeMap<String, Value>) -> Result<Inputs> {
        counts.insert(
            "ingest".into(),
            json!({ "reviews": c.records.len(), "skipped_lines": c.skipped, "class_counts": features::class_counts(&c.records.iter().map(|r| r.rating).collect::<Vec<_>>()) }),
        );
        match self.cfg.pipeline {
            PipelineKind::Reviewgraph => {
                let (triples, ec) = self.triples(c, policy)?;
                counts.insert("extract".into(), serde_json::to_value(ec)?);
                let g = self.graph(c, Some(&triples), policy)?;
                counts.insert("graph".into(), json!({ "nodes": g.node_count(), "edges": g.edge_count() }));
                let table = self.embeddings(c, &g, policy)?;
                let m = self.graph_features(c, &g, &table).map_err(|e| e.in_stage("features"))?;
                counts.insert(
                    "features".into(),
                    json!({ "rows": m.len(), "columns": m.n_features, "embedded_nodes": table.len() }),
                );
                Ok(Inputs::Matrix(m))
            }
            PipelineKind::Baseline => {
                let repr = self.cfg.representation();
                let docs = baselines::prepare_docs(&c.records, repr);
                let sentiment = self
                    .cfg
                    .review_sentiment
                    .then(|| baselines::review_sentiment_column(&c.records, self.lexicon));
                Ok(Inputs::Docs {
                    reviews: c.records.clone(),
                    docs,
                    sentiment,
                })
            }
            PipelineKind::SubsetBaseline => Err(Error::domain("the subset baseline has no staged inputs")),
        }
    }

    fn matrix(&self, inputs: &Inputs, vectorizer: Option<&TextVectorizer>, idx: &[usize]) -> Result<FeatureMatrix> {
        match inputs {
            Inputs::Matrix(m) => Ok(m.select(idx)),
            Inputs::Docs { reviews, docs, sentiment } => {
                let v = vectorizer.ok_or_else(|| Error::domain("text pipeline without a fitted vectoriser"))?;
                let sub_docs: Vec<TokenList> = idx.iter().map(|&i| docs[i].clone()).collect();
                let sub_reviews: Vec<ReviewRecord> = idx.iter().map(|&i| reviews[i].clone()).collect();
                let m = baselines::matrix_for(&sub_reviews, v.transform(&sub_docs), v.feature_names())?;
                match sentiment {
                    Some(col) => m.with_column("review_sentiment", &idx.iter().map(|&i| col[i]).collect::<Vec<_>>()),
                    None => Ok(m),
                }
            }
        }
    }

    /// Fit vectoriser, sampler, scaler and classifier on `train` rows only.
    fn fit(&self, inputs: &Inputs, train: &[usize], fold: u64) -> Result<FoldFit> {
        let seed = rng::derive_seed(self.cfg.seed, &[fold]);
        let vectorizer = match inputs {
            Inputs::Docs { docs, .. } => {
                let train_docs: Vec<TokenList> = train.iter().map(|&i| docs[i].clone()).collect();
                Some(TextVectorizer::fit(self.cfg.representation(), &train_docs, &self.cfg.word2vec, seed)?)
            }
            Inputs::Matrix(_) => None,
        };
        let m = self.matrix(inputs, vectorizer.as_ref(), train)?;
        let m = features::resample(&m, self.cfg.sampling, seed)?;
        let train_counts = m.class_counts();
        let sampled_ids = m.row_ids.clone();
        let scaler = if self.cfg.classifier.wants_scaling() {
            Some(Scaler::fit(&m)?)
        } else {
            None
        };
        let scaled = match &scaler {
            Some(s) => s.transform(&m)?,
            None => m,
        };
        let model = classify::train(&scaled, self.cfg.classifier, &self.cfg.classifier_params, seed)?;
        let dummy = classify::train_dummy(&scaled)?;
        Ok(FoldFit {
            vectorizer,
            scaler,
            model,
            dummy,
            feature_names: scaled.feature_names.clone(),
            sampled_ids,
            train_counts,
        })
    }

    fn predict(&self, inputs: &Inputs, fitted: &FoldFit, test: &[usize]) -> Result<(Vec<u8>, Vec<u8>, Vec<u8>)> {
        let m = self.matrix(inputs, fitted.vectorizer.as_ref(), test)?;
        let m = match &fitted.scaler {
            Some(s) => s.transform(&m)?,
            None => m,
        };
        Ok((m.labels.clone(), fitted.model.predict(&m)?, fitted.dummy.predict(&m)?))
    }

    fn write_report(&self, report: &RunReport) -> Result<()> {
        self.ensure_out_dir()?;
        let path = self.artifact("report.json");
        write_json_file(&path, report)?;
        self.write_meta(&path, "report", &report.config_hash, Value::Null)?;
        let hp = self.artifact("histogram.csv");
        let mut w = create(&hp)?;
        evaluate::write_histogram_csv(&mut w, &report.histogram)?;
        w.flush().map_err(|e| Error::io(&hp, e))
    }

    /// Fit on the given training rows (positions in `c.records`) exactly as
    /// `train` (fold 0) and `cv` (fold index) do.
    pub fn fit_rows(&self, c: &Corpus, train: &[usize], fold: u64) -> Result<FoldFit> {
        let inputs = self.inputs(c, CachePolicy::Refresh, &mut BTreeMap::new())?;
        self.fit(&inputs, train, fold)
    }

    /// Train/test positions used by `train` and `run` in split mode.
    pub fn split(&self, n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        evaluate::split_indices(n, self.cfg.evaluation.test_fraction, rng::derive_seed(self.cfg.seed, &[0x5011]))
    }

    /// Fit on the training split and write `model.json`.
    pub fn train(&self, c: &Corpus, policy: CachePolicy) -> Result<ModelBundle> {
        let mut counts = BTreeMap::new();
        let inputs = self.inputs(c, policy, &mut counts)?;
        let inner = || -> Result<ModelBundle> {
            let (train, test) = self.split(c.records.len())?;
            let fitted = self.fit(&inputs, &train, 0)?;
            let ids = |idx: &[usize]| idx.iter().map(|&i| c.records[i].review_id).collect();
            let bundle = ModelBundle {
                format_version: BUNDLE_FORMAT_VERSION,
                config_hash: self.run_hash(c)?,
                seed: self.cfg.seed,
                vectorizer: fitted.vectorizer,
                scaler: fitted.scaler,
                model: fitted.model,
                feature_names: fitted.feature_names,
                train_ids: ids(&train),
                test_ids: ids(&test),
            };
            self.ensure_out_dir()?;
            let path = self.artifact("model.json");
            write_json_file(&path, &bundle)?;
            self.write_meta(&path, "train", &bundle.config_hash, json!({ "train_class_counts": fitted.train_counts }))?;
            if let Some(v) = &bundle.vectorizer {
                let vp = self.artifact("vocabulary.tsv");
                let mut w = create(&vp)?;
                v.vocabulary().write_tsv(&mut w)?;
                w.flush().map_err(|e| Error::io(&vp, e))?;
            }
            Ok(bundle)
        };
        inner().map_err(|e| e.in_stage("train"))
    }

    /// Evaluate the saved model on its held-out reviews and write the report.
    pub fn eval(&self, c: &Corpus) -> Result<RunReport> {
        let hash = self.run_hash(c)?;
        let model_path = self.artifact("model.json");
        let meta = self
            .check_cached(&model_path, &hash, CachePolicy::Require, "train")
            .map_err(|e| e.in_stage("eval"))?
            .expect("required artifact present");
        let mut counts = BTreeMap::new();
        let inputs = self.inputs(c, CachePolicy::Require, &mut counts)?;
        let inner = || -> Result<RunReport> {
            let b = ModelBundle::load(&model_path)?;
            let pos: BTreeMap<usize, usize> = c.records.iter().enumerate().map(|(i, r)| (r.review_id, i)).collect();
            let idx = |ids: &[usize]| -> Result<Vec<usize>> {
                ids.iter()
                    .map(|id| pos.get(id).copied().ok_or_else(|| Error::domain(format!("review {id} not in corpus"))))
                    .collect()
            };
            let test = idx(&b.test_ids)?;
            let train = idx(&b.train_ids)?;
            let train_m = self.matrix(&inputs, b.vectorizer.as_ref(), &train)?;
            let train_m = features::resample(&train_m, self.cfg.sampling, rng::derive_seed(self.cfg.seed, &[0]))?;
            let fitted = FoldFit {
                dummy: classify::train_dummy(&train_m)?,
                vectorizer: b.vectorizer,
                scaler: b.scaler,
                model: b.model,
                feature_names: b.feature_names,
                sampled_ids: Vec::new(),
                train_counts: BTreeMap::new(),
            };
            let (y, pred, dummy) = self.predict(&inputs, &fitted, &test)?;
            counts.insert("train".into(), meta.counts.clone());
            counts.insert("test".into(), json!({ "class_counts": features::class_counts(&y) }));
            let report = RunReport {
                config_hash: hash.clone(),
                seed: self.cfg.seed,
                evaluation: "split".into(),
                metrics: Metrics::compute(&y, &pred)?,
                histogram: evaluate::prediction_histogram(&pred),
                folds: None,
                dummy: Some(Metrics::compute(&y, &dummy)?),
                counts,
                config: self.cfg.echo(),
            };
            self.write_report(&report)?;
            Ok(report)
        };
        inner().map_err(|e| e.in_stage("eval"))
    }

    /// k-fold cross-validation; every fold fits its own vectoriser, sampler,
    /// scaler and classifier on its training rows.
    pub fn cv(&self, c: &Corpus, policy: CachePolicy) -> Result<RunReport> {
        let mut counts = BTreeMap::new();
        let inputs = self.inputs(c, policy, &mut counts)?;
        let inner = || -> Result<RunReport> {
            let labels = inputs.labels();
            let e = &self.cfg.evaluation;
            let dummies = std::sync::Mutex::new(BTreeMap::new());
            let cv = evaluate::kfold_cv(&labels, e.k, self.cfg.seed, e.stratified, self.cfg.echo(), |fold, train, test| {
                let fitted = self.fit(&inputs, train, fold as u64)?;
                let (y, pred, dummy) = self.predict(&inputs, &fitted, test)?;
                dummies.lock().expect("poisoned").insert(fold, Metrics::compute(&y, &dummy)?);
                Ok(pred)
            })?;
            let dummy_folds: Vec<Metrics> = dummies.into_inner().expect("poisoned").into_values().collect();
            let report = RunReport {
                config_hash: self.run_hash(c)?,
                seed: self.cfg.seed,
                evaluation: "cv".into(),
                metrics: cv.mean,
                histogram: cv.histogram.clone(),
                folds: Some(cv.folds.clone()),
                dummy: Some(Metrics::mean(&dummy_folds)?),
                counts,
                config: self.cfg.echo(),
            };
            self.write_report(&report)?;
            let fp = self.artifact("folds.csv");
            let mut w = create(&fp)?;
            cv.write_folds_csv(&mut w)?;
            w.flush().map_err(|e| Error::io(&fp, e))?;
            Ok(report)
        };
        inner().map_err(|e| e.in_stage("cv"))
    }

    fn subset(&self, c: &Corpus) -> Result<RunReport> {
        let inner = || -> Result<RunReport> {
            let r = baselines::subset_baseline(&c.records, self.cfg.subset_size, self.cfg.seed)?;
            let report = RunReport {
                config_hash: self.run_hash(c)?,
                seed: self.cfg.seed,
                evaluation: "subset".into(),
                metrics: r.metrics,
                histogram: r.histogram,
                folds: None,
                dummy: None,
                counts: BTreeMap::from([(
                    "ingest".to_string(),
                    json!({ "reviews": c.records.len(), "skipped_lines": c.skipped, "train": self.cfg.subset_size }),
                )]),
                config: self.cfg.echo(),
            };
            self.write_report(&report)?;
            Ok(report)
        };
        inner().map_err(|e| e.in_stage("subset-baseline"))
    }

    /// Every stage end to end, reusing matching artifacts.
    pub fn run(&self) -> Result<RunReport> {
        let c = self.load_corpus()?;
        match (self.cfg.pipeline, self.cfg.evaluation.mode) {
            (PipelineKind::SubsetBaseline, _) => self.subset(&c),
            (_, EvalMode::Cv) => self.cv(&c, CachePolicy::Reuse),
            (_, EvalMode::Split) => {
                let hash = self.run_hash(&c)?;
                if self.fresh_meta(&self.artifact("model.json"), &hash).is_none() {
                    self.train(&c, CachePolicy::Reuse)?;
                }
                self.eval(&c)
            }
        }
    }
}

pub fn run_pipeline(cfg: RunConfig) -> Result<RunReport> {
    Pipeline::new(cfg)?.run()
}

// ---------------------------------------------------------------------------
// sweeps

/// Lists of values to cross; an empty list keeps the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub dims: Vec<usize>,
    pub sampling: Vec<Sampling>,
    pub classifier: Vec<ClassifierKind>,
    pub feature_mode: Vec<FeatureMode>,
    pub representation: Vec<Representation>,
}

fn or_base<T: Clone>(values: &[T], base: T) -> Vec<T> {
    if values.is_empty() {
        vec![base]
    } else {
        values.to_vec()
    }
}

/// Cartesian product of the grid over `base`; run `i` writes to `<out_dir>/run_<i>`.
pub fn expand_sweep(base: &RunConfig, grid: &SweepGrid) -> Vec<RunConfig> {
    let mut out = Vec::new();
    let reprs: Vec<Option<Representation>> = grid.representation.iter().copied().map(Some).collect();
    for repr in or_base(&reprs, base.representation) {
        for dims in or_base(&grid.dims, base.walk.dims) {
            for sampling in or_base(&grid.sampling, base.sampling) {
                for classifier in or_base(&grid.classifier, base.classifier) {
                    for mode in or_base(&grid.feature_mode, base.feature_mode) {
                        let i = out.len();
                        let mut c = base.clone();
                        c.representation = repr;
                        c.walk.dims = dims;
                        c.sampling = sampling;
                        c.classifier = classifier;
                        c.feature_mode = mode;
                        c.out_dir = base.out_dir.join(format!("run_{i:03}"));
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

/// Execute runs in parallel; results keep the input order.
pub fn sweep(configs: &[RunConfig]) -> Vec<Result<RunReport>> {
    configs.par_iter().map(|c| run_pipeline(c.clone())).collect()
}

/// One row per run, shaped like a results table.
pub fn write_sweep_csv<W: Write>(w: W, runs: &[(RunConfig, Result<RunReport>)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "run", "pipeline", "representation", "dims", "sampling", "classifier", "feature_mode", "accuracy", "mae", "rmse", "mse",
        "kappa", "error",
    ])?;
    for (i, (c, r)) in runs.iter().enumerate() {
        let mut rec = vec![
            i.to_string(),
            c.pipeline.as_str().to_string(),
            c.representation().to_string(),
            c.walk.dims.to_string(),
            c.sampling.as_str().to_string(),
            c.classifier.to_string(),
            c.feature_mode.to_string(),
        ];
        match r {
            Ok(rep) => {
                let m = rep.metrics;
                rec.extend([m.accuracy, m.mae, m.rmse, m.mse, m.kappa].map(|v| v.to_string()));
                rec.push(String::new());
            }
            Err(e) => {
                rec.extend(std::iter::repeat(String::new()).take(5));
                rec.push(e.to_string());
            }
        }
        out.write_record(&rec)?;
    }
    out.flush().map_err(|e| Error::io("<sweep csv>", e))?;
    Ok(())
}
