//! Review analytics over sentiment-annotated knowledge graphs.
//!
//! Free-text hotel reviews are turned into subject/predicate/object triples,
//! scored with a valence lexicon, assembled into a typed knowledge graph and
//! embedded with biased random walks plus a skip-gram trainer. The resulting
//! review vectors and sentiment aggregates feed a set of classifiers that
//! predict the 1-5 star rating. Classic bag-of-words, TF-IDF and word-vector
//! baselines share the same evaluation harness.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`corpus`]: JSON-lines ingestion and descriptive statistics
//! * [`textprep`]: the three text normalisation variants
//! * [`sentiment`]: lexicon valence scoring
//! * [`extraction`]: pattern-based triple extraction, normalisation and filtering
//! * [`kgraph`]: graph construction, sentiment aggregation and export
//! * [`node2vec`] / [`skipgram`]: biased walks and embedding training
//! * [`features`]: feature assembly, resampling and scaling
//! * [`classify`]: random forest, logistic regression, MLP and dummy models
//! * [`baselines`]: bag-of-words, TF-IDF and word-vector review representations
//! * [`evaluate`]: metrics, splits and cross-validation
//! * [`pipeline`]: configuration-driven orchestration with cached stage artifacts

pub mod baselines;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod extraction;
pub mod features;
pub mod kgraph;
pub mod node2vec;
pub mod pipeline;
pub mod resources;
pub mod rng;
pub mod sentiment;
pub mod skipgram;
pub mod textprep;

pub use classify::{ClassifierKind, TrainedModel};
pub use corpus::{CorpusStats, ReviewRecord};
pub use error::{Error, Result};
pub use evaluate::{CvReport, Metrics, MetricsReport};
pub use extraction::Triple;
pub use features::{FeatureMatrix, FeatureMode, Sampling};
pub use kgraph::{KnowledgeGraph, NodeLabel};
pub use node2vec::{EmbeddingTable, WalkConfig};
pub use pipeline::{RunConfig, RunReport};
pub use sentiment::Lexicon;
