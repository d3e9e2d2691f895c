//! Text-representation baselines: bag of words, TF-IDF, averaged Word2Vec,
//! an optional review-level sentiment column, and the small-training-set
//! TF-IDF + logistic baseline.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{self, ClassifierConfig, ClassifierKind};
use crate::corpus::ReviewRecord;
use crate::error::{Error, Result};
use crate::evaluate::MetricsReport;
use crate::features::{FeatureMatrix, Row};
use crate::sentiment::Lexicon;
use crate::skipgram::{self, SgnsConfig};
use crate::textprep::{self, TokenList};
use crate::rng;

/// Alphabetically ordered token -> column map with document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub tokens: Vec<String>,
    pub df: Vec<usize>,
    pub n_documents: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn fit(docs: &[TokenList]) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::domain("cannot build a vocabulary from zero documents"));
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for d in docs {
            let mut seen: Vec<&str> = d.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let (tokens, df): (Vec<String>, Vec<usize>) = df.into_iter().map(|(t, c)| (t.to_string(), c)).unzip();
        Ok(Self::from_parts(tokens, df, docs.len()))
    }

    pub fn from_parts(tokens: Vec<String>, df: Vec<usize>, n_documents: usize) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self { tokens, df, n_documents, index }
    }

    /// Rebuild the lookup table after deserialisation.
    pub fn reindex(&mut self) {
        self.index = self.tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Raw counts; tokens outside the vocabulary are ignored.
    pub fn counts(&self, doc: &[String]) -> Row {
        let mut c: BTreeMap<u32, f64> = BTreeMap::new();
        for t in doc {
            if let Some(i) = self.get(t) {
                *c.entry(i as u32).or_insert(0.0) += 1.0;
            }
        }
        let (idx, val) = c.into_iter().unzip();
        Row::Sparse { idx, val }
    }

    /// Smoothed inverse document frequency `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self) -> Vec<f64> {
        let n = self.n_documents as f64;
        self.df.iter().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect()
    }

    /// `token<TAB>index<TAB>df` lines.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<vocabulary tsv>", e);
        for (i, (t, d)) in self.tokens.iter().zip(&self.df).enumerate() {
            writeln!(w, "{t}\t{i}\t{d}").map_err(io)?;
        }
        Ok(())
    }
}

fn tfidf_row(counts: Row, idf: &[f64]) -> Row {
    let Row::Sparse { idx, mut val } = counts else { unreachable!("counts are sparse") };
    for (v, &i) in val.iter_mut().zip(&idx) {
        *v *= idf[i as usize];
    }
    let norm = val.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        val.iter_mut().for_each(|v| *v /= norm);
    }
    Row::Sparse { idx, val }
}

pub fn bow_vectorize(docs: &[TokenList]) -> Result<(Vocabulary, Vec<Row>)> {
    let vocab = Vocabulary::fit(docs)?;
    let rows = docs.par_iter().map(|d| vocab.counts(d)).collect();
    Ok((vocab, rows))
}

pub fn tfidf_vectorize(docs: &[TokenList]) -> Result<(Vocabulary, Vec<Row>)> {
    let vocab = Vocabulary::fit(docs)?;
    let idf = vocab.idf();
    let rows = docs.par_iter().map(|d| tfidf_row(vocab.counts(d), &idf)).collect();
    Ok((vocab, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Word2VecConfig {
    pub dims: usize,
    pub window: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub min_count: usize,
}

impl Default for Word2VecConfig {
    fn default() -> Self {
        Self {
            dims: 100,
            window: 5,
            epochs: 5,
            negatives: 5,
            learning_rate: 0.025,
            min_count: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordVectors {
    pub dims: usize,
    pub vocab: Vocabulary,
    /// Row-major `vocab.len() x dims`.
    pub vectors: Vec<f64>,
}

impl WordVectors {
    pub fn train(docs: &[TokenList], cfg: &Word2VecConfig, seed: u64) -> Result<Self> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for d in docs {
            for t in d {
                *counts.entry(t).or_insert(0) += 1;
            }
        }
        let kept: Vec<String> = counts
            .into_iter()
            .filter(|&(_, c)| c >= cfg.min_count.max(1))
            .map(|(t, _)| t.to_string())
            .collect();
        let vocab = Vocabulary::from_parts(kept.clone(), vec![0; kept.len()], docs.len());
        let corpus: Vec<Vec<usize>> = docs
            .iter()
            .map(|d| d.iter().filter_map(|t| vocab.get(t)).collect())
            .collect();
        let sg = SgnsConfig {
            dims: cfg.dims,
            window: cfg.window,
            epochs: cfg.epochs,
            negatives: cfg.negatives,
            learning_rate: cfg.learning_rate,
            seed,
            ..SgnsConfig::default()
        };
        let (model, _) = skipgram::train(&corpus, vocab.len(), &sg)?;
        Ok(Self {
            dims: cfg.dims,
            vocab,
            vectors: model.input,
        })
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vocab.get(token).map(|i| &self.vectors[i * self.dims..(i + 1) * self.dims])
    }

    /// Mean of the in-vocabulary word vectors; zeros when none are known.
    pub fn review_vector(&self, doc: &[String]) -> Vec<f64> {
        let mut acc = vec![0.0; self.dims];
        let mut n = 0usize;
        for v in doc.iter().filter_map(|t| self.vector(t)) {
            acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
            n += 1;
        }
        if n > 0 {
            acc.iter_mut().for_each(|a| *a /= n as f64);
        }
        acc
    }
}

pub fn word2vec_review_vectors(docs: &[TokenList], cfg: &Word2VecConfig, seed: u64) -> Result<(WordVectors, Vec<Row>)> {
    if docs.iter().all(Vec::is_empty) {
        return Err(Error::domain("Word2Vec needs at least one non-empty document"));
    }
    let wv = WordVectors::train(docs, cfg, seed)?;
    let rows = docs.par_iter().map(|d| Row::Dense(wv.review_vector(d))).collect();
    Ok((wv, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Bow,
    Tfidf,
    Word2vec,
    Node2vec,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Bow => "bow",
            Representation::Tfidf => "tfidf",
            Representation::Word2vec => "word2vec",
            Representation::Node2vec => "node2vec",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bow" => Ok(Representation::Bow),
            "tfidf" | "tf-idf" => Ok(Representation::Tfidf),
            "word2vec" | "w2v" => Ok(Representation::Word2vec),
            "node2vec" | "n2v" => Ok(Representation::Node2vec),
            other => Err(Error::input(format!("unknown representation `{other}`"))),
        }
    }
}

/// A text vectoriser fitted on training documents only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TextVectorizer {
    Bow { vocab: Vocabulary },
    Tfidf { vocab: Vocabulary, idf: Vec<f64> },
    Word2vec { vectors: WordVectors },
}

impl TextVectorizer {
    pub fn fit(repr: Representation, train_docs: &[TokenList], w2v: &Word2VecConfig, seed: u64) -> Result<Self> {
        match repr {
            Representation::Bow => Ok(Self::Bow { vocab: Vocabulary::fit(train_docs)? }),
            Representation::Tfidf => {
                let vocab = Vocabulary::fit(train_docs)?;
                let idf = vocab.idf();
                Ok(Self::Tfidf { vocab, idf })
            }
            Representation::Word2vec => Ok(Self::Word2vec {
                vectors: word2vec_review_vectors(train_docs, w2v, seed)?.0,
            }),
            Representation::Node2vec => Err(Error::domain("node2vec is not a text representation")),
        }
    }

    pub fn reindex(&mut self) {
        match self {
            Self::Bow { vocab } | Self::Tfidf { vocab, .. } => vocab.reindex(),
            Self::Word2vec { vectors } => vectors.vocab.reindex(),
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        match self {
            Self::Bow { vocab } | Self::Tfidf { vocab, .. } => vocab.tokens.clone(),
            Self::Word2vec { vectors } => (0..vectors.dims).map(|i| format!("w2v_{i}")).collect(),
        }
    }

    pub fn transform(&self, docs: &[TokenList]) -> Vec<Row> {
        docs.par_iter()
            .map(|d| match self {
                Self::Bow { vocab } => vocab.counts(d),
                Self::Tfidf { vocab, idf } => tfidf_row(vocab.counts(d), idf),
                Self::Word2vec { vectors } => Row::Dense(vectors.review_vector(d)),
            })
            .collect()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        match self {
            Self::Bow { vocab } | Self::Tfidf { vocab, .. } => vocab,
            Self::Word2vec { vectors } => &vectors.vocab,
        }
    }
}

/// Token lists for a representation: Word2Vec keeps stopwords, the count
/// models use the classic stopword-free lemmatised tokens.
pub fn prepare_docs(reviews: &[ReviewRecord], repr: Representation) -> Vec<TokenList> {
    reviews
        .par_iter()
        .map(|r| match repr {
            Representation::Word2vec => textprep::prepare_word2vec(&r.text),
            _ => textprep::prepare_classic(&r.text),
        })
        .collect()
}

/// Compound score of each review body.
pub fn review_sentiment_column(reviews: &[ReviewRecord], lex: &Lexicon) -> Vec<f64> {
    reviews.par_iter().map(|r| lex.score_text(&r.text)).collect()
}

pub fn matrix_for(reviews: &[ReviewRecord], rows: Vec<Row>, names: Vec<String>) -> Result<FeatureMatrix> {
    FeatureMatrix::new(
        rows,
        reviews.iter().map(|r| r.rating).collect(),
        names,
        reviews.iter().map(|r| r.review_id).collect(),
    )
}

/// Indices of a seeded sample of `n` training reviews and the remaining test reviews.
pub fn subset_split(n_total: usize, n: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n == 0 || n >= n_total {
        return Err(Error::domain(format!("subset size {n} must be in 1..{n_total}")));
    }
    let mut train = index::sample(&mut rng::derived(seed, &[0x5b5e]), n_total, n).into_vec();
    train.sort_unstable();
    let test = crate::evaluate::complement(n_total, &train);
    Ok((train, test))
}

/// TF-IDF + logistic regression trained on `n` sampled reviews and evaluated on the rest.
pub fn subset_baseline(reviews: &[ReviewRecord], n: usize, seed: u64) -> Result<MetricsReport> {
    let (train_idx, test_idx) = subset_split(reviews.len(), n, seed)?;
    let docs = prepare_docs(reviews, Representation::Tfidf);
    let pick = |idx: &[usize]| -> (Vec<ReviewRecord>, Vec<TokenList>) {
        idx.iter().map(|&i| (reviews[i].clone(), docs[i].clone())).unzip()
    };
    let (train_r, train_d) = pick(&train_idx);
    let (test_r, test_d) = pick(&test_idx);
    let vec = TextVectorizer::fit(Representation::Tfidf, &train_d, &Word2VecConfig::default(), seed)?;
    let names = vec.feature_names();
    let train_m = matrix_for(&train_r, vec.transform(&train_d), names.clone())?;
    let test_m = matrix_for(&test_r, vec.transform(&test_d), names)?;
    let model = classify::train(&train_m, ClassifierKind::Logistic, &ClassifierConfig::default(), seed)?;
    let pred = model.predict(&test_m)?;
    MetricsReport::from_predictions(
        &test_m.labels,
        &pred,
        serde_json::json!({
            "pipeline": "subset-baseline",
            "representation": "tfidf",
            "classifier": "logistic",
            "train_size": n,
            "seed": seed,
        }),
    )
}
