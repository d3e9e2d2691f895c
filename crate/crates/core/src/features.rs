//! Feature matrices, class-balance resampling and standard scaling.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgraph::SentimentAggregate;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Row {
    Dense(Vec<f64>),
    /// Strictly increasing column indices with their values.
    Sparse { idx: Vec<u32>, val: Vec<f64> },
}

impl Row {
    pub fn get(&self, j: usize) -> f64 {
        match self {
            Row::Dense(v) => v[j],
            Row::Sparse { idx, val } => idx.binary_search(&(j as u32)).map(|k| val[k]).unwrap_or(0.0),
        }
    }

    /// Stored entries as (column, value); dense rows yield every column.
    pub fn entries(&self) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        match self {
            Row::Dense(v) => Box::new(v.iter().copied().enumerate()),
            Row::Sparse { idx, val } => Box::new(idx.iter().map(|&i| i as usize).zip(val.iter().copied())),
        }
    }

    pub fn to_dense(&self, n_features: usize) -> Vec<f64> {
        match self {
            Row::Dense(v) => v.clone(),
            Row::Sparse { .. } => {
                let mut out = vec![0.0; n_features];
                for (j, x) in self.entries() {
                    out[j] = x;
                }
                out
            }
        }
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        self.entries().map(|(j, x)| x * w[j]).sum()
    }

    fn is_finite(&self) -> bool {
        self.entries().all(|(_, x)| x.is_finite())
    }

    fn max_index(&self) -> Option<usize> {
        match self {
            Row::Dense(v) => v.len().checked_sub(1),
            Row::Sparse { idx, .. } => idx.last().map(|&i| i as usize),
        }
    }

    fn width_ok(&self, n_features: usize) -> bool {
        match self {
            Row::Dense(v) => v.len() == n_features,
            Row::Sparse { idx, val } => {
                idx.len() == val.len()
                    && idx.windows(2).all(|w| w[0] < w[1])
                    && self.max_index().map_or(true, |m| m < n_features)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub n_features: usize,
    pub rows: Vec<Row>,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
    pub row_ids: Vec<usize>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<Row>, labels: Vec<u8>, feature_names: Vec<String>, row_ids: Vec<usize>) -> Result<Self> {
        let m = Self {
            n_features: feature_names.len(),
            rows,
            labels,
            feature_names,
            row_ids,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_dense(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let names = (0..width).map(|i| format!("f{i}")).collect();
        let ids = (0..rows.len()).collect();
        Self::new(rows.into_iter().map(Row::Dense).collect(), labels, names, ids)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.labels.len() || self.rows.len() != self.row_ids.len() {
            return Err(Error::domain(format!(
                "{} rows, {} labels and {} ids",
                self.rows.len(),
                self.labels.len(),
                self.row_ids.len()
            )));
        }
        if self.feature_names.len() != self.n_features {
            return Err(Error::domain("feature name count differs from width"));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if !r.width_ok(self.n_features) {
                return Err(Error::domain(format!("row {i} does not fit width {}", self.n_features)));
            }
            if !r.is_finite() {
                return Err(Error::domain(format!("row {i} has non-finite entries")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_sparse(&self) -> bool {
        self.rows.iter().any(|r| matches!(r, Row::Sparse { .. }))
    }

    /// Rows at `indices`, in that order (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            n_features: self.n_features,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            row_ids: indices.iter().map(|&i| self.row_ids[i]).collect(),
        }
    }

    pub fn class_counts(&self) -> BTreeMap<u8, usize> {
        class_counts(&self.labels)
    }

    /// Append one column.
    pub fn with_column(mut self, name: &str, values: &[f64]) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::domain(format!("{} column values for {} rows", values.len(), self.len())));
        }
        let j = self.n_features as u32;
        for (row, &x) in self.rows.iter_mut().zip(values) {
            match row {
                Row::Dense(v) => v.push(x),
                Row::Sparse { idx, val } => {
                    if x != 0.0 {
                        idx.push(j);
                        val.push(x);
                    }
                }
            }
        }
        self.n_features += 1;
        self.feature_names.push(name.to_string());
        self.validate()?;
        Ok(self)
    }

    /// Dense CSV with header `row_id,label,<feature names>`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["row_id".to_string(), "label".to_string()];
        header.extend(self.feature_names.iter().cloned());
        out.write_record(&header)?;
        for ((row, label), id) in self.rows.iter().zip(&self.labels).zip(&self.row_ids) {
            let mut rec = vec![id.to_string(), label.to_string()];
            rec.extend(row.to_dense(self.n_features).iter().map(f64::to_string));
            out.write_record(&rec)?;
        }
        out.flush().map_err(|e| Error::io("<feature csv>", e))?;
        Ok(())
    }
}

pub fn class_counts(labels: &[u8]) -> BTreeMap<u8, usize> {
    let mut c = BTreeMap::new();
    for &l in labels {
        *c.entry(l).or_insert(0) += 1;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureMode {
    #[serde(rename = "n2v")]
    N2v,
    #[serde(rename = "n2v+avg")]
    N2vAvg,
    #[serde(rename = "n2v+avg+minmax")]
    N2vAvgMinmax,
    #[serde(rename = "sentiment-only")]
    SentimentOnly,
}

impl FeatureMode {
    pub const ALL: [FeatureMode; 4] = [
        FeatureMode::N2v,
        FeatureMode::N2vAvg,
        FeatureMode::N2vAvgMinmax,
        FeatureMode::SentimentOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::N2v => "n2v",
            FeatureMode::N2vAvg => "n2v+avg",
            FeatureMode::N2vAvgMinmax => "n2v+avg+minmax",
            FeatureMode::SentimentOnly => "sentiment-only",
        }
    }

    pub fn uses_embedding(self) -> bool {
        self != FeatureMode::SentimentOnly
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown feature mode `{s}`")))
    }
}

/// Rows in ascending review id: embedding columns (unless sentiment-only)
/// followed by avg and optionally min and max.
pub fn assemble(
    emb: &BTreeMap<usize, Vec<f64>>,
    agg: &BTreeMap<usize, SentimentAggregate>,
    labels: &BTreeMap<usize, u8>,
    mode: FeatureMode,
) -> Result<FeatureMatrix> {
    if mode.uses_embedding() && !emb.keys().eq(agg.keys()) {
        return Err(Error::domain("embedding and sentiment aggregates cover different review ids"));
    }
    let dims = if mode.uses_embedding() {
        let d = emb.values().next().map_or(0, Vec::len);
        if emb.values().any(|v| v.len() != d) {
            return Err(Error::domain("review embeddings differ in length"));
        }
        d
    } else {
        0
    };
    let mut names: Vec<String> = (0..dims).map(|i| format!("emb_{i}")).collect();
    match mode {
        FeatureMode::N2v => {}
        FeatureMode::N2vAvg => names.push("sentiment_avg".into()),
        FeatureMode::N2vAvgMinmax | FeatureMode::SentimentOnly => {
            names.extend(["sentiment_avg", "sentiment_min", "sentiment_max"].map(String::from))
        }
    }
    let mut rows = Vec::with_capacity(agg.len());
    let mut ys = Vec::with_capacity(agg.len());
    let mut ids = Vec::with_capacity(agg.len());
    for (&id, a) in agg {
        let label = *labels
            .get(&id)
            .ok_or_else(|| Error::domain(format!("no label for review {id}")))?;
        let mut row = Vec::with_capacity(names.len());
        if mode.uses_embedding() {
            row.extend_from_slice(&emb[&id]);
        }
        match mode {
            FeatureMode::N2v => {}
            FeatureMode::N2vAvg => row.push(a.avg),
            _ => row.extend([a.avg, a.min, a.max]),
        }
        rows.push(Row::Dense(row));
        ys.push(label);
        ids.push(id);
    }
    FeatureMatrix::new(rows, ys, names, ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    #[default]
    None,
    Over,
    Under,
}

impl Sampling {
    pub fn as_str(self) -> &'static str {
        match self {
            Sampling::None => "none",
            Sampling::Over => "over",
            Sampling::Under => "under",
        }
    }
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Sampling::None),
            "over" | "oversample" => Ok(Sampling::Over),
            "under" | "undersample" => Ok(Sampling::Under),
            other => Err(Error::input(format!("unknown sampling `{other}`"))),
        }
    }
}

fn rows_by_class(labels: &[u8]) -> BTreeMap<u8, Vec<usize>> {
    let mut by: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by.entry(l).or_default().push(i);
    }
    by
}

/// Row indices that oversampling would produce: all originals, then draws with
/// replacement per class (ascending label) up to the majority count.
pub fn oversample_indices(labels: &[u8], seed: u64) -> Result<Vec<usize>> {
    if labels.is_empty() {
        return Err(Error::domain("cannot resample an empty matrix"));
    }
    let by = rows_by_class(labels);
    let target = by.values().map(Vec::len).max().unwrap_or(0);
    let mut out: Vec<usize> = (0..labels.len()).collect();
    for (&label, members) in &by {
        let mut r = rng::derived(seed, &[0x0e5a, label as u64]);
        out.extend((members.len()..target).map(|_| members[r.gen_range(0..members.len())]));
    }
    Ok(out)
}

/// Row indices kept by undersampling: per class a draw without replacement
/// down to the minority count, returned in original order.
pub fn undersample_indices(labels: &[u8], seed: u64) -> Result<Vec<usize>> {
    if labels.is_empty() {
        return Err(Error::domain("cannot resample an empty matrix"));
    }
    let by = rows_by_class(labels);
    let target = by.values().map(Vec::len).min().unwrap_or(0);
    let mut out = Vec::with_capacity(target * by.len());
    for (&label, members) in &by {
        let mut r = rng::derived(seed, &[0x0d5a, label as u64]);
        out.extend(index::sample(&mut r, members.len(), target).into_iter().map(|k| members[k]));
    }
    out.sort_unstable();
    Ok(out)
}

pub fn oversample(m: &FeatureMatrix, seed: u64) -> Result<FeatureMatrix> {
    Ok(m.select(&oversample_indices(&m.labels, seed)?))
}

pub fn undersample(m: &FeatureMatrix, seed: u64) -> Result<FeatureMatrix> {
    Ok(m.select(&undersample_indices(&m.labels, seed)?))
}

pub fn resample(m: &FeatureMatrix, sampling: Sampling, seed: u64) -> Result<FeatureMatrix> {
    match sampling {
        Sampling::None => Ok(m.clone()),
        Sampling::Over => oversample(m, seed),
        Sampling::Under => undersample(m, seed),
    }
}

/// Per-feature standardisation fitted on training rows. Sparse inputs are
/// scaled without centring so they stay sparse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub center: bool,
}

impl Scaler {
    pub fn fit(train: &FeatureMatrix) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::domain("cannot fit a scaler on zero rows"));
        }
        let d = train.n_features;
        let n = train.len() as f64;
        let mut mean = vec![0.0; d];
        for r in &train.rows {
            for (j, x) in r.entries() {
                mean[j] += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        // sum of squared deviations, with implicit zeros of sparse rows accounted for
        let mut ss = vec![0.0; d];
        let mut nnz = vec![0usize; d];
        for r in &train.rows {
            for (j, x) in r.entries() {
                ss[j] += (x - mean[j]).powi(2);
                nnz[j] += 1;
            }
        }
        let std = (0..d)
            .map(|j| {
                let zeros = train.len() - nnz[j];
                ((ss[j] + zeros as f64 * mean[j] * mean[j]) / n).sqrt()
            })
            .collect();
        Ok(Self {
            mean,
            std,
            center: !train.is_sparse(),
        })
    }

    pub fn transform_row(&self, row: &Row) -> Row {
        let scale = |j: usize, x: f64| {
            if self.std[j] == 0.0 {
                0.0
            } else if self.center {
                (x - self.mean[j]) / self.std[j]
            } else {
                x / self.std[j]
            }
        };
        match row {
            Row::Dense(v) => Row::Dense(v.iter().enumerate().map(|(j, &x)| scale(j, x)).collect()),
            Row::Sparse { idx, val } if !self.center => Row::Sparse {
                idx: idx.clone(),
                val: idx.iter().zip(val).map(|(&j, &x)| scale(j as usize, x)).collect(),
            },
            Row::Sparse { .. } => Row::Dense(
                row.to_dense(self.mean.len())
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| scale(j, x))
                    .collect(),
            ),
        }
    }

    pub fn transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        if m.n_features != self.mean.len() {
            return Err(Error::domain(format!(
                "scaler fitted on {} features, matrix has {}",
                self.mean.len(),
                m.n_features
            )));
        }
        Ok(FeatureMatrix {
            rows: m.rows.iter().map(|r| self.transform_row(r)).collect(),
            ..m.clone()
        })
    }
}

pub fn fit_scaler(train: &FeatureMatrix) -> Result<Scaler> {
    Scaler::fit(train)
}

pub fn apply_scaler(s: &Scaler, m: &FeatureMatrix) -> Result<FeatureMatrix> {
    s.transform(m)
}
