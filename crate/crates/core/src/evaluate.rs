//! Metrics, splits, k-fold cross-validation and report emission.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::rng;

fn check_pair(y: &[u8], yhat: &[u8]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::domain("metrics need at least one prediction"));
    }
    if y.len() != yhat.len() {
        return Err(Error::domain(format!("{} labels but {} predictions", y.len(), yhat.len())));
    }
    Ok(())
}

pub fn accuracy(y: &[u8], yhat: &[u8]) -> Result<f64> {
    check_pair(y, yhat)?;
    Ok(y.iter().zip(yhat).filter(|(a, b)| a == b).count() as f64 / y.len() as f64)
}

pub fn mae(y: &[u8], yhat: &[u8]) -> Result<f64> {
    check_pair(y, yhat)?;
    Ok(y.iter().zip(yhat).map(|(&a, &b)| (a as f64 - b as f64).abs()).sum::<f64>() / y.len() as f64)
}

pub fn mse(y: &[u8], yhat: &[u8]) -> Result<f64> {
    check_pair(y, yhat)?;
    Ok(y.iter().zip(yhat).map(|(&a, &b)| (a as f64 - b as f64).powi(2)).sum::<f64>() / y.len() as f64)
}

pub fn rmse(y: &[u8], yhat: &[u8]) -> Result<f64> {
    mse(y, yhat).map(f64::sqrt)
}

/// Cohen's kappa. When chance agreement is 1 the statistic is undefined; we
/// return 1 for identical sequences and 0 otherwise.
pub fn cohens_kappa(y: &[u8], yhat: &[u8]) -> Result<f64> {
    check_pair(y, yhat)?;
    let n = y.len() as f64;
    let mut ct: BTreeMap<u8, (usize, usize)> = BTreeMap::new();
    let mut agree = 0usize;
    for (&a, &b) in y.iter().zip(yhat) {
        ct.entry(a).or_default().0 += 1;
        ct.entry(b).or_default().1 += 1;
        agree += (a == b) as usize;
    }
    let po = agree as f64 / n;
    let pe: f64 = ct.values().map(|&(r, c)| (r as f64 / n) * (c as f64 / n)).sum();
    if (1.0 - pe).abs() < 1e-15 {
        return Ok(if y == yhat { 1.0 } else { 0.0 });
    }
    Ok((po - pe) / (1.0 - pe))
}

/// Counts per predicted label, zero-filled over 1..=5.
pub fn prediction_histogram(yhat: &[u8]) -> BTreeMap<u8, usize> {
    let mut h: BTreeMap<u8, usize> = (1..=5).map(|l| (l, 0)).collect();
    for &p in yhat {
        *h.entry(p).or_insert(0) += 1;
    }
    h
}

pub fn write_histogram_csv<W: Write>(w: W, hist: &BTreeMap<u8, usize>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["label", "count"])?;
    for (l, c) in hist {
        out.write_record([l.to_string(), c.to_string()])?;
    }
    out.flush().map_err(|e| Error::io("<histogram csv>", e))?;
    Ok(())
}

/// Closed-form MAE and MSE of always predicting `label` against `y`.
pub fn constant_prediction_errors(y: &[u8], label: u8) -> Result<(f64, f64)> {
    if y.is_empty() {
        return Err(Error::domain("empty label list"));
    }
    let n = y.len() as f64;
    let mut mae = 0.0;
    let mut mse = 0.0;
    for (c, k) in crate::features::class_counts(y) {
        let d = (c as f64 - label as f64).abs();
        mae += k as f64 / n * d;
        mse += k as f64 / n * d * d;
    }
    Ok((mae, mse))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub kappa: f64,
    pub n_test: usize,
}

impl Metrics {
    pub fn compute(y: &[u8], yhat: &[u8]) -> Result<Self> {
        Ok(Self {
            accuracy: accuracy(y, yhat)?,
            mae: mae(y, yhat)?,
            mse: mse(y, yhat)?,
            rmse: rmse(y, yhat)?,
            kappa: cohens_kappa(y, yhat)?,
            n_test: y.len(),
        })
    }

    /// Unweighted mean over folds; `n_test` is the total.
    pub fn mean(folds: &[Metrics]) -> Result<Self> {
        if folds.is_empty() {
            return Err(Error::domain("no folds to average"));
        }
        let k = folds.len() as f64;
        let avg = |f: fn(&Metrics) -> f64| folds.iter().map(f).sum::<f64>() / k;
        Ok(Self {
            accuracy: avg(|m| m.accuracy),
            mae: avg(|m| m.mae),
            mse: avg(|m| m.mse),
            rmse: avg(|m| m.rmse),
            kappa: avg(|m| m.kappa),
            n_test: folds.iter().map(|m| m.n_test).sum(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(flatten)]
    pub metrics: Metrics,
    pub histogram: BTreeMap<u8, usize>,
    /// Echo of the configuration that produced the report.
    pub config: serde_json::Value,
}

impl MetricsReport {
    pub fn from_predictions(y: &[u8], yhat: &[u8], config: serde_json::Value) -> Result<Self> {
        Ok(Self {
            metrics: Metrics::compute(y, yhat)?,
            histogram: prediction_histogram(yhat),
            config,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub folds: Vec<Metrics>,
    pub mean: Metrics,
    /// Pooled over all held-out predictions.
    pub histogram: BTreeMap<u8, usize>,
    pub config: serde_json::Value,
}

impl CvReport {
    /// One row per fold followed by a `mean` row.
    pub fn write_folds_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["fold", "n_test", "accuracy", "mae", "mse", "rmse", "kappa"])?;
        let row = |name: String, m: &Metrics| {
            vec![
                name,
                m.n_test.to_string(),
                m.accuracy.to_string(),
                m.mae.to_string(),
                m.mse.to_string(),
                m.rmse.to_string(),
                m.kappa.to_string(),
            ]
        };
        for (i, m) in self.folds.iter().enumerate() {
            out.write_record(row(i.to_string(), m))?;
        }
        out.write_record(row("mean".into(), &self.mean))?;
        out.flush().map_err(|e| Error::io("<folds csv>", e))?;
        Ok(())
    }
}

/// Seeded shuffle, then the first `ceil(n * test_fraction)` indices form the test set.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::domain(format!("test fraction must be in (0, 1), got {test_fraction}")));
    }
    let n_test = ((n as f64 * test_fraction).ceil() as usize).max(1);
    if n_test >= n {
        return Err(Error::domain(format!("{n} rows are too few for a {test_fraction} test split")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::derived(seed, &[0x5971]));
    let test = idx[..n_test].to_vec();
    let train = idx[n_test..].to_vec();
    Ok((train, test))
}

pub fn train_test_split(m: &FeatureMatrix, test_fraction: f64, seed: u64) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let (train, test) = split_indices(m.len(), test_fraction, seed)?;
    Ok((m.select(&train), m.select(&test)))
}

/// Held-out index sets for k folds. Unstratified: contiguous blocks of a
/// seeded permutation, the first `n % k` folds one larger. Stratified: the
/// permutation is grouped by label and dealt round-robin.
pub fn kfold_indices(labels: &[u8], k: usize, seed: u64, stratified: bool) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::domain(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds the {n} available rows")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::derived(seed, &[0xf01d]));
    let mut folds = vec![Vec::new(); k];
    if stratified {
        idx.sort_by_key(|&i| labels[i]);
        for (pos, i) in idx.into_iter().enumerate() {
            folds[pos % k].push(i);
        }
    } else {
        let mut at = 0;
        for (f, fold) in folds.iter_mut().enumerate() {
            let size = n / k + usize::from(f < n % k);
            fold.extend_from_slice(&idx[at..at + size]);
            at += size;
        }
    }
    Ok(folds)
}

/// Complement of `test` within `0..n`.
pub fn complement(n: usize, test: &[usize]) -> Vec<usize> {
    let mut held = vec![false; n];
    test.iter().for_each(|&i| held[i] = true);
    (0..n).filter(|&i| !held[i]).collect()
}

/// Run `fit_predict(train, test)` on every fold (in parallel) and collect the
/// held-out metrics. The closure must fit all statistics on `train` only.
pub fn kfold_cv<F>(labels: &[u8], k: usize, seed: u64, stratified: bool, config: serde_json::Value, fit_predict: F) -> Result<CvReport>
where
    F: Fn(usize, &[usize], &[usize]) -> Result<Vec<u8>> + Sync,
{
    let folds = kfold_indices(labels, k, seed, stratified)?;
    let results: Vec<(Metrics, Vec<u8>)> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            let train = complement(labels.len(), test);
            let yhat = fit_predict(f, &train, test)?;
            let y: Vec<u8> = test.iter().map(|&i| labels[i]).collect();
            Ok((Metrics::compute(&y, &yhat)?, yhat))
        })
        .collect::<Result<_>>()?;
    let fold_metrics: Vec<Metrics> = results.iter().map(|r| r.0).collect();
    let pooled: Vec<u8> = results.iter().flat_map(|r| r.1.iter().copied()).collect();
    Ok(CvReport {
        k,
        mean: Metrics::mean(&fold_metrics)?,
        folds: fold_metrics,
        histogram: prediction_histogram(&pooled),
        config,
    })
}
