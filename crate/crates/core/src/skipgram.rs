//! Skip-gram with negative sampling over integer token sequences.
//!
//! Shared by the node embedding (tokens are node ids) and the Word2Vec
//! baseline (tokens are vocabulary indices). Training is single-threaded so a
//! fixed seed gives bit-identical vectors.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgnsConfig {
    pub dims: usize,
    pub window: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    /// Floor of the linearly decayed rate, as a fraction of `learning_rate`.
    pub min_lr_fraction: f64,
    /// Largest vector norm tolerated before training is declared divergent.
    pub max_norm: f64,
    pub seed: u64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        Self {
            dims: 100,
            window: 5,
            epochs: 5,
            negatives: 5,
            learning_rate: 0.025,
            min_lr_fraction: 1e-4,
            max_norm: 1e3,
            seed: 0,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 || self.window == 0 {
            return Err(Error::domain("dims and window must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::domain(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if !(self.max_norm > 0.0) {
            return Err(Error::domain("max_norm must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SgnsModel {
    pub dims: usize,
    pub vocab_size: usize,
    /// Row-major `vocab_size x dims` input ("centre") vectors; these are the embeddings.
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    /// Token occurrences in the training corpus.
    pub counts: Vec<u64>,
}

impl SgnsModel {
    pub fn vector(&self, token: usize) -> &[f64] {
        &self.input[token * self.dims..(token + 1) * self.dims]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean per-pair loss of each epoch, measured before each update.
    pub epoch_losses: Vec<f64>,
    pub pairs_per_epoch: usize,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `-ln σ(x)`, stable for large |x|.
#[inline]
fn neg_log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// d loss / d score for one (score, label) term.
#[inline]
fn coefficient(score: f64, positive: bool) -> f64 {
    sigmoid(score) - if positive { 1.0 } else { 0.0 }
}

/// Loss of one centre/context pair with its negatives:
/// `-ln σ(u·v) - Σ ln σ(-u·v_k)`.
pub fn pair_loss(u: &[f64], v: &[f64], negatives: &[&[f64]]) -> f64 {
    neg_log_sigmoid(dot(u, v)) + negatives.iter().map(|n| neg_log_sigmoid(-dot(u, n))).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub dnegatives: Vec<Vec<f64>>,
}

/// Analytic gradient of [`pair_loss`].
pub fn pair_gradient(u: &[f64], v: &[f64], negatives: &[&[f64]]) -> PairGradient {
    let g = coefficient(dot(u, v), true);
    let mut du: Vec<f64> = v.iter().map(|x| g * x).collect();
    let dv = u.iter().map(|x| g * x).collect();
    let mut dnegatives = Vec::with_capacity(negatives.len());
    for n in negatives {
        let g = coefficient(dot(u, n), false);
        for (d, x) in du.iter_mut().zip(n.iter()) {
            *d += g * x;
        }
        dnegatives.push(u.iter().map(|x| g * x).collect());
    }
    PairGradient { du, dv, dnegatives }
}

/// Train on `corpus`, whose tokens must be `< vocab_size`.
pub fn train(corpus: &[Vec<usize>], vocab_size: usize, cfg: &SgnsConfig) -> Result<(SgnsModel, TrainReport)> {
    cfg.validate()?;
    let dims = cfg.dims;
    let mut counts = vec![0u64; vocab_size];
    for seq in corpus {
        for &t in seq {
            if t >= vocab_size {
                return Err(Error::domain(format!("token {t} outside vocabulary of size {vocab_size}")));
            }
            counts[t] += 1;
        }
    }
    let mut rng = rng::derived(cfg.seed, &[0x5347]);
    let bound = 0.5 / dims as f64;
    let input: Vec<f64> = (0..vocab_size * dims).map(|_| rng.gen_range(-bound..bound)).collect();
    let mut model = SgnsModel {
        dims,
        vocab_size,
        input,
        output: vec![0.0; vocab_size * dims],
        counts,
    };
    let mut report = TrainReport::default();
    let weights: Vec<f64> = model.counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
    let Ok(noise) = WeightedIndex::new(&weights) else {
        // no tokens at all: nothing to learn
        return Ok((model, report));
    };

    let total_tokens: usize = corpus.iter().map(Vec::len).sum();
    let total_steps = (total_tokens * cfg.epochs).max(1) as f64;
    let min_lr = cfg.learning_rate * cfg.min_lr_fraction;
    let mut step = 0usize;
    let mut grad_u = vec![0.0; dims];
    let mut negs: Vec<usize> = Vec::with_capacity(cfg.negatives);

    for epoch in 0..cfg.epochs {
        let mut loss_sum = 0.0;
        let mut pairs = 0usize;
        for seq in corpus {
            for (i, &center) in seq.iter().enumerate() {
                let lr = (cfg.learning_rate * (1.0 - step as f64 / total_steps)).max(min_lr);
                step += 1;
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window + 1).min(seq.len());
                for (j, &context) in seq.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    negs.clear();
                    for _ in 0..cfg.negatives {
                        let n = noise.sample(&mut rng);
                        if n != context {
                            negs.push(n);
                        }
                    }
                    loss_sum += sgd_pair(&mut model, center, context, &negs, lr, &mut grad_u);
                    pairs += 1;
                }
            }
        }
        let mean = if pairs == 0 { 0.0 } else { loss_sum / pairs as f64 };
        if !mean.is_finite() {
            return Err(Error::Training(format!("non-finite skip-gram loss in epoch {epoch}")));
        }
        check_divergence(&model, cfg.max_norm)?;
        log::debug!("skip-gram epoch {epoch}: mean loss {mean:.5} over {pairs} pairs");
        report.epoch_losses.push(mean);
        report.pairs_per_epoch = pairs;
    }
    Ok((model, report))
}

/// One SGD step on a (centre, context, negatives) group; returns the pre-update loss.
fn sgd_pair(m: &mut SgnsModel, center: usize, context: usize, negs: &[usize], lr: f64, grad_u: &mut [f64]) -> f64 {
    let d = m.dims;
    let cu = center * d;
    grad_u.iter_mut().for_each(|g| *g = 0.0);
    let mut loss = 0.0;
    for (target, positive) in std::iter::once((context, true)).chain(negs.iter().map(|&n| (n, false))) {
        let tv = target * d;
        let score = dot(&m.input[cu..cu + d], &m.output[tv..tv + d]);
        loss += if positive { neg_log_sigmoid(score) } else { neg_log_sigmoid(-score) };
        let g = coefficient(score, positive);
        for k in 0..d {
            grad_u[k] += g * m.output[tv + k];
            m.output[tv + k] -= lr * g * m.input[cu + k];
        }
    }
    for k in 0..d {
        m.input[cu + k] -= lr * grad_u[k];
    }
    loss
}

fn check_divergence(m: &SgnsModel, max_norm: f64) -> Result<()> {
    for (t, row) in m.input.chunks(m.dims).enumerate() {
        let norm = dot(row, row).sqrt();
        if !norm.is_finite() || norm > max_norm {
            return Err(Error::Training(format!("embedding of token {t} diverged (norm {norm})")));
        }
    }
    Ok(())
}
