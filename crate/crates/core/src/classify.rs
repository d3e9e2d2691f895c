//! Classifiers: random forest (CART/Gini), multinomial logistic regression,
//! a one-hidden-layer MLP and the most-frequent baseline.
//!
//! Ties are broken towards the smallest label everywhere.

use std::collections::VecDeque;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Row};
use crate::rng;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierKind {
    RandomForest,
    Logistic,
    Mlp,
    DummyMostFrequent,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::RandomForest,
        ClassifierKind::Logistic,
        ClassifierKind::Mlp,
        ClassifierKind::DummyMostFrequent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::RandomForest => "random-forest",
            ClassifierKind::Logistic => "logistic",
            ClassifierKind::Mlp => "mlp",
            ClassifierKind::DummyMostFrequent => "dummy-most-frequent",
        }
    }

    /// Whether inputs should be standardised before training.
    pub fn wants_scaling(self) -> bool {
        matches!(self, ClassifierKind::Logistic | ClassifierKind::Mlp)
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-forest" | "rf" => Ok(ClassifierKind::RandomForest),
            "logistic" | "lr" => Ok(ClassifierKind::Logistic),
            "mlp" | "nn" => Ok(ClassifierKind::Mlp),
            "dummy-most-frequent" | "dummy" | "mf" => Ok(ClassifierKind::DummyMostFrequent),
            other => Err(Error::input(format!("unknown classifier `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub n_trees: usize,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Candidate features per split; `None` means ceil(sqrt(n_features)).
    pub max_features: Option<usize>,
    pub l2: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub mlp_learning_rate: f64,
    pub mlp_alpha: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            bootstrap: true,
            max_depth: None,
            min_samples_split: 2,
            max_features: None,
            l2: 1.0,
            max_iter: 1000,
            tol: 1e-5,
            hidden: 100,
            epochs: 200,
            batch_size: 32,
            mlp_learning_rate: 0.01,
            mlp_alpha: 1e-4,
        }
    }
}

// ---------------------------------------------------------------------------
// decision trees

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf { class: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict_row(&self, row: &Row) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { class } => return *class,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if row.get(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((at, d)) = stack.pop() {
            best = best.max(d);
            if let TreeNode::Split { left, right, .. } = self.nodes[at] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        best
    }
}

fn argmax_smallest(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

struct TreeParams<'a> {
    m: &'a FeatureMatrix,
    y: &'a [usize],
    n_classes: usize,
    /// Column visiting order is drawn over this canonical permutation.
    canonical: &'a [usize],
    max_features: usize,
    max_depth: Option<usize>,
    min_samples_split: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

fn best_split_on(p: &TreeParams, samples: &[usize], feature: usize, total: &[usize], buf: &mut Vec<(f64, usize)>) -> Option<Split> {
    buf.clear();
    buf.extend(samples.iter().map(|&i| (p.m.rows[i].get(feature), p.y[i])));
    buf.sort_by(|a, b| a.0.total_cmp(&b.0));
    if buf[0].0 == buf[buf.len() - 1].0 {
        return None;
    }
    let n = buf.len();
    let mut left = vec![0usize; p.n_classes];
    let mut right = total.to_vec();
    let (mut sl, mut sr): (f64, f64) = (0.0, total.iter().map(|&c| (c * c) as f64).sum());
    let mut best: Option<Split> = None;
    for k in 0..n - 1 {
        let c = buf[k].1;
        // incremental sums of squared class counts
        sl += (2 * left[c] + 1) as f64;
        sr -= (2 * right[c] - 1) as f64;
        left[c] += 1;
        right[c] -= 1;
        if buf[k].0 == buf[k + 1].0 {
            continue;
        }
        let nl = (k + 1) as f64;
        let nr = (n - k - 1) as f64;
        // maximising this minimises the weighted Gini impurity
        let score = sl / nl + sr / nr;
        if best.as_ref().map_or(true, |b| score > b.score) {
            let mut threshold = buf[k].0 + (buf[k + 1].0 - buf[k].0) / 2.0;
            if threshold >= buf[k + 1].0 {
                threshold = buf[k].0;
            }
            best = Some(Split { feature, threshold, score });
        }
    }
    best
}

fn grow_tree(p: &TreeParams, samples: Vec<usize>, rng: &mut rng::Rng) -> Tree {
    let mut nodes = vec![TreeNode::Leaf { class: 0 }];
    let mut stack = vec![(0usize, samples, 0usize)];
    let mut buf = Vec::new();
    let n_features = p.m.n_features;
    let mut order: Vec<usize> = (0..n_features).collect();
    while let Some((at, samples, depth)) = stack.pop() {
        let mut counts = vec![0usize; p.n_classes];
        for &i in &samples {
            counts[p.y[i]] += 1;
        }
        let majority = argmax_smallest(&counts);
        nodes[at] = TreeNode::Leaf { class: majority };
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || samples.len() < p.min_samples_split || p.max_depth.is_some_and(|d| depth >= d) {
            continue;
        }
        // visit columns in random order until enough non-constant ones were evaluated
        let mut best: Option<Split> = None;
        let mut evaluated = 0;
        let mut remaining = n_features;
        while evaluated < p.max_features && remaining > 0 {
            let k = rng.gen_range(0..remaining);
            remaining -= 1;
            order.swap(k, remaining);
            let feature = p.canonical[order[remaining]];
            if let Some(s) = best_split_on(p, &samples, feature, &counts, &mut buf) {
                evaluated += 1;
                if best.as_ref().map_or(true, |b| s.score > b.score) {
                    best = Some(s);
                }
            }
        }
        order.sort_unstable();
        let Some(split) = best else { continue };
        let (l, r): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| p.m.rows[i].get(split.feature) <= split.threshold);
        let li = nodes.len();
        nodes.push(TreeNode::Leaf { class: majority });
        nodes.push(TreeNode::Leaf { class: majority });
        nodes[at] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: li,
            right: li + 1,
        };
        stack.push((li + 1, r, depth + 1));
        stack.push((li, l, depth + 1));
    }
    Tree { nodes }
}

fn train_forest(m: &FeatureMatrix, y: &[usize], n_classes: usize, cfg: &ClassifierConfig, seed: u64) -> Vec<Tree> {
    let mut canonical: Vec<usize> = (0..m.n_features).collect();
    canonical.sort_by(|&a, &b| m.feature_names[a].cmp(&m.feature_names[b]));
    let max_features = cfg
        .max_features
        .unwrap_or_else(|| (m.n_features as f64).sqrt().ceil() as usize)
        .clamp(1, m.n_features.max(1));
    let p = TreeParams {
        m,
        y,
        n_classes,
        canonical: &canonical,
        max_features,
        max_depth: cfg.max_depth,
        min_samples_split: cfg.min_samples_split.max(2),
    };
    (0..cfg.n_trees.max(1))
        .into_par_iter()
        .map(|t| {
            let mut r = rng::derived(seed, &[0x7ee5, t as u64]);
            let n = m.len();
            let samples: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| r.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_tree(&p, samples, &mut r)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// logistic regression

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

/// Penalised multinomial cross-entropy. Parameters are laid out as the
/// `n_classes x n_features` weight matrix (row-major) followed by the biases.
pub struct LogisticProblem<'a> {
    pub x: &'a [Row],
    pub y: &'a [usize],
    pub n_features: usize,
    pub n_classes: usize,
    pub l2: f64,
}

impl LogisticProblem<'_> {
    pub fn n_params(&self) -> usize {
        self.n_classes * (self.n_features + 1)
    }

    /// `mean CE + l2/(2n)·‖W‖²` (biases unpenalised) and its gradient.
    pub fn objective(&self, params: &[f64]) -> (f64, Vec<f64>) {
        let (d, c) = (self.n_features, self.n_classes);
        let n = self.x.len() as f64;
        let (w, b) = params.split_at(c * d);
        let mut grad = vec![0.0; params.len()];
        let mut loss = 0.0;
        let mut z = vec![0.0; c];
        for (row, &y) in self.x.iter().zip(self.y) {
            for k in 0..c {
                z[k] = b[k] + row.dot(&w[k * d..(k + 1) * d]);
            }
            softmax_in_place(&mut z);
            loss -= z[y].max(f64::MIN_POSITIVE).ln();
            for k in 0..c {
                let g = (z[k] - if k == y { 1.0 } else { 0.0 }) / n;
                for (j, xv) in row.entries() {
                    grad[k * d + j] += g * xv;
                }
                grad[c * d + k] += g;
            }
        }
        let mut reg = 0.0;
        for (i, &wi) in w.iter().enumerate() {
            reg += wi * wi;
            grad[i] += self.l2 / n * wi;
        }
        (loss / n + self.l2 / (2.0 * n) * reg, grad)
    }

    pub fn probabilities(&self, params: &[f64], row: &Row) -> Vec<f64> {
        logistic_proba(params, self.n_features, self.n_classes, row)
    }
}

fn logistic_proba(params: &[f64], d: usize, c: usize, row: &Row) -> Vec<f64> {
    let (w, b) = params.split_at(c * d);
    let mut z: Vec<f64> = (0..c).map(|k| b[k] + row.dot(&w[k * d..(k + 1) * d])).collect();
    softmax_in_place(&mut z);
    z
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Limited-memory BFGS with Armijo backtracking. Returns (x, iterations).
pub fn lbfgs<F: Fn(&[f64]) -> (f64, Vec<f64>)>(f: F, mut x: Vec<f64>, max_iter: usize, tol: f64) -> (Vec<f64>, usize) {
    const MEMORY: usize = 10;
    let (mut fx, mut g) = f(&x);
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iters = 0;
    while iters < max_iter && norm(&g) >= tol {
        iters += 1;
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dotv(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let gamma = dotv(s, y) / dotv(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.into_iter().rev()) {
            let bcoef = rho * dotv(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - bcoef) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dotv(&g, &dir);
        if slope >= 0.0 {
            hist.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dotv(&g, &g);
        }
        let mut t = if hist.is_empty() { 1.0 / norm(&g).max(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            let (fnew, gnew) = f(&xn);
            if fnew.is_finite() && fnew <= fx + 1e-4 * t * slope {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else { break };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dotv(&s, &y);
        if sy > 1e-12 {
            if hist.len() == MEMORY {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        let stalled = (fx - fnew).abs() <= 1e-15 * fx.abs().max(1.0);
        x = xn;
        fx = fnew;
        g = gnew;
        if stalled {
            break;
        }
    }
    (x, iters)
}

// ---------------------------------------------------------------------------
// MLP

/// One ReLU hidden layer and a softmax output. `w1` is stored feature-major
/// (`n_features x hidden`) so sparse inputs touch only their own rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNet {
    pub n_features: usize,
    pub hidden: usize,
    pub n_classes: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `hidden x n_classes`
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpNet {
    pub fn init(n_features: usize, hidden: usize, n_classes: usize, rng: &mut rng::Rng) -> Self {
        let glorot = |fan_in: usize, fan_out: usize| (6.0 / (fan_in + fan_out) as f64).sqrt();
        let b1 = glorot(n_features, hidden);
        let b2 = glorot(hidden, n_classes);
        Self {
            n_features,
            hidden,
            n_classes,
            w1: (0..n_features * hidden).map(|_| rng.gen_range(-b1..b1)).collect(),
            b1: (0..hidden).map(|_| rng.gen_range(-b1..b1)).collect(),
            w2: (0..hidden * n_classes).map(|_| rng.gen_range(-b2..b2)).collect(),
            b2: (0..n_classes).map(|_| rng.gen_range(-b2..b2)).collect(),
        }
    }

    fn zeros_like(&self) -> Self {
        Self {
            w1: vec![0.0; self.w1.len()],
            b1: vec![0.0; self.b1.len()],
            w2: vec![0.0; self.w2.len()],
            b2: vec![0.0; self.b2.len()],
            ..*self
        }
    }

    /// Hidden activations and class probabilities.
    fn forward(&self, row: &Row) -> (Vec<f64>, Vec<f64>) {
        let h = self.hidden;
        let mut a = self.b1.clone();
        for (j, x) in row.entries() {
            if x != 0.0 {
                let w = &self.w1[j * h..(j + 1) * h];
                a.iter_mut().zip(w).for_each(|(ai, wi)| *ai += x * wi);
            }
        }
        a.iter_mut().for_each(|v| *v = v.max(0.0));
        let mut z = self.b2.clone();
        for (k, &ak) in a.iter().enumerate() {
            if ak != 0.0 {
                let w = &self.w2[k * self.n_classes..(k + 1) * self.n_classes];
                z.iter_mut().zip(w).for_each(|(zi, wi)| *zi += ak * wi);
            }
        }
        softmax_in_place(&mut z);
        (a, z)
    }

    pub fn predict_proba_row(&self, row: &Row) -> Vec<f64> {
        self.forward(row).1
    }

    /// `mean CE + alpha/(2n)·(‖W1‖² + ‖W2‖²)` over the batch, with its gradient.
    pub fn loss_and_grad(&self, rows: &[&Row], y: &[usize], alpha: f64) -> (f64, MlpNet) {
        let n = rows.len() as f64;
        let (h, c) = (self.hidden, self.n_classes);
        let mut g = self.zeros_like();
        let mut loss = 0.0;
        let mut delta_h = vec![0.0; h];
        for (row, &yi) in rows.iter().zip(y) {
            let (a, p) = self.forward(row);
            loss -= p[yi].max(f64::MIN_POSITIVE).ln();
            let dz: Vec<f64> = (0..c).map(|k| (p[k] - if k == yi { 1.0 } else { 0.0 }) / n).collect();
            for k in 0..c {
                g.b2[k] += dz[k];
            }
            for j in 0..h {
                let mut back = 0.0;
                if a[j] > 0.0 {
                    for k in 0..c {
                        g.w2[j * c + k] += a[j] * dz[k];
                        back += self.w2[j * c + k] * dz[k];
                    }
                }
                delta_h[j] = back;
                g.b1[j] += back;
            }
            for (f, x) in row.entries() {
                if x != 0.0 {
                    let gw = &mut g.w1[f * h..(f + 1) * h];
                    gw.iter_mut().zip(&delta_h).for_each(|(gi, di)| *gi += x * di);
                }
            }
        }
        let mut reg = 0.0;
        for (gw, w) in g.w1.iter_mut().zip(&self.w1).chain(g.w2.iter_mut().zip(&self.w2)) {
            reg += w * w;
            *gw += alpha / n * w;
        }
        (loss / n + alpha / (2.0 * n) * reg, g)
    }

    pub fn params(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let mut at = 0;
        for v in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            let n = v.len();
            v.copy_from_slice(&p[at..at + n]);
            at += n;
        }
    }

    fn sgd_step(&mut self, g: &MlpNet, lr: f64) {
        for (w, gw) in [
            (&mut self.w1, &g.w1),
            (&mut self.b1, &g.b1),
            (&mut self.w2, &g.w2),
            (&mut self.b2, &g.b2),
        ] {
            w.iter_mut().zip(gw).for_each(|(wi, gi)| *wi -= lr * gi);
        }
    }
}

fn train_mlp_net(m: &FeatureMatrix, y: &[usize], n_classes: usize, cfg: &ClassifierConfig, seed: u64) -> Result<(MlpNet, Vec<f64>)> {
    let mut r = rng::derived(seed, &[0x41a9]);
    let mut net = MlpNet::init(m.n_features, cfg.hidden.max(1), n_classes, &mut r);
    let batch = cfg.batch_size.clamp(1, m.len());
    let mut order: Vec<usize> = (0..m.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut r);
        let mut total = 0.0;
        for chunk in order.chunks(batch) {
            let rows: Vec<&Row> = chunk.iter().map(|&i| &m.rows[i]).collect();
            let ys: Vec<usize> = chunk.iter().map(|&i| y[i]).collect();
            let (loss, g) = net.loss_and_grad(&rows, &ys, cfg.mlp_alpha);
            if !loss.is_finite() {
                return Err(Error::Training(format!("MLP loss became non-finite in epoch {epoch}")));
            }
            total += loss * chunk.len() as f64;
            net.sgd_step(&g, cfg.mlp_learning_rate);
        }
        epoch_losses.push(total / m.len() as f64);
    }
    if net.params().iter().any(|v| !v.is_finite()) {
        return Err(Error::Training("MLP weights became non-finite".into()));
    }
    Ok((net, epoch_losses))
}

// ---------------------------------------------------------------------------
// trained model

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ModelParams {
    Forest { trees: Vec<Tree> },
    Logistic { params: Vec<f64>, iterations: usize },
    Mlp { net: MlpNet, epoch_losses: Vec<f64> },
    /// Always predicts `classes[class]`; used by the dummy and for single-class training data.
    Constant { class: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub kind: ClassifierKind,
    pub config: ClassifierConfig,
    pub seed: u64,
    pub n_features: usize,
    /// Sorted training labels; class index `i` means label `classes[i]`.
    pub classes: Vec<u8>,
    pub params: ModelParams,
}

fn encode_labels(labels: &[u8]) -> (Vec<u8>, Vec<usize>) {
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let y = labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label collected above"))
        .collect();
    (classes, y)
}

pub fn train(m: &FeatureMatrix, kind: ClassifierKind, cfg: &ClassifierConfig, seed: u64) -> Result<TrainedModel> {
    m.validate()?;
    if m.is_empty() {
        return Err(Error::domain("cannot train on an empty matrix"));
    }
    let (classes, y) = encode_labels(&m.labels);
    let mut counts = vec![0usize; classes.len()];
    y.iter().for_each(|&c| counts[c] += 1);
    let params = if kind == ClassifierKind::DummyMostFrequent {
        ModelParams::Constant { class: argmax_smallest(&counts) }
    } else if classes.len() == 1 {
        log::warn!("training data has a single class ({}); fitting a constant model", classes[0]);
        ModelParams::Constant { class: 0 }
    } else {
        match kind {
            ClassifierKind::RandomForest => ModelParams::Forest {
                trees: train_forest(m, &y, classes.len(), cfg, seed),
            },
            ClassifierKind::Logistic => {
                let problem = LogisticProblem {
                    x: &m.rows,
                    y: &y,
                    n_features: m.n_features,
                    n_classes: classes.len(),
                    l2: cfg.l2,
                };
                let x0 = vec![0.0; problem.n_params()];
                let (params, iterations) = lbfgs(|p| problem.objective(p), x0, cfg.max_iter, cfg.tol);
                if params.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Training("logistic regression produced non-finite weights".into()));
                }
                ModelParams::Logistic { params, iterations }
            }
            ClassifierKind::Mlp => {
                let (net, epoch_losses) = train_mlp_net(m, &y, classes.len(), cfg, seed)?;
                ModelParams::Mlp { net, epoch_losses }
            }
            ClassifierKind::DummyMostFrequent => unreachable!(),
        }
    };
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        kind,
        config: cfg.clone(),
        seed,
        n_features: m.n_features,
        classes,
        params,
    })
}

pub fn train_random_forest(m: &FeatureMatrix, n_trees: usize, seed: u64) -> Result<TrainedModel> {
    let cfg = ClassifierConfig { n_trees, ..Default::default() };
    train(m, ClassifierKind::RandomForest, &cfg, seed)
}

pub fn train_logistic(m: &FeatureMatrix, l2: f64, max_iter: usize, seed: u64) -> Result<TrainedModel> {
    let cfg = ClassifierConfig { l2, max_iter, ..Default::default() };
    train(m, ClassifierKind::Logistic, &cfg, seed)
}

pub fn train_mlp(m: &FeatureMatrix, hidden: usize, epochs: usize, lr: f64, seed: u64) -> Result<TrainedModel> {
    let cfg = ClassifierConfig {
        hidden,
        epochs,
        mlp_learning_rate: lr,
        ..Default::default()
    };
    train(m, ClassifierKind::Mlp, &cfg, seed)
}

pub fn train_dummy(m: &FeatureMatrix) -> Result<TrainedModel> {
    train(m, ClassifierKind::DummyMostFrequent, &ClassifierConfig::default(), 0)
}

impl TrainedModel {
    fn check_width(&self, m: &FeatureMatrix) -> Result<()> {
        if m.n_features != self.n_features {
            return Err(Error::domain(format!(
                "model expects {} features, matrix has {}",
                self.n_features, m.n_features
            )));
        }
        Ok(())
    }

    /// Class scores per row, in the order of `classes` (vote shares for forests).
    pub fn predict_proba(&self, m: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        self.check_width(m)?;
        let c = self.classes.len();
        Ok(m.rows
            .par_iter()
            .map(|row| match &self.params {
                ModelParams::Constant { class } => {
                    let mut p = vec![0.0; c];
                    p[*class] = 1.0;
                    p
                }
                ModelParams::Forest { trees } => {
                    let mut p = vec![0.0; c];
                    for t in trees {
                        p[t.predict_row(row)] += 1.0;
                    }
                    p.iter_mut().for_each(|v| *v /= trees.len() as f64);
                    p
                }
                ModelParams::Logistic { params, .. } => logistic_proba(params, self.n_features, c, row),
                ModelParams::Mlp { net, .. } => net.predict_proba_row(row),
            })
            .collect())
    }

    pub fn predict(&self, m: &FeatureMatrix) -> Result<Vec<u8>> {
        self.check_width(m)?;
        if let ModelParams::Forest { trees } = &self.params {
            let c = self.classes.len();
            return Ok(m.rows
                .par_iter()
                .map(|row| {
                    let mut votes = vec![0usize; c];
                    for t in trees {
                        votes[t.predict_row(row)] += 1;
                    }
                    self.classes[argmax_smallest(&votes)]
                })
                .collect());
        }
        Ok(self
            .predict_proba(m)?
            .iter()
            .map(|p| {
                let mut best = 0;
                for (k, &v) in p.iter().enumerate() {
                    if v > p[best] {
                        best = k;
                    }
                }
                self.classes[best]
            })
            .collect())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer(&mut w, self)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let m: Self = serde_json::from_reader(BufReader::new(f))?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::input(format!(
                "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                m.format_version
            )));
        }
        Ok(m)
    }
}

pub fn predict(model: &TrainedModel, m: &FeatureMatrix) -> Result<Vec<u8>> {
    model.predict(m)
}
