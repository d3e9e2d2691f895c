//! Shared fixtures for the criterion benches.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reviewkg::features::FeatureMatrix;

/// Undirected random graph: a ring (so nothing is isolated) plus random chords.
/// Adjacency lists are sorted and deduplicated.
pub fn random_graph(n: usize, extra_edges: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![Vec::new(); n];
    let add = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for i in 0..n {
        add(i, (i + 1) % n, &mut adj);
    }
    for _ in 0..extra_edges {
        let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
        add(a, b, &mut adj);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

pub fn random_labels(n: usize, seed: u64) -> Vec<u8> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| r.gen_range(1..=5)).collect()
}

/// Dense features whose first column is correlated with the label.
pub fn random_matrix(n: usize, d: usize, seed: u64) -> FeatureMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let labels = random_labels(n, seed ^ 1);
    let rows = labels
        .iter()
        .map(|&l| {
            let mut row: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
            row[0] += l as f64 * 0.5;
            row
        })
        .collect();
    FeatureMatrix::from_dense(rows, labels).expect("consistent shapes")
}

/// Token documents drawn from a Zipf-like vocabulary.
pub fn random_docs(n_docs: usize, vocab: usize, seed: u64) -> Vec<Vec<String>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..vocab).map(|i| format!("w{i}")).collect();
    let weights: Vec<(usize, f64)> = (0..vocab).map(|i| (i, 1.0 / (i + 1) as f64)).collect();
    (0..n_docs)
        .map(|_| {
            let len = r.gen_range(20..80);
            (0..len)
                .map(|_| words[weights.choose_weighted(&mut r, |w| w.1).expect("weights").0].clone())
                .collect()
        })
        .collect()
}
