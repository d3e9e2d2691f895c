//! Second-order biased random walks and node embeddings trained on them.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgraph::{KnowledgeGraph, NodeLabel};
use crate::rng;
use crate::skipgram::{self, SgnsConfig, TrainReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkConfig {
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub return_p: f64,
    pub inout_q: f64,
    pub window: usize,
    pub dims: usize,
    pub iterations: usize,
    pub negatives_k: usize,
    pub learning_rate: f64,
    pub max_norm: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            walk_length: 80,
            walks_per_node: 10,
            return_p: 1.0,
            inout_q: 1.0,
            window: 10,
            dims: 10,
            iterations: 1,
            negatives_k: 5,
            learning_rate: 0.025,
            max_norm: 1e3,
            seed: 42,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walk_length == 0 {
            return Err(Error::domain("walk_length must be at least 1"));
        }
        if self.dims == 0 {
            return Err(Error::domain("dims must be at least 1"));
        }
        if self.window == 0 {
            return Err(Error::domain("window must be at least 1"));
        }
        for (name, v) in [("return_p", self.return_p), ("inout_q", self.inout_q)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn sgns(&self) -> SgnsConfig {
        SgnsConfig {
            dims: self.dims,
            window: self.window,
            epochs: self.iterations,
            negatives: self.negatives_k,
            learning_rate: self.learning_rate,
            max_norm: self.max_norm,
            seed: self.seed,
            ..SgnsConfig::default()
        }
    }
}

/// Unnormalised weight of stepping to `next` having arrived at the current node from `prev`.
pub fn transition_weight(adj: &[Vec<usize>], prev: usize, next: usize, p: f64, q: f64) -> f64 {
    if next == prev {
        1.0 / p
    } else if adj[prev].binary_search(&next).is_ok() {
        1.0
    } else {
        1.0 / q
    }
}

fn walk_from(adj: &[Vec<usize>], start: usize, cfg: &WalkConfig, rng: &mut rng::Rng) -> Vec<usize> {
    let mut walk = Vec::with_capacity(cfg.walk_length);
    walk.push(start);
    if adj[start].is_empty() {
        return walk;
    }
    let first = adj[start][rng.gen_range(0..adj[start].len())];
    walk.push(first);
    let max_w = (1.0 / cfg.return_p).max(1.0).max(1.0 / cfg.inout_q);
    while walk.len() < cfg.walk_length {
        let cur = walk[walk.len() - 1];
        let prev = walk[walk.len() - 2];
        let nbrs = &adj[cur];
        // rejection sampling against the largest possible weight
        let next = loop {
            let cand = nbrs[rng.gen_range(0..nbrs.len())];
            let w = transition_weight(adj, prev, cand, cfg.return_p, cfg.inout_q);
            if rng.gen::<f64>() * max_w < w {
                break cand;
            }
        };
        walk.push(next);
    }
    walk.truncate(cfg.walk_length);
    walk
}

/// Walks over an undirected adjacency list (sorted, deduplicated, no self loops).
///
/// Output order is round-major: all start nodes for round 0, then round 1, and
/// so on. Each walk has its own generator derived from (seed, node, round), so
/// the result does not depend on thread scheduling.
pub fn generate_walks_adj(adj: &[Vec<usize>], cfg: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    cfg.validate()?;
    let n = adj.len();
    let mut walks = Vec::with_capacity(n * cfg.walks_per_node);
    for round in 0..cfg.walks_per_node {
        let batch: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|node| {
                let mut r = rng::derived(cfg.seed, &[0x3a1c, node as u64, round as u64]);
                walk_from(adj, node, cfg, &mut r)
            })
            .collect();
        walks.extend(batch);
    }
    Ok(walks)
}

pub fn generate_walks(g: &KnowledgeGraph, cfg: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    generate_walks_adj(&g.undirected_neighbors(), cfg)
}

/// Node id -> vector; only nodes that took part in at least one training pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    pub dims: usize,
    pub vectors: BTreeMap<usize, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn get(&self, node: usize) -> Option<&[f64]> {
        self.vectors.get(&node).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `node_id,label,dim_0,...`; labels come from `g` when given.
    pub fn write_csv<W: Write>(&self, w: W, g: Option<&KnowledgeGraph>) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["node_id".to_string(), "label".to_string()];
        header.extend((0..self.dims).map(|i| format!("dim_{i}")));
        out.write_record(&header)?;
        for (node, v) in &self.vectors {
            let label = g
                .and_then(|g| g.node(*node))
                .map(|n| n.label.to_string())
                .unwrap_or_default();
            let mut rec = vec![node.to_string(), label];
            rec.extend(v.iter().map(|x| x.to_string()));
            out.write_record(&rec)?;
        }
        out.flush().map_err(|e| Error::io("<embeddings csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.get(0) != Some("node_id") || headers.get(1) != Some("label") {
            return Err(Error::input("embedding CSV must start with node_id,label"));
        }
        let dims = headers.len() - 2;
        let mut vectors = BTreeMap::new();
        for rec in rd.records() {
            let rec = rec?;
            let node: usize = rec[0]
                .parse()
                .map_err(|_| Error::input(format!("bad node id `{}`", &rec[0])))?;
            let v = rec
                .iter()
                .skip(2)
                .map(|x| x.parse::<f64>().map_err(|_| Error::input(format!("bad embedding value `{x}`"))))
                .collect::<Result<Vec<_>>>()?;
            if v.len() != dims {
                return Err(Error::input(format!("node {node} has {} values, expected {dims}", v.len())));
            }
            vectors.insert(node, v);
        }
        Ok(Self { dims, vectors })
    }
}

/// Skip-gram training over walks. Nodes that only ever occur in single-node
/// walks receive no vector.
pub fn train_embeddings(walks: &[Vec<usize>], n_nodes: usize, cfg: &WalkConfig) -> Result<(EmbeddingTable, TrainReport)> {
    cfg.validate()?;
    let corpus: Vec<Vec<usize>> = walks.iter().filter(|w| w.len() > 1).cloned().collect();
    let (model, report) = skipgram::train(&corpus, n_nodes, &cfg.sgns())?;
    let vectors = (0..n_nodes)
        .filter(|&t| model.counts[t] > 0)
        .map(|t| (t, model.vector(t).to_vec()))
        .collect();
    Ok((EmbeddingTable { dims: cfg.dims, vectors }, report))
}

/// Walks plus training for a whole graph.
pub fn embed_graph(g: &KnowledgeGraph, cfg: &WalkConfig) -> Result<(EmbeddingTable, TrainReport)> {
    let walks = generate_walks(g, cfg)?;
    train_embeddings(&walks, g.node_count(), cfg)
}

/// Review id -> vector for every review node; isolated reviews get zeros.
pub fn review_embeddings(table: &EmbeddingTable, g: &KnowledgeGraph) -> BTreeMap<usize, Vec<f64>> {
    g.review_nodes()
        .filter_map(|n| {
            let review_id = n.props.review_id?;
            let v = match table.get(n.id) {
                Some(v) => v.to_vec(),
                None => {
                    log::warn!("review node {} has no embedding; using zeros", n.id);
                    vec![0.0; table.dims]
                }
            };
            Some((review_id, v))
        })
        .collect()
}

/// Store review vectors on the review nodes' props.
pub fn attach_review_embeddings(table: &EmbeddingTable, g: &mut KnowledgeGraph) {
    let ids: Vec<usize> = g.review_nodes().map(|n| n.id).collect();
    for id in ids {
        let v = table.get(id).map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; table.dims]);
        if let Some(p) = g.node_props_mut(id) {
            p.embedding = Some(v);
        }
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Label of each node, for callers that only hold an adjacency view.
pub fn node_labels(g: &KnowledgeGraph) -> Vec<NodeLabel> {
    g.nodes().iter().map(|n| n.label).collect()
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;
    use crate::corpus::ReviewRecord;
    use crate::extraction::Triple;

    fn path3() -> Vec<Vec<usize>> {
        vec![vec![1], vec![0, 2], vec![1]]
    }

    #[test]
    fn uniform_first_step_on_path() {
        let cfg = WalkConfig { walk_length: 2, walks_per_node: 10_000, ..Default::default() };
        let walks = generate_walks_adj(&path3(), &cfg).unwrap();
        let from_b: Vec<&Vec<usize>> = walks.iter().filter(|w| w[0] == 1).collect();
        assert_eq!(from_b.len(), 10_000);
        let to_a = from_b.iter().filter(|w| w[1] == 0).count() as f64 / 10_000.0;
        assert!((to_a - 0.5).abs() < 0.02, "{to_a}");
    }

    #[test]
    fn isolated_node_walk() {
        let walks = generate_walks_adj(&[vec![]], &WalkConfig::default()).unwrap();
        assert_eq!(walks.len(), 10);
        assert!(walks.iter().all(|w| w == &vec![0]));
    }

    #[test]
    fn empty_graph_no_walks() {
        assert!(generate_walks_adj(&[], &WalkConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn walks_deterministic_and_valid() {
        let adj = vec![vec![1, 2], vec![0, 2], vec![0, 1, 3], vec![2]];
        let cfg = WalkConfig { walk_length: 20, return_p: 0.5, inout_q: 2.0, ..Default::default() };
        let a = generate_walks_adj(&adj, &cfg).unwrap();
        assert_eq!(a, generate_walks_adj(&adj, &cfg).unwrap());
        for w in &a {
            assert_eq!(w.len(), 20);
            for s in w.windows(2) {
                assert!(adj[s[0]].contains(&s[1]));
            }
        }
    }

    #[test]
    fn invalid_config_rejected() {
        for cfg in [
            WalkConfig { walk_length: 0, ..Default::default() },
            WalkConfig { return_p: 0.0, ..Default::default() },
            WalkConfig { inout_q: -1.0, ..Default::default() },
            WalkConfig { window: 0, ..Default::default() },
            WalkConfig { dims: 0, ..Default::default() },
        ] {
            assert!(cfg.validate().is_err());
        }
    }

    fn small_graph() -> KnowledgeGraph {
        let reviews: Vec<ReviewRecord> = (0..4)
            .map(|i| ReviewRecord {
                review_id: i,
                hotel_id: "h".into(),
                rating: 3,
                title: String::new(),
                text: String::new(),
            })
            .collect();
        let triples = vec![
            Triple::new(0, "bed", "was", "soft"),
            Triple::new(1, "pool", "was", "cold"),
            Triple::new(2, "bed", "was", "hard"),
        ];
        KnowledgeGraph::build(&reviews, &triples, &HashSet::new()).0
    }

    #[test]
    fn review_vectors_have_dims() {
        let g = small_graph();
        let cfg = WalkConfig { dims: 6, walk_length: 10, walks_per_node: 3, ..Default::default() };
        let (table, _) = embed_graph(&g, &cfg).unwrap();
        let reviews = review_embeddings(&table, &g);
        // review 3 has no triples, so it is not in the graph at all
        assert_eq!(reviews.len(), 3);
        assert!(reviews.values().all(|v| v.len() == 6 && v.iter().all(|x| x.is_finite())));
    }

    #[test]
    fn isolated_review_gets_zero_vector() {
        let mut g = small_graph();
        let (mut table, _) = embed_graph(&g, &WalkConfig { dims: 4, walk_length: 5, ..Default::default() }).unwrap();
        let r0 = g.review_node(0).unwrap();
        table.vectors.remove(&r0);
        assert_eq!(review_embeddings(&table, &g)[&0], vec![0.0; 4]);
        attach_review_embeddings(&table, &mut g);
        assert_eq!(g.node(r0).unwrap().props.embedding.as_deref(), Some(&[0.0; 4][..]));
    }

    #[test]
    fn embedding_csv_round_trip() {
        let g = small_graph();
        let (table, _) = embed_graph(&g, &WalkConfig { dims: 3, walk_length: 5, ..Default::default() }).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf, Some(&g)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node_id,label,dim_0,dim_1,dim_2\n0,hotel,"));
        assert_eq!(EmbeddingTable::read_csv(buf.as_slice()).unwrap(), table);
    }

    proptest! {
        #[test]
        fn walk_steps_follow_edges(edges in prop::collection::vec((0usize..8, 0usize..8), 0..20), seed in 0u64..1000) {
            let mut adj = vec![Vec::new(); 8];
            for (a, b) in edges {
                if a != b { adj[a].push(b); adj[b].push(a); }
            }
            for l in &mut adj { l.sort_unstable(); l.dedup(); }
            let cfg = WalkConfig { walk_length: 12, walks_per_node: 2, return_p: 2.0, inout_q: 0.5, seed, ..Default::default() };
            let walks = generate_walks_adj(&adj, &cfg).unwrap();
            prop_assert_eq!(walks.len(), 16);
            for (i, w) in walks.iter().enumerate() {
                prop_assert_eq!(w[0], i % 8);
                prop_assert_eq!(w.len(), if adj[w[0]].is_empty() { 1 } else { 12 });
                for s in w.windows(2) { prop_assert!(adj[s[0]].binary_search(&s[1]).is_ok()); }
            }
        }
    }
}
