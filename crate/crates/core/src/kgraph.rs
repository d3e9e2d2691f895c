//! Typed review knowledge graph.
//!
//! Node kinds: `hotel`, `review`, `word` and `amenity`. Edges:
//!
//! * `HAS_REVIEW`: hotel -> review
//! * `CONTAINS`: review -> word/amenity
//! * relation edges named after the normalised predicate, word/amenity -> word/amenity,
//!   optionally carrying the triple's sentiment
//!
//! Node ids are dense and assigned in order of first occurrence, so a build is
//! deterministic for a fixed triple order.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::ReviewRecord;
use crate::error::{Error, Result};
use crate::extraction::Triple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeLabel {
    Hotel,
    Review,
    Word,
    Amenity,
}

impl NodeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeLabel::Hotel => "hotel",
            NodeLabel::Review => "review",
            NodeLabel::Word => "word",
            NodeLabel::Amenity => "amenity",
        }
    }

    pub fn is_entity(self) -> bool {
        matches!(self, NodeLabel::Word | NodeLabel::Amenity)
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hotel" => Ok(NodeLabel::Hotel),
            "review" => Ok(NodeLabel::Review),
            "word" => Ok(NodeLabel::Word),
            "amenity" => Ok(NodeLabel::Amenity),
            other => Err(Error::input(format!("unknown node label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeProps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review_id: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment_avg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub label: NodeLabel,
    pub name: String,
    #[serde(flatten)]
    pub props: NodeProps,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum EdgeKind {
    HasReview,
    Contains,
    /// A normalised predicate between two entity nodes.
    Relation(String),
}

impl EdgeKind {
    pub fn as_str(&self) -> &str {
        match self {
            EdgeKind::HasReview => "HAS_REVIEW",
            EdgeKind::Contains => "CONTAINS",
            EdgeKind::Relation(r) => r,
        }
    }
}

impl From<String> for EdgeKind {
    fn from(s: String) -> Self {
        match s.as_str() {
            "HAS_REVIEW" => EdgeKind::HasReview,
            "CONTAINS" => EdgeKind::Contains,
            _ => EdgeKind::Relation(s),
        }
    }
}

impl From<EdgeKind> for String {
    fn from(k: EdgeKind) -> Self {
        k.as_str().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentAggregate {
    pub avg: f64,
    pub min: f64,
    pub max: f64,
    /// Number of relation sentiments that entered the aggregate.
    pub count: usize,
}

impl SentimentAggregate {
    pub const ZERO: SentimentAggregate = SentimentAggregate {
        avg: 0.0,
        min: 0.0,
        max: 0.0,
        count: 0,
    };
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildCounts {
    pub triples_used: usize,
    pub skipped_unknown_review: usize,
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    hotel_index: HashMap<String, usize>,
    review_index: HashMap<usize, usize>,
    entity_index: HashMap<String, usize>,
    contains_pairs: HashSet<(usize, usize)>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl PartialEq for KnowledgeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

/// Serialised node-link document.
#[derive(Debug, Serialize, Deserialize)]
struct NodeLinkDoc {
    directed: bool,
    multigraph: bool,
    graph: serde_json::Map<String, serde_json::Value>,
    nodes: Vec<Node>,
    links: Vec<Edge>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: usize) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn review_node(&self, review_id: usize) -> Option<usize> {
        self.review_index.get(&review_id).copied()
    }

    pub fn entity_node(&self, name: &str) -> Option<usize> {
        self.entity_index.get(name).copied()
    }

    pub fn hotel_node(&self, hotel_id: &str) -> Option<usize> {
        self.hotel_index.get(hotel_id).copied()
    }

    pub fn review_nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.label == NodeLabel::Review)
    }

    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &Edge> {
        self.out_edges[node].iter().map(|&e| &self.edges[e])
    }

    pub fn in_edges(&self, node: usize) -> impl Iterator<Item = &Edge> {
        self.in_edges[node].iter().map(|&e| &self.edges[e])
    }

    pub fn node_props_mut(&mut self, id: usize) -> Option<&mut NodeProps> {
        self.nodes.get_mut(id).map(|n| &mut n.props)
    }

    fn push_node(&mut self, label: NodeLabel, name: String, props: NodeProps) -> usize {
        let id = self.nodes.len();
        match label {
            NodeLabel::Hotel => {
                self.hotel_index.insert(name.clone(), id);
            }
            NodeLabel::Review => {
                if let Some(r) = props.review_id {
                    self.review_index.insert(r, id);
                }
            }
            NodeLabel::Word | NodeLabel::Amenity => {
                self.entity_index.insert(name.clone(), id);
            }
        }
        self.nodes.push(Node { id, label, name, props });
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        id
    }

    fn push_edge(&mut self, edge: Edge) {
        let e = self.edges.len();
        if edge.kind == EdgeKind::Contains {
            self.contains_pairs.insert((edge.source, edge.target));
        }
        self.out_edges[edge.source].push(e);
        self.in_edges[edge.target].push(e);
        self.edges.push(edge);
    }

    fn ensure_entity(&mut self, name: &str, amenities: &HashSet<String>) -> usize {
        if let Some(id) = self.entity_index.get(name) {
            return *id;
        }
        let label = if amenities.contains(name) {
            NodeLabel::Amenity
        } else {
            NodeLabel::Word
        };
        self.push_node(label, name.to_string(), NodeProps::default())
    }

    fn ensure_contains(&mut self, review: usize, entity: usize) {
        if !self.contains_pairs.contains(&(review, entity)) {
            self.push_edge(Edge {
                source: review,
                target: entity,
                kind: EdgeKind::Contains,
                sentiment: None,
            });
        }
    }

    /// Review node plus its hotel node and `HAS_REVIEW` edge, created on first use.
    fn ensure_review(&mut self, review: &ReviewRecord) -> usize {
        if let Some(id) = self.review_index.get(&review.review_id) {
            return *id;
        }
        let hotel = match self.hotel_index.get(&review.hotel_id) {
            Some(h) => *h,
            None => self.push_node(NodeLabel::Hotel, review.hotel_id.clone(), NodeProps::default()),
        };
        let node = self.push_node(
            NodeLabel::Review,
            format!("review_{}", review.review_id),
            NodeProps {
                review_id: Some(review.review_id),
                rating: Some(review.rating),
                ..Default::default()
            },
        );
        self.push_edge(Edge {
            source: hotel,
            target: node,
            kind: EdgeKind::HasReview,
            sentiment: None,
        });
        node
    }

    /// Build from reviews and normalised, filtered triples.
    ///
    /// Each triple adds (or reuses) subject and object entity nodes, a relation
    /// edge between them carrying the triple's sentiment, and `CONTAINS` edges
    /// from the review. Entity nodes are shared across reviews; `CONTAINS` is
    /// added once per (review, entity) pair. Triples for unknown reviews are
    /// skipped and counted.
    pub fn build(reviews: &[ReviewRecord], triples: &[Triple], amenities: &HashSet<String>) -> (Self, BuildCounts) {
        let by_id: HashMap<usize, &ReviewRecord> = reviews.iter().map(|r| (r.review_id, r)).collect();
        let mut g = KnowledgeGraph::new();
        let mut counts = BuildCounts::default();
        for t in triples {
            let Some(review) = by_id.get(&t.review_id) else {
                counts.skipped_unknown_review += 1;
                continue;
            };
            let r = g.ensure_review(review);
            let s = g.ensure_entity(&t.subject, amenities);
            let o = g.ensure_entity(&t.object, amenities);
            g.push_edge(Edge {
                source: s,
                target: o,
                kind: EdgeKind::Relation(t.predicate.clone()),
                sentiment: t.sentiment,
            });
            g.ensure_contains(r, s);
            g.ensure_contains(r, o);
            counts.triples_used += 1;
        }
        if counts.skipped_unknown_review > 0 {
            log::warn!("{} triples reference unknown reviews", counts.skipped_unknown_review);
        }
        (g, counts)
    }

    /// Sentiment over relation edges whose endpoints are both contained in the
    /// review. Unset and exactly-zero sentiments are excluded; an empty set
    /// yields zeros.
    pub fn aggregate_sentiment(&self, review: usize) -> Result<SentimentAggregate> {
        match self.nodes.get(review) {
            Some(n) if n.label == NodeLabel::Review => {}
            Some(n) => return Err(Error::domain(format!("node {review} is a {} node, not a review", n.label))),
            None => return Err(Error::domain(format!("no node with id {review}"))),
        }
        let entities: BTreeSet<usize> = self
            .out_edges(review)
            .filter(|e| e.kind == EdgeKind::Contains)
            .map(|e| e.target)
            .collect();
        let values: Vec<f64> = entities
            .iter()
            .flat_map(|&s| self.out_edges(s))
            .filter(|e| matches!(e.kind, EdgeKind::Relation(_)) && entities.contains(&e.target))
            .filter_map(|e| e.sentiment)
            .filter(|&v| v != 0.0)
            .collect();
        if values.is_empty() {
            return Ok(SentimentAggregate::ZERO);
        }
        let sum: f64 = values.iter().sum();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(SentimentAggregate {
            // rounding in the sum can push the mean of equal values past them
            avg: (sum / values.len() as f64).clamp(min, max),
            min,
            max,
            count: values.len(),
        })
    }

    /// Compute and store aggregates on every review node. Returns them keyed by review id.
    pub fn annotate_sentiment(&mut self) -> Result<HashMap<usize, SentimentAggregate>> {
        let reviews: Vec<(usize, usize)> = self
            .review_nodes()
            .map(|n| (n.id, n.props.review_id.unwrap_or_default()))
            .collect();
        let mut out = HashMap::with_capacity(reviews.len());
        for (node, review_id) in reviews {
            let agg = self.aggregate_sentiment(node)?;
            let props = &mut self.nodes[node].props;
            props.sentiment_avg = Some(agg.avg);
            props.sentiment_min = Some(agg.min);
            props.sentiment_max = Some(agg.max);
            out.insert(review_id, agg);
        }
        Ok(out)
    }

    /// Undirected simple-graph view: sorted, deduplicated neighbour lists without self loops.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            if e.source != e.target {
                adj[e.source].push(e.target);
                adj[e.target].push(e.source);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Check edge-endpoint label rules and endpoint existence.
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            let (Some(s), Some(t)) = (self.nodes.get(e.source), self.nodes.get(e.target)) else {
                return Err(Error::domain(format!("edge {i} has a dangling endpoint")));
            };
            let ok = match e.kind {
                EdgeKind::HasReview => s.label == NodeLabel::Hotel && t.label == NodeLabel::Review,
                EdgeKind::Contains => s.label == NodeLabel::Review && t.label.is_entity(),
                EdgeKind::Relation(_) => s.label.is_entity() && t.label.is_entity(),
            };
            if !ok {
                return Err(Error::domain(format!(
                    "edge {i} ({}) connects {} -> {}",
                    e.kind.as_str(),
                    s.label,
                    t.label
                )));
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::domain(format!("node at position {i} has id {}", n.id)));
            }
        }
        Ok(())
    }

    /// Reassemble from raw parts, rebuilding indexes.
    pub fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        let mut g = KnowledgeGraph::new();
        for n in nodes {
            if n.id != g.nodes.len() {
                return Err(Error::input(format!("node ids must be dense and ordered, found {}", n.id)));
            }
            g.push_node(n.label, n.name, n.props);
        }
        for e in edges {
            if e.source >= g.nodes.len() || e.target >= g.nodes.len() {
                return Err(Error::input(format!("edge {} -> {} has a dangling endpoint", e.source, e.target)));
            }
            g.push_edge(e);
        }
        g.validate()?;
        Ok(g)
    }

    // -- export -------------------------------------------------------------

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        let doc = NodeLinkDoc {
            directed: true,
            multigraph: true,
            graph: serde_json::Map::new(),
            nodes: self.nodes.clone(),
            links: self.edges.clone(),
        };
        serde_json::to_writer_pretty(w, &doc)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let doc: NodeLinkDoc = serde_json::from_reader(r)?;
        Self::from_parts(doc.nodes, doc.links)
    }

    pub fn write_graphml<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<graphml>", e);
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        for (id, target, name, ty) in [
            ("d0", "node", "label", "string"),
            ("d1", "node", "name", "string"),
            ("d2", "node", "review_id", "long"),
            ("d3", "node", "rating", "int"),
            ("d4", "node", "sentiment_avg", "double"),
            ("d5", "node", "sentiment_min", "double"),
            ("d6", "node", "sentiment_max", "double"),
            ("d7", "node", "embedding", "string"),
            ("d8", "edge", "kind", "string"),
            ("d9", "edge", "sentiment", "double"),
        ] {
            out.push_str(&format!(
                "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>\n"
            ));
        }
        out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
        for n in &self.nodes {
            out.push_str(&format!("    <node id=\"n{}\">\n", n.id));
            let mut data = |key: &str, value: String| {
                out.push_str(&format!("      <data key=\"{key}\">{}</data>\n", xml_escape(&value)));
            };
            data("d0", n.label.to_string());
            data("d1", n.name.clone());
            let p = &n.props;
            if let Some(v) = p.review_id {
                data("d2", v.to_string());
            }
            if let Some(v) = p.rating {
                data("d3", v.to_string());
            }
            for (key, v) in [("d4", p.sentiment_avg), ("d5", p.sentiment_min), ("d6", p.sentiment_max)] {
                if let Some(v) = v {
                    data(key, v.to_string());
                }
            }
            if let Some(e) = &p.embedding {
                data("d7", join_floats(e));
            }
            out.push_str("    </node>\n");
        }
        for (i, e) in self.edges.iter().enumerate() {
            out.push_str(&format!(
                "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\">\n      <data key=\"d8\">{}</data>\n",
                e.source,
                e.target,
                xml_escape(e.kind.as_str())
            ));
            if let Some(s) = e.sentiment {
                out.push_str(&format!("      <data key=\"d9\">{s}</data>\n"));
            }
            out.push_str("    </edge>\n");
        }
        out.push_str("  </graph>\n</graphml>\n");
        w.write_all(out.as_bytes()).map_err(io)
    }

    pub fn write_csv_pair<W1: Write, W2: Write>(&self, nodes: W1, edges: W2) -> Result<()> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut nw = csv::Writer::from_writer(nodes);
        nw.write_record([
            "id",
            "label",
            "name",
            "review_id",
            "rating",
            "sentiment_avg",
            "sentiment_min",
            "sentiment_max",
            "embedding",
        ])?;
        for n in &self.nodes {
            let p = &n.props;
            nw.write_record([
                n.id.to_string(),
                n.label.to_string(),
                n.name.clone(),
                opt(p.review_id.map(|v| v.to_string())),
                opt(p.rating.map(|v| v.to_string())),
                opt(p.sentiment_avg.map(|v| v.to_string())),
                opt(p.sentiment_min.map(|v| v.to_string())),
                opt(p.sentiment_max.map(|v| v.to_string())),
                opt(p.embedding.as_deref().map(join_floats)),
            ])?;
        }
        nw.flush().map_err(|e| Error::io("<nodes csv>", e))?;
        let mut ew = csv::Writer::from_writer(edges);
        ew.write_record(["source", "target", "kind", "sentiment"])?;
        for e in &self.edges {
            ew.write_record([
                e.source.to_string(),
                e.target.to_string(),
                e.kind.as_str().to_string(),
                opt(e.sentiment.map(|v| v.to_string())),
            ])?;
        }
        ew.flush().map_err(|e| Error::io("<edges csv>", e))?;
        Ok(())
    }

    pub fn read_csv_pair<R1: Read, R2: Read>(nodes: R1, edges: R2) -> Result<Self> {
        fn opt<T: FromStr>(s: &str, what: &str) -> Result<Option<T>> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| Error::input(format!("bad {what} value `{s}`")))
        }
        let mut ns = Vec::new();
        for rec in csv::Reader::from_reader(nodes).records() {
            let rec = rec?;
            let f = |i: usize| rec.get(i).unwrap_or("");
            let embedding = if f(8).is_empty() {
                None
            } else {
                Some(
                    f(8).split(' ')
                        .map(|x| x.parse::<f64>().map_err(|_| Error::input(format!("bad embedding value `{x}`"))))
                        .collect::<Result<Vec<_>>>()?,
                )
            };
            ns.push(Node {
                id: f(0).parse().map_err(|_| Error::input(format!("bad node id `{}`", f(0))))?,
                label: f(1).parse()?,
                name: f(2).to_string(),
                props: NodeProps {
                    review_id: opt(f(3), "review_id")?,
                    rating: opt(f(4), "rating")?,
                    sentiment_avg: opt(f(5), "sentiment_avg")?,
                    sentiment_min: opt(f(6), "sentiment_min")?,
                    sentiment_max: opt(f(7), "sentiment_max")?,
                    embedding,
                },
            });
        }
        let mut es = Vec::new();
        for rec in csv::Reader::from_reader(edges).records() {
            let rec = rec?;
            let f = |i: usize| rec.get(i).unwrap_or("");
            let endpoint = |s: &str| s.parse::<usize>().map_err(|_| Error::input(format!("bad endpoint `{s}`")));
            es.push(Edge {
                source: endpoint(f(0))?,
                target: endpoint(f(1))?,
                kind: EdgeKind::from(f(2).to_string()),
                sentiment: opt(f(3), "sentiment")?,
            });
        }
        Self::from_parts(ns, es)
    }

    /// Write the graph in `format` under `dir`; returns the files written.
    pub fn export(&self, format: ExportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let create = |name: &str| -> Result<(PathBuf, BufWriter<File>)> {
            let p = dir.join(name);
            let f = File::create(&p).map_err(|e| Error::io(&p, e))?;
            Ok((p, BufWriter::new(f)))
        };
        match format {
            ExportFormat::Json => {
                let (p, mut w) = create("graph.json")?;
                self.write_json(&mut w)?;
                w.flush().map_err(|e| Error::io(&p, e))?;
                Ok(vec![p])
            }
            ExportFormat::Graphml => {
                let (p, mut w) = create("graph.graphml")?;
                self.write_graphml(&mut w)?;
                w.flush().map_err(|e| Error::io(&p, e))?;
                Ok(vec![p])
            }
            ExportFormat::CsvPair => {
                let (pn, wn) = create("nodes.csv")?;
                let (pe, we) = create("edges.csv")?;
                self.write_csv_pair(wn, we)?;
                Ok(vec![pn, pe])
            }
        }
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_json(std::io::BufReader::new(f))
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    /// Node-link JSON (`nodes`, `links`).
    Json,
    Graphml,
    /// `nodes.csv` plus `edges.csv`.
    CsvPair,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" | "json-node-link" => Ok(ExportFormat::Json),
            "graphml" => Ok(ExportFormat::Graphml),
            "csv" | "csv-pair" => Ok(ExportFormat::CsvPair),
            other => Err(Error::input(format!(
                "unknown graph format `{other}` (expected json-node-link, graphml or csv-pair)"
            ))),
        }
    }
}

pub fn build_graph(reviews: &[ReviewRecord], triples: &[Triple], amenities: &HashSet<String>) -> KnowledgeGraph {
    KnowledgeGraph::build(reviews, triples, amenities).0
}

pub fn aggregate_sentiment(g: &KnowledgeGraph, review: usize) -> Result<SentimentAggregate> {
    g.aggregate_sentiment(review)
}
