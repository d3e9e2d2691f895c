use std::fs;

use reviewkg::corpus;
use reviewkg::kgraph::{ExportFormat, KnowledgeGraph, NodeLabel};
use reviewkg::pipeline::{Pipeline, RunConfig};
use reviewkg::resources;

fn fixture_graph() -> KnowledgeGraph {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/reviews_200.jsonl");
    let p = Pipeline::new(RunConfig { input: path.clone(), ..Default::default() }).unwrap();
    let reviews = corpus::load_reviews(&path, 0).unwrap().records;
    let (triples, counts) = p.extract(&reviews);
    assert!(counts.kept > 200, "{counts:?}");
    let (mut g, built) = KnowledgeGraph::build(&reviews, &triples, &resources::amenities());
    assert_eq!(built.skipped_unknown_review, 0);
    g.annotate_sentiment().unwrap();
    g
}

#[test]
fn json_round_trip_is_byte_identical() {
    let g = fixture_graph();
    let mut first = Vec::new();
    g.write_json(&mut first).unwrap();
    let back = KnowledgeGraph::read_json(first.as_slice()).unwrap();
    let mut second = Vec::new();
    back.write_json(&mut second).unwrap();
    assert_eq!(first, second);
    assert_eq!(back, g);
}

#[test]
fn csv_pair_round_trip() {
    let g = fixture_graph();
    let (mut nodes, mut edges) = (Vec::new(), Vec::new());
    g.write_csv_pair(&mut nodes, &mut edges).unwrap();
    let back = KnowledgeGraph::read_csv_pair(nodes.as_slice(), edges.as_slice()).unwrap();
    assert_eq!(back, g);
}

#[test]
fn graphml_is_well_formed_and_complete() {
    let g = fixture_graph();
    let dir = tempfile::tempdir().unwrap();
    let files = g.export(ExportFormat::Graphml, dir.path()).unwrap();
    let xml = fs::read_to_string(&files[0]).unwrap();
    let doc = roxmltree::Document::parse(&xml).unwrap();
    let count = |tag: &str| doc.descendants().filter(|n| n.has_tag_name(tag)).count();
    assert_eq!(count("node"), g.node_count());
    assert_eq!(count("edge"), g.edge_count());
}

#[test]
fn every_review_with_triples_hangs_off_its_hotel() {
    let g = fixture_graph();
    g.validate().unwrap();
    for r in g.review_nodes() {
        let hotels: Vec<_> = g
            .in_edges(r.id)
            .filter(|e| g.node(e.source).map(|n| n.label) == Some(NodeLabel::Hotel))
            .collect();
        assert_eq!(hotels.len(), 1, "review node {}", r.id);
        let agg = g.aggregate_sentiment(r.id).unwrap();
        assert!(agg.min <= agg.avg && agg.avg <= agg.max);
    }
}
