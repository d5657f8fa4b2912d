//! Build decoding graphs and inspect their structure.
//!
//! A distance-d memory experiment with n noisy rounds decodes on a graph
//! with n+1 detector layers (the last one is the perfect readout). Run with
//! `cargo run --example build_graph`.

use memsweep::graph::{DecodingGraph, EdgeKind};

fn census(d: u32, n: u32) {
    let g = DecodingGraph::build(d, n).unwrap();
    let mut by_kind = [0usize; 3];
    for e in 0..g.edge_count() {
        by_kind[match g.edge_kind(e) {
            EdgeKind::SpaceH => 0,
            EdgeKind::SpaceV => 1,
            EdgeKind::Time => 2,
        }] += 1;
    }
    let boundary = (0..g.vertex_count())
        .filter(|&v| g.is_boundary_index(v))
        .count();
    println!(
        "d={d} n={n}: {} layers, {} vertices ({} boundary), {} edges \
         (space-h {}, space-v {}, time {})",
        g.layer_count(),
        g.vertex_count(),
        boundary,
        g.edge_count(),
        by_kind[0],
        by_kind[1],
        by_kind[2],
    );
}

fn main() {
    for (d, n) in [(3, 1), (3, 5), (5, 2), (7, 7)] {
        census(d, n);
    }

    // Every vertex on the open boundary has exactly one edge: error chains
    // terminate there without creating a detection event.
    let g = DecodingGraph::build(5, 3).unwrap();
    assert!((0..g.vertex_count())
        .filter(|&v| g.is_boundary_index(v))
        .all(|v| g.incident_edges(v).len() == 1));

    // The JSON dump is the same payload the `graph-dump` subcommand emits.
    let dump = serde_json::to_string(&DecodingGraph::build(3, 1).unwrap().dump()).unwrap();
    println!("\ngraph-dump payload for (d=3, n=1), first 200 bytes:");
    println!("{}...", &dump[..200.min(dump.len())]);
}
