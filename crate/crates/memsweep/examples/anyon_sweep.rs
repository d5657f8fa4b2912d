//! Watch the anyon sweep walk a residual layer by layer.
//!
//! After decoding, the residual error is syndrome-free: every connected
//! component is a closed loop or a boundary-to-boundary chain. The sweep
//! scans layers bottom-to-top, carrying chain endpoints ("anyons") as
//! vertex pairs, and counts a logical bitflip exactly when a pair resolves
//! onto opposite boundaries. Run with `cargo run --example anyon_sweep`.

use memsweep::graph::{DecodingGraph, Side, VertexId};
use memsweep::noise::EdgeSet;
use memsweep::sweep::SweepState;

/// Insert the edge between two vertices that are adjacent in the graph.
fn put(g: &DecodingGraph, set: &mut EdgeSet, a: VertexId, b: VertexId) {
    set.insert(g.edge_index_between(a, b).expect("adjacent vertices"));
}

fn main() {
    let g = DecodingGraph::build(3, 4).unwrap();
    let mut residual = EdgeSet::for_graph(&g);

    let bulk = |t, r, c| VertexId::Bulk { t, r, c };
    let bnd = |side, t, r| VertexId::Boundary { side, t, r };

    // A left-to-right crossing that wanders through time: this is one
    // logical bitflip.
    put(&g, &mut residual, bnd(Side::Left, 2, 1), bulk(2, 1, 0));
    put(&g, &mut residual, bulk(2, 1, 0), bulk(3, 1, 0));
    put(&g, &mut residual, bulk(3, 1, 0), bulk(3, 1, 1));
    put(&g, &mut residual, bulk(3, 1, 1), bnd(Side::Right, 3, 1));

    // A closed loop: invisible to the logical observable.
    put(&g, &mut residual, bulk(1, 0, 0), bulk(1, 0, 1));
    put(&g, &mut residual, bulk(1, 0, 1), bulk(2, 0, 1));
    put(&g, &mut residual, bulk(2, 0, 1), bulk(2, 0, 0));
    put(&g, &mut residual, bulk(2, 0, 0), bulk(1, 0, 0));

    // A same-boundary excursion: touches the left boundary twice, counts 0.
    put(&g, &mut residual, bnd(Side::Left, 5, 0), bulk(5, 0, 0));
    put(&g, &mut residual, bulk(5, 0, 0), bulk(5, 1, 0));
    put(&g, &mut residual, bulk(5, 1, 0), bnd(Side::Left, 5, 1));

    let mut state = SweepState::new();
    println!("layer | live anyon pairs | logical count");
    for t in 1..=g.layer_count() {
        state.sweep_layer(&g, t, &residual).unwrap();
        println!(
            "{t:>5} | {:>16} | {}",
            state.pairs().len(),
            state.logical_count()
        );
    }
    let l = state.finish().unwrap();
    println!("\ntotal logical bitflips: {l}");
    assert_eq!(l, 1);
}
