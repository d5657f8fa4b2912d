//! One memory experiment end to end: sample noise, extract the syndrome,
//! decode, and count surviving logical bitflips.
//!
//! Run with `cargo run --example single_shot`.

use memsweep::prelude::*;

fn main() {
    let (d, n) = (3, 15);
    let g = DecodingGraph::build(d, n).unwrap();
    let params = NoiseParams {
        p: 0.03,  // space-edge (data qubit) flip probability
        q: 0.03,  // time-edge (measurement) flip probability
        seed: 12,
        shot: 0,
    };

    let noise = sample_noise(&g, &params).unwrap();
    let syndrome = syndrome_of(&g, &noise);
    println!(
        "sampled {} edge flips over {} edges -> {} defects",
        noise.len(),
        g.edge_count(),
        syndrome.defects.len()
    );

    let correction = uf_decode(&g, &syndrome).unwrap();
    println!("union-find correction uses {} edges", correction.len());

    // The correction reproduces the syndrome, so noise XOR correction is
    // silent: only closed loops and boundary-to-boundary chains remain.
    let rest = residual(&noise, &correction);
    assert!(syndrome_of(&g, &rest).defects.is_empty());

    let l = count_logical_bitflips(&g, &rest).unwrap();
    println!("residual weight {}, logical bitflips l = {l}", rest.len());

    // The same shot decoded through a sliding window grabs the exact same
    // noise stream; the answer may differ (different decoder), but the
    // invariant holds for every decoder output.
    let windowed = forward_decode(&g, &syndrome, 2 * d, d).unwrap();
    let rest_w = residual(&noise, &windowed);
    assert!(syndrome_of(&g, &rest_w).defects.is_empty());
    println!(
        "forward decode (window {}, commit {}): correction weight {}, l = {}",
        2 * d,
        d,
        windowed.len(),
        count_logical_bitflips(&g, &rest_w).unwrap()
    );
}
