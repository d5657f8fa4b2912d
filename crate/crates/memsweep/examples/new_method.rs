//! Estimate a logical failure rate from one long experiment.
//!
//! Instead of repeating many short experiments, run a single experiment of
//! n = m*d rounds, decode it with the sliding-window forward decoder, and
//! count logical bitflips in the residual with the anyon sweep. Treating
//! the run as s = n/d trials with l successes gives a binomial rate with a
//! Wilson interval. Run with `cargo run --example new_method --release`.

use std::time::Instant;

use memsweep::prelude::*;

fn main() {
    let (d, m, p) = (5u32, 2000u64, 0.015);
    let n = m * d as u64;
    let started = Instant::now();

    let g = DecodingGraph::build(d, n as u32).unwrap();
    let params = NoiseParams {
        p,
        q: p,
        seed: 2024,
        shot: 0,
    };
    let noise = sample_noise(&g, &params).unwrap();
    let syndrome = syndrome_of(&g, &noise);

    // The window holds 2d layers and finalizes d of them per step, so
    // memory stays bounded no matter how long the experiment runs.
    let correction = forward_decode(&g, &syndrome, 2 * d, d).unwrap();
    let rest = residual(&noise, &correction);
    let l = count_logical_bitflips(&g, &rest).unwrap();

    let est = estimate_new(l, n, d, 1.96).unwrap();
    println!("d={d}, p={p}, one run of n = {n} rounds ({m} periods of d)");
    println!("logical bitflips l = {l}");
    println!(
        "f(d) = {:.3e}, 95% interval [{:.3e}, {:.3e}]",
        est.f_hat, est.lo, est.hi
    );
    println!("wall time {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
}
