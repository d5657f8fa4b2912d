//! The per-duration estimation method: many short experiments, one decay
//! fit.
//!
//! For durations n = d, 2d, ..., 10d, measure the logical failure rate
//! f_n = k/s over s shots, then fit lg(1 - 2 f_n) against n/d; the slope
//! recovers the per-d-rounds failure rate f(d). Shots are sampled once at
//! the longest duration and re-decoded on each checkpoint's prefix of the
//! decoding graph, as the edge layout makes short experiments literal
//! prefixes of long ones. Run with `cargo run --example legacy_method
//! --release`.

use memsweep::harness::{run_legacy, DecoderChoice, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig {
        distances: vec![3],
        noises: vec![0.01],
        meas_noise: None,
        rounds_mult: 100, // unused by this method; kept for completeness
        shots: 20_000,
        seed: 5,
        decoder: DecoderChoice::UfForward,
        window: None,
        commit: None,
        z: 1.96,
        workers: 0,
    };
    let rec = run_legacy(&cfg).unwrap().remove(0);

    println!("d={}, p={}, {} shots per checkpoint\n", rec.d, rec.p, cfg.shots);
    println!("  n/d    f_n = k/s     lg(1 - 2 f_n)");
    for c in rec.checkpoints.as_ref().unwrap() {
        let f_n = c.k as f64 / c.s as f64;
        println!(
            "{:>5}    {:<10.6}   {:+.6}",
            c.n / rec.d,
            f_n,
            (1.0 - 2.0 * f_n).log2()
        );
    }

    let fit = rec.fit.as_ref().expect("fit should be usable at this noise");
    println!("\ngradient  {:+.6} per d rounds", fit.gradient);
    println!("intercept {:+.6}", fit.intercept);
    println!(
        "f(d) = {:.3e}, 95% interval [{:.3e}, {:.3e}]",
        rec.f_hat.unwrap(),
        rec.lo.unwrap(),
        rec.hi.unwrap()
    );
    println!("wall time {:.0} ms", rec.wall_time_ms);
}
