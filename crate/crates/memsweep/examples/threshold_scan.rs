//! Coarse threshold scan: where does raising the distance start to help?
//!
//! Below the accuracy threshold a larger code protects better
//! (f(5) < f(3)); above it the extra qubits only add noise (f(5) > f(3)).
//! Scanning p with the single-long-run method shows the crossover without
//! any fitting. Run with `cargo run --example threshold_scan --release`.

use memsweep::harness::{run_new, DecoderChoice, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig {
        distances: vec![3, 5],
        noises: vec![0.004, 0.008, 0.016, 0.024, 0.032, 0.048],
        meas_noise: None,
        rounds_mult: 3000,
        shots: 1,
        seed: 99,
        decoder: DecoderChoice::UfForward,
        window: None,
        commit: None,
        z: 1.96,
        workers: 0,
    };
    let recs = run_new(&cfg).unwrap();

    // records arrive in grid order: all p for d=3, then all p for d=5
    let half = recs.len() / 2;
    let (d3, d5) = recs.split_at(half);
    println!("one run of n = 3000*d rounds per cell\n");
    println!(
        "{:>6} | {:>23} | {:>23} | larger code",
        "p", "f(3) [lo, hi]", "f(5) [lo, hi]"
    );
    for (a, b) in d3.iter().zip(d5) {
        let verdict = if a.lo > b.hi {
            "helps"
        } else if b.lo > a.hi {
            "hurts"
        } else {
            "unresolved"
        };
        println!(
            "{:>6} | {:.1e} [{:.1e}, {:.1e}] | {:.1e} [{:.1e}, {:.1e}] | {verdict}",
            a.p,
            a.f_hat.unwrap(),
            a.lo.unwrap(),
            a.hi.unwrap(),
            b.f_hat.unwrap(),
            b.lo.unwrap(),
            b.hi.unwrap()
        );
    }
}
