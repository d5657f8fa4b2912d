//! How long does the one long run have to be?
//!
//! The single-run estimate converges once the experiment covers enough
//! periods of d rounds: m = n/d in the low hundreds already gives a stable
//! f(d) with a usable interval, and longer runs only tighten it. Each row
//! uses a fresh seed so the runs are independent. Run with
//! `cargo run --example duration_curve --release`.

use memsweep::harness::{run_new, DecoderChoice, ExperimentConfig};

fn main() {
    let (d, p) = (3u32, 0.02);
    println!("d={d}, p={p}");
    println!("{:>6} {:>9} {:>6} | {:>10} {:>24}", "m", "rounds", "l", "f(d)", "95% interval");
    for (i, m) in [25u64, 50, 100, 200, 400, 800, 1600, 6400].into_iter().enumerate() {
        let cfg = ExperimentConfig {
            distances: vec![d],
            noises: vec![p],
            meas_noise: None,
            rounds_mult: m,
            shots: 1,
            seed: 4000 + i as u64,
            decoder: DecoderChoice::UfForward,
            window: None,
            commit: None,
            z: 1.96,
            workers: 1,
        };
        let rec = run_new(&cfg).unwrap().remove(0);
        println!(
            "{:>6} {:>9} {:>6} | {:>10.4e} [{:>9.4e}, {:>9.4e}]",
            m,
            rec.n,
            rec.l.unwrap(),
            rec.f_hat.unwrap(),
            rec.lo.unwrap(),
            rec.hi.unwrap()
        );
    }
}
