//! Run both estimation methods on the same grid and check that their
//! confidence intervals agree.
//!
//! The single-long-run method and the per-duration fit estimate the same
//! quantity, f(d) per d rounds, from very different data; overlapping 95%
//! intervals are the sanity check. Run with
//! `cargo run --example compare_methods --release`.

use memsweep::harness::{run_compare, DecoderChoice, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig {
        distances: vec![3],
        noises: vec![0.01, 0.02],
        meas_noise: None,
        rounds_mult: 3000, // new method: one run of 9000 rounds
        shots: 5000,       // legacy method: 5000 shots per checkpoint
        seed: 31,
        decoder: DecoderChoice::UfForward,
        window: None,
        commit: None,
        z: 1.96,
        workers: 0,
    };

    println!(
        "{:>2} {:>6} | {:>28} | {:>28} | agree",
        "d", "p", "new f(d) [lo, hi]", "legacy f(d) [lo, hi]"
    );
    for rec in run_compare(&cfg).unwrap() {
        let fmt = |f: Option<f64>, lo: Option<f64>, hi: Option<f64>| match (f, lo, hi) {
            (Some(f), Some(lo), Some(hi)) => {
                format!("{f:.2e} [{lo:.2e}, {hi:.2e}]")
            }
            _ => "fit failed".to_string(),
        };
        println!(
            "{:>2} {:>6} | {:>28} | {:>28} | {}",
            rec.d,
            rec.p,
            fmt(rec.new.f_hat, rec.new.lo, rec.new.hi),
            fmt(rec.legacy.f_hat, rec.legacy.lo, rec.legacy.hi),
            match rec.agree {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "n/a",
            }
        );
        println!(
            "{:>11} wall time: new {:.0} ms, legacy {:.0} ms",
            "",
            rec.new.wall_time_ms,
            rec.legacy.wall_time_ms
        );
    }
}
