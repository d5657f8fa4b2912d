//! Rate estimation: Wilson score intervals, the single-run sweep estimator,
//! the multi-duration parity estimator, and the exponential-decay fit that
//! turns per-duration failure rates into a per-`d`-rounds logical error rate.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{DecodingGraph, Side};
use crate::noise::EdgeSet;

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error("success count {k} exceeds trial count {s}")]
    CountExceedsTrials { k: u64, s: u64 },
    #[error("trial count must be positive")]
    NoTrials,
    #[error("z must be a positive finite number, got {0}")]
    InvalidZ(f64),
    #[error("rounds n = {n} must be a positive multiple of d = {d}")]
    InvalidDuration { n: u64, d: u32 },
    #[error("decay fit needs at least 2 usable records (k/s < 1/2), found {usable}")]
    NotEnoughUsable { usable: usize },
    #[error("decay fit is singular: all usable records share one duration")]
    SingularFit,
}

/// Wilson score interval for a binomial proportion `k/s` at critical value
/// `z`. Returns `(lo, hi)` with `0 <= lo <= k/s <= hi <= 1`.
pub fn wilson_interval(k: u64, s: u64, z: f64) -> Result<(f64, f64), EstimateError> {
    if s == 0 {
        return Err(EstimateError::NoTrials);
    }
    if k > s {
        return Err(EstimateError::CountExceedsTrials { k, s });
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(EstimateError::InvalidZ(z));
    }
    let n = s as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    // k(s-k)/s^3 written in f64 so huge s cannot overflow the integers
    let spread = (k as f64) * ((s - k) as f64) / (n * n * n);
    let half = z * (spread + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// A logical-error-rate estimate per `d` measurement rounds, with its
/// Wilson bounds and the integer counts it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub f_hat: f64,
    pub lo: f64,
    pub hi: f64,
    /// successes (logical bitflips, or odd-parity shots)
    pub k: u64,
    /// trials (`n/d` blocks, or shots)
    pub s: u64,
}

/// New-method estimator: `f̂(d) = l·d/n` from a sweep count `l` over `n`
/// rounds, treating the experiment as `s = n/d` trials of `d` rounds each.
/// `n` must be a positive multiple of `d`; `l > n/d` signals a sweep
/// anomaly and is rejected.
pub fn estimate_new(l: u64, n: u64, d: u32, z: f64) -> Result<RateEstimate, EstimateError> {
    if d == 0 || n == 0 || n % d as u64 != 0 {
        return Err(EstimateError::InvalidDuration { n, d });
    }
    let s = n / d as u64;
    if l > s {
        return Err(EstimateError::CountExceedsTrials { k: l, s });
    }
    let (lo, hi) = wilson_interval(l, s, z)?;
    Ok(RateEstimate {
        f_hat: l as f64 / s as f64,
        lo,
        hi,
        k: l,
        s,
    })
}

/// Existing-method per-shot failure bit: the parity of the number of
/// residual edges touching the chosen boundary.
pub fn parity_failure_on(g: &DecodingGraph, residual: &EdgeSet, side: Side) -> bool {
    let mut touches = 0usize;
    for e in residual.iter_range(0..g.edge_count()) {
        let (u, v) = g.edge_endpoints(e);
        if g.side_of_index(u) == Some(side) || g.side_of_index(v) == Some(side) {
            touches += 1;
        }
    }
    touches % 2 == 1
}

/// [`parity_failure_on`] with the conventional choice of boundary (Left).
pub fn parity_failure(g: &DecodingGraph, residual: &EdgeSet) -> bool {
    parity_failure_on(g, residual, Side::Left)
}

/// One checkpoint of the existing method: out of `s` shots of an `n`-round
/// experiment, `k` had odd crossing parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckpointRecord {
    pub n: u32,
    pub k: u64,
    pub s: u64,
}

/// Result of fitting `1 - 2f_n = α·[1 - 2f(1)]^n`, i.e. a straight line of
/// `lg(1 - 2f_n)` against `n/d`. The gradient is `lg[1 - 2f(d)]`, which
/// inverts to `f_d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    /// slope per unit of n/d, in lg (base-2 log) scale
    pub gradient: f64,
    pub intercept: f64,
    /// derived rate per d rounds: (1 - 2^gradient)/2
    pub f_d: f64,
    /// confidence bounds on f_d from the OLS slope's standard error
    pub f_lo: f64,
    pub f_hi: f64,
    /// durations (n) of the records used in the fit
    pub used: Vec<u32>,
    /// durations excluded because k/s >= 1/2 (lg undefined)
    pub excluded: Vec<u32>,
}

/// Ordinary least squares of `lg(1 - 2k/s)` against `n/d`.
///
/// Records with `k/s >= 1/2` cannot enter the log and are reported in
/// `excluded` rather than silently dropped. At least two usable records at
/// distinct durations are required. The `f_lo..f_hi` band maps `gradient ±
/// z·SE(gradient)` through the (decreasing) transform `g ↦ (1 - 2^g)/2`;
/// with exactly two points the SE is taken as zero.
pub fn fit_decay(
    records: &[CheckpointRecord],
    d: u32,
    z: f64,
) -> Result<FitResult, EstimateError> {
    if d == 0 {
        return Err(EstimateError::InvalidDuration { n: 0, d });
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(EstimateError::InvalidZ(z));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for r in records {
        if r.s == 0 {
            return Err(EstimateError::NoTrials);
        }
        if r.k > r.s {
            return Err(EstimateError::CountExceedsTrials { k: r.k, s: r.s });
        }
        let f = r.k as f64 / r.s as f64;
        if f >= 0.5 {
            excluded.push(r.n);
            continue;
        }
        xs.push(r.n as f64 / d as f64);
        ys.push((1.0 - 2.0 * f).log2());
        used.push(r.n);
    }
    let m = xs.len();
    if m < 2 {
        return Err(EstimateError::NotEnoughUsable { usable: m });
    }
    let xbar = xs.iter().sum::<f64>() / m as f64;
    let ybar = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return Err(EstimateError::SingularFit);
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let gradient = sxy / sxx;
    let intercept = ybar - gradient * xbar;

    let se = if m > 2 {
        let ss_res: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let r = y - (intercept + gradient * x);
                r * r
            })
            .sum();
        (ss_res / (m as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let to_f = |g: f64| (1.0 - g.exp2()) / 2.0;
    Ok(FitResult {
        gradient,
        intercept,
        f_d: to_f(gradient),
        // the transform is decreasing, so the upper gradient gives the
        // lower rate
        f_lo: to_f(gradient + z * se),
        f_hi: to_f(gradient - z * se),
        used,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;
    use proptest::prelude::*;
    use rand_core::{RngCore, SeedableRng};

    fn assert_close(got: f64, want: f64, what: &str) {
        let tol = 1e-9 * want.abs().max(1e-30);
        assert!(
            (got - want).abs() <= tol,
            "{what}: got {got:e}, want {want:e}"
        );
    }

    #[test]
    fn wilson_matches_high_precision_references() {
        // reference values computed independently with 50-digit arithmetic,
        // rounded to f64
        let cases = [
            (5u64, 10u64, 1.96, 0.23658959361548727, 0.76341040638451273),
            (0, 10, 1.96, 0.0, 0.27754016876661657),
            (3, 7, 2.5, 0.12071897850473891, 0.80380932338205355),
            (37, 1000, 1.96, 0.026961024680452884, 0.050582683410544740),
            (1, 100_000, 1.96, 1.7652023237775918e-6, 5.6648553653372789e-5),
        ];
        for (k, s, z, lo_want, hi_want) in cases {
            let (lo, hi) = wilson_interval(k, s, z).unwrap();
            assert_close(lo, lo_want, &format!("lo(k={k},s={s},z={z})"));
            assert_close(hi, hi_want, &format!("hi(k={k},s={s},z={z})"));
        }
    }

    #[test]
    fn wilson_edge_behaviour() {
        let (lo, _) = wilson_interval(0, 10, 1.96).unwrap();
        assert_eq!(lo, 0.0);
        let (_, hi) = wilson_interval(10, 10, 1.96).unwrap();
        assert_eq!(hi, 1.0);
        let (lo, hi) = wilson_interval(5, 10, 3.3).unwrap();
        assert!((lo + hi - 1.0).abs() < 1e-15, "symmetric about 1/2");
        assert!(matches!(
            wilson_interval(3, 0, 1.96),
            Err(EstimateError::NoTrials)
        ));
        assert!(matches!(
            wilson_interval(11, 10, 1.96),
            Err(EstimateError::CountExceedsTrials { .. })
        ));
        for z in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(wilson_interval(1, 10, z).is_err(), "z = {z}");
        }
    }

    proptest! {
        #[test]
        fn wilson_agrees_with_quadratic_roots(k in 0u64..500, extra in 1u64..500, zi in 1u32..40) {
            // Independent route: the interval ends are the roots of
            // (1 + z²/s)p² - (2p̂ + z²/s)p + p̂² = 0.
            let s = k + extra;
            let z = zi as f64 / 10.0;
            let (lo, hi) = wilson_interval(k, s, z).unwrap();
            let n = s as f64;
            let ph = k as f64 / n;
            let a = 1.0 + z * z / n;
            let b = 2.0 * ph + z * z / n;
            let c = ph * ph;
            let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
            let lo_q = ((b - disc) / (2.0 * a)).max(0.0);
            let hi_q = ((b + disc) / (2.0 * a)).min(1.0);
            prop_assert!((lo - lo_q).abs() < 1e-9, "lo {lo} vs quadratic {lo_q}");
            prop_assert!((hi - hi_q).abs() < 1e-9, "hi {hi} vs quadratic {hi_q}");
            prop_assert!(0.0 <= lo && lo <= ph + 1e-15 && ph <= hi + 1e-15 && hi <= 1.0);
        }

        #[test]
        fn wilson_is_monotone_in_k(k in 0u64..200, s in 2u64..201) {
            prop_assume!(k + 1 <= s);
            let (lo_a, hi_a) = wilson_interval(k, s, 1.96).unwrap();
            let (lo_b, hi_b) = wilson_interval(k + 1, s, 1.96).unwrap();
            prop_assert!(lo_b >= lo_a - 1e-12);
            prop_assert!(hi_b >= hi_a - 1e-12);
        }
    }

    #[test]
    fn wilson_coverage_near_nominal() {
        // Bernoulli(0.1), s = 100: the 95% interval covers the true rate
        // with frequency close to (slightly under) 95%.
        let truth = 0.1;
        let threshold = (truth * 18_446_744_073_709_551_616.0) as u64;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(271828);
        let reps = 50_000;
        let mut covered = 0u32;
        for _ in 0..reps {
            let k = (0..100).filter(|_| rng.next_u64() < threshold).count() as u64;
            let (lo, hi) = wilson_interval(k, 100, 1.96).unwrap();
            if lo <= truth && truth <= hi {
                covered += 1;
            }
        }
        let coverage = covered as f64 / reps as f64;
        assert!(
            (0.93..=0.97).contains(&coverage),
            "coverage {coverage} outside [0.93, 0.97]"
        );
    }

    #[test]
    fn estimate_new_basics() {
        let e = estimate_new(0, 300, 3, 1.96).unwrap();
        assert_eq!(e.f_hat, 0.0);
        assert_eq!(e.lo, 0.0);
        assert_eq!((e.k, e.s), (0, 100));

        // l=37 over n = 100·d·10 rounds → f̂ = 37/1000 for any d
        for d in [3u32, 5, 7] {
            let n = 1000 * d as u64;
            let e = estimate_new(37, n, d, 1.96).unwrap();
            assert_eq!(e.f_hat, 37.0 / 1000.0);
            assert_eq!(e.s, 1000);
        }
    }

    #[test]
    fn estimate_new_round_trips_the_counts() {
        for (l, n, d) in [(1u64, 49u64 * 3, 3u32), (17, 3000, 3), (999, 5000, 5)] {
            let e = estimate_new(l, n, d, 1.96).unwrap();
            assert_eq!(e.k, l);
            assert_eq!(e.s, n / d as u64);
            let back = e.f_hat * e.s as f64;
            assert_eq!(back.round() as u64, l);
            assert!((back - l as f64).abs() < 1e-9 * e.s as f64);
        }
    }

    #[test]
    fn estimate_new_validates_inputs() {
        assert!(matches!(
            estimate_new(0, 100, 3, 1.96),
            Err(EstimateError::InvalidDuration { n: 100, d: 3 })
        ));
        assert!(matches!(
            estimate_new(0, 0, 3, 1.96),
            Err(EstimateError::InvalidDuration { .. })
        ));
        // l beyond the trial count signals a sweep anomaly
        assert!(matches!(
            estimate_new(101, 300, 3, 1.96),
            Err(EstimateError::CountExceedsTrials { k: 101, s: 100 })
        ));
    }

    #[test]
    fn parity_failure_examples() {
        use crate::graph::Side;
        let g = DecodingGraph::build(3, 1).unwrap();
        let empty = EdgeSet::for_graph(&g);
        assert!(!parity_failure(&g, &empty));

        // one Left→Right chain: one Left-incident edge → failure
        let mut crossing = EdgeSet::for_graph(&g);
        for w in [
            (
                VertexId::Boundary {
                    side: Side::Left,
                    t: 1,
                    r: 0,
                },
                VertexId::Bulk { t: 1, r: 0, c: 0 },
            ),
            (
                VertexId::Bulk { t: 1, r: 0, c: 0 },
                VertexId::Bulk { t: 1, r: 0, c: 1 },
            ),
            (
                VertexId::Bulk { t: 1, r: 0, c: 1 },
                VertexId::Boundary {
                    side: Side::Right,
                    t: 1,
                    r: 0,
                },
            ),
        ] {
            crossing.insert(g.edge_index_between(w.0, w.1).unwrap());
        }
        assert!(parity_failure(&g, &crossing));
        assert!(parity_failure_on(&g, &crossing, Side::Right));

        // Left→Left excursion: two Left-incident edges → no failure
        let mut excursion = EdgeSet::for_graph(&g);
        for (a, b) in [
            (
                VertexId::Boundary {
                    side: Side::Left,
                    t: 1,
                    r: 0,
                },
                VertexId::Bulk { t: 1, r: 0, c: 0 },
            ),
            (
                VertexId::Bulk { t: 1, r: 0, c: 0 },
                VertexId::Bulk { t: 1, r: 1, c: 0 },
            ),
            (
                VertexId::Bulk { t: 1, r: 1, c: 0 },
                VertexId::Boundary {
                    side: Side::Left,
                    t: 1,
                    r: 1,
                },
            ),
        ] {
            excursion.insert(g.edge_index_between(a, b).unwrap());
        }
        assert!(!parity_failure(&g, &excursion));
    }

    /// Records generated exactly from the decay model, with s chosen so that
    /// k/s is the nearest f64 to the model rate.
    fn model_records(alpha: f64, phi: f64, durations: &[u32]) -> Vec<CheckpointRecord> {
        let s: u64 = 1 << 53;
        durations
            .iter()
            .map(|&n| {
                let f_n = (1.0 - alpha * (1.0 - 2.0 * phi).powi(n as i32)) / 2.0;
                CheckpointRecord {
                    n,
                    k: (f_n * s as f64).round() as u64,
                    s,
                }
            })
            .collect()
    }

    #[test]
    fn fit_recovers_exact_model() {
        let (alpha, phi, d) = (0.98, 1e-3, 3u32);
        let durations: Vec<u32> = (1..=10).map(|i| i * d).collect();
        let recs = model_records(alpha, phi, &durations);
        let fit = fit_decay(&recs, d, 1.96).unwrap();
        // f(d) = (1 - (1-2φ)^d)/2 and gradient = d·lg(1-2φ); the reference
        // values are exact decimals / 50-digit evaluations
        assert_close(fit.f_d, 0.002994004, "f_d");
        assert_close(fit.gradient, -0.0086648379744795278, "gradient");
        assert_close(fit.intercept, (0.98f64).log2(), "intercept");
        assert_eq!(fit.used, durations);
        assert!(fit.excluded.is_empty());
        // exactly linear data: the confidence band collapses onto the fit
        assert_close(fit.f_lo, fit.f_d, "f_lo");
        assert_close(fit.f_hi, fit.f_d, "f_hi");
        // residuals of an exactly linear relation stay at float-noise level
        for r in &recs {
            let x = r.n as f64 / d as f64;
            let y = (1.0 - 2.0 * (r.k as f64 / r.s as f64)).log2();
            assert!(
                (y - (fit.intercept + fit.gradient * x)).abs() < 1e-12,
                "residual too large at n = {}",
                r.n
            );
        }
    }

    #[test]
    fn fit_flat_when_noiseless() {
        let recs = model_records(1.0, 0.0, &[3, 6, 9, 12]);
        let fit = fit_decay(&recs, 3, 1.96).unwrap();
        assert_eq!(fit.gradient, 0.0);
        assert_eq!(fit.f_d, 0.0);
    }

    #[test]
    fn fit_excludes_half_and_worse_records() {
        let mut recs = model_records(0.9, 1e-2, &[3, 6, 9]);
        recs.push(CheckpointRecord { n: 12, k: 1, s: 2 }); // k/s = 1/2
        recs.push(CheckpointRecord { n: 15, k: 9, s: 10 });
        let fit = fit_decay(&recs, 3, 1.96).unwrap();
        assert_eq!(fit.used, vec![3, 6, 9]);
        assert_eq!(fit.excluded, vec![12, 15]);
    }

    #[test]
    fn fit_error_cases() {
        let recs = model_records(0.98, 1e-3, &[3]);
        assert!(matches!(
            fit_decay(&recs, 3, 1.96),
            Err(EstimateError::NotEnoughUsable { usable: 1 })
        ));
        let all_bad = vec![
            CheckpointRecord { n: 3, k: 1, s: 2 },
            CheckpointRecord { n: 6, k: 1, s: 2 },
        ];
        assert!(matches!(
            fit_decay(&all_bad, 3, 1.96),
            Err(EstimateError::NotEnoughUsable { usable: 0 })
        ));
        let degenerate = vec![
            CheckpointRecord { n: 6, k: 1, s: 100 },
            CheckpointRecord { n: 6, k: 2, s: 100 },
        ];
        assert!(matches!(
            fit_decay(&degenerate, 3, 1.96),
            Err(EstimateError::SingularFit)
        ));
    }

    #[test]
    fn fit_band_brackets_noisy_truth() {
        // Noisy-ish records around the model still produce a band that
        // contains the clean-model rate.
        let (alpha, phi, d) = (0.97, 2e-3, 5u32);
        let durations: Vec<u32> = (1..=10).map(|i| i * d).collect();
        let mut recs = model_records(alpha, phi, &durations);
        // jitter the counts by a few parts in 1e5 of s
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for r in &mut recs {
            let delta = (rng.next_u64() % (r.s / 100_000)) as i64 - (r.s / 200_000) as i64;
            r.k = (r.k as i64 + delta).max(0) as u64;
        }
        let fit = fit_decay(&recs, d, 1.96).unwrap();
        let truth = (1.0 - (1.0 - 2.0 * phi).powi(d as i32)) / 2.0;
        assert!(
            fit.f_lo <= fit.f_d && fit.f_d <= fit.f_hi,
            "band must be ordered around the point estimate"
        );
        assert!(fit.f_hi > fit.f_lo, "jittered data must widen the band");
        assert!(
            (fit.f_d - truth).abs() < 1e-4,
            "point estimate {} strayed from the model rate {truth}",
            fit.f_d
        );
    }
}
