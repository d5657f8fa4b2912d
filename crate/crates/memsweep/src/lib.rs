//! Surface-code memory-experiment emulation and decoder-accuracy
//! benchmarking.
//!
//! The crate builds phenomenological decoding graphs for rotated surface
//! codes, samples i.i.d. edge-flip noise, decodes with a union-find decoder
//! (whole-experiment batch or sliding-window forward mode), and estimates
//! logical failure rates two ways:
//!
//! * **new**: one long experiment of `n = m*d` rounds; an anyon sweep over
//!   the decoded residual counts logical bitflips `l` directly, giving
//!   `f = l*d/n` with a Wilson interval ([`sweep`], [`estimate`]);
//! * **legacy**: many short experiments at checkpoint durations
//!   `n = d..10d`; per-duration failure rates are fitted to an exponential
//!   decay and extrapolated to one round-trip ([`estimate::fit_decay`]).
//!
//! [`harness`] orchestrates (d, p) grids of either method deterministically
//! across a worker pool; the `memsweep` binary is a thin CLI over it. The
//! `examples/` directory demonstrates each capability in isolation.
//!
//! Pipeline in one breath:
//!
//! ```
//! use memsweep::prelude::*;
//!
//! let g = DecodingGraph::build(3, 30).unwrap();
//! let params = NoiseParams { p: 0.01, q: 0.01, seed: 1, shot: 0 };
//! let noise = sample_noise(&g, &params).unwrap();
//! let syndrome = syndrome_of(&g, &noise);
//! let correction = uf_decode(&g, &syndrome).unwrap();
//! let rest = residual(&noise, &correction);
//! let l = count_logical_bitflips(&g, &rest).unwrap();
//! let est = estimate_new(l, 30, 3, 1.96).unwrap();
//! assert!(est.lo <= est.f_hat && est.f_hat <= est.hi);
//! ```

pub mod bits;
pub mod decoder;
pub mod estimate;
pub mod graph;
pub mod harness;
pub mod noise;
pub mod sweep;

/// The common vocabulary in one import.
pub mod prelude {
    pub use crate::decoder::{forward_decode, residual, uf_decode};
    pub use crate::estimate::{
        estimate_new, fit_decay, parity_failure, wilson_interval, CheckpointRecord,
    };
    pub use crate::graph::{DecodingGraph, EdgeKind, Side, VertexId};
    pub use crate::harness::{ExperimentConfig, ResultRecord};
    pub use crate::noise::{sample_noise, syndrome_of, EdgeSet, NoiseParams, Syndrome};
    pub use crate::sweep::count_logical_bitflips;
}
