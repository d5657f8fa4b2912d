//! Phenomenological noise sampling and syndrome extraction.
//!
//! Every edge of the decoding graph is flipped independently: space edges
//! with probability `p` (data errors, including the perfect-readout layer's
//! space edges), time edges with probability `q` (measurement errors). The
//! syndrome is the set of bulk detectors touched by an odd number of flipped
//! edges; boundary vertices absorb chains silently and never light up.
//!
//! Sampling is deterministic in `(seed, shot)`. Each shot gets its own
//! counter-mode ChaCha8 stream keyed by the two numbers, so shot `j` draws
//! the same noise whether shots run sequentially, in parallel, or alone.
//! Exactly one 64-bit draw is consumed per edge, in edge-index order, which
//! keeps samples reproducible across decoder choices and worker counts.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::bits::Bits;
use crate::graph::DecodingGraph;

/// Noise model parameters plus the RNG coordinates of one shot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    /// Space-edge (data error) flip probability, in `[0, 1)`.
    pub p: f64,
    /// Time-edge (measurement error) flip probability, in `[0, 1)`.
    pub q: f64,
    /// Experiment seed shared by all shots of a run.
    pub seed: u64,
    /// Shot index; selects the per-shot substream.
    pub shot: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("flip probability {name} = {value} must lie in [0, 1)")]
    InvalidProbability { name: &'static str, value: f64 },
}

/// A subset of the graph's edges, stored as a bitset over edge indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    bits: Bits,
}

impl EdgeSet {
    pub fn new(universe: usize) -> Self {
        EdgeSet {
            bits: Bits::new(universe),
        }
    }

    pub fn for_graph(g: &DecodingGraph) -> Self {
        Self::new(g.edge_count())
    }

    /// Size of the edge universe (not the number of set members).
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    /// Number of edges in the set.
    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        self.bits.contains(e)
    }

    pub fn insert(&mut self, e: usize) {
        self.bits.insert(e);
    }

    pub fn remove(&mut self, e: usize) {
        self.bits.remove(e);
    }

    pub fn toggle(&mut self, e: usize) {
        self.bits.toggle(e);
    }

    pub fn clear(&mut self) {
        self.bits.clear();
    }

    /// Symmetric difference in place; both sets must share a universe.
    pub fn xor_assign(&mut self, other: &EdgeSet) {
        self.bits.xor_assign(&other.bits);
    }

    /// Member edge indices, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    /// Member edge indices within `range`, ascending.
    pub fn iter_range(&self, range: std::ops::Range<usize>) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_range(range)
    }

    pub fn range_is_empty(&self, range: std::ops::Range<usize>) -> bool {
        self.bits.range_is_empty(range)
    }
}

impl FromIterator<usize> for EdgeSet {
    /// Collects edge indices into a set sized to hold the largest of them.
    /// Mostly a test convenience; prefer [`EdgeSet::for_graph`] plus inserts
    /// when a graph is at hand.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let items: Vec<usize> = iter.into_iter().collect();
        let universe = items.iter().max().map_or(0, |&m| m + 1);
        let mut s = EdgeSet::new(universe);
        for e in items {
            s.toggle(e);
        }
        s
    }
}

/// Acceptance threshold for `x < t` sampling on a full 64-bit draw.
fn flip_threshold(p: f64) -> u64 {
    // p in [0, 1): p * 2^64 < 2^64, but the f64 product may round up to
    // 2^64 for p within one ulp of 1; the saturating cast absorbs that.
    (p * 18_446_744_073_709_551_616.0) as u64
}

/// Sample one shot of i.i.d. edge noise for `g`.
///
/// The returned set's universe is exactly `g.edge_count()`. Identical
/// `(d, n, params)` always produce identical sets.
pub fn sample_noise(g: &DecodingGraph, params: &NoiseParams) -> Result<EdgeSet, NoiseError> {
    for (name, value) in [("p", params.p), ("q", params.q)] {
        if !(0.0..1.0).contains(&value) || value.is_nan() {
            return Err(NoiseError::InvalidProbability { name, value });
        }
    }
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&params.seed.to_le_bytes());
    key[8..16].copy_from_slice(&params.shot.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);

    let t_space = flip_threshold(params.p);
    let t_time = flip_threshold(params.q);
    let mut set = EdgeSet::for_graph(g);
    // Per-layer blocks are laid out time-first, so walking layers and
    // splitting each at the end of its time block visits edges 0, 1, 2, ...
    // in order with the right threshold for each.
    for t in 1..=g.layer_count() {
        let layer = g.layer_edge_range(t).expect("layer in range");
        let time = g.time_edge_range(t);
        debug_assert_eq!(layer.start, time.start.min(layer.start));
        for e in layer {
            let threshold = if time.contains(&e) { t_time } else { t_space };
            if rng.next_u64() < threshold {
                set.insert(e);
            }
        }
    }
    Ok(set)
}

/// The defect pattern of one shot: indices of bulk vertices with odd
/// incident flip count, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Syndrome {
    pub defects: Vec<u32>,
}

impl Syndrome {
    pub fn len(&self) -> usize {
        self.defects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }
}

/// Extract the syndrome `errors` produces on `g`.
///
/// `errors` may have a larger universe than `g` (a prefix-restricted
/// evaluation of a longer experiment's noise); edges beyond `g` are ignored.
/// Boundary vertices are excluded by definition.
pub fn syndrome_of(g: &DecodingGraph, errors: &EdgeSet) -> Syndrome {
    assert!(
        errors.universe() >= g.edge_count(),
        "edge set universe {} smaller than graph edge count {}",
        errors.universe(),
        g.edge_count()
    );
    let mut parity = Bits::new(g.vertex_count());
    for e in errors.iter_range(0..g.edge_count()) {
        let (u, v) = g.edge_endpoints(e);
        parity.toggle(u);
        parity.toggle(v);
    }
    let defects = parity
        .iter()
        .filter(|&v| !g.is_boundary_index(v))
        .map(|v| v as u32)
        .collect();
    Syndrome { defects }
}
