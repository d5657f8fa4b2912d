//! Streaming logical-bitflip counting (the anyon-pair sweep).
//!
//! The sweep walks the decoding graph layer by layer. Every residual edge it
//! encounters updates a bidirectional map of *anyon pairs* — the endpoints
//! of the paths of residual edges seen so far. After each layer, a pair
//! whose anyons sit on opposite boundaries is a logical bitflip (count it,
//! drop it); a pair on one and the same boundary is topologically trivial
//! (drop it); every other pair is carried forward. A residual with empty
//! syndrome always resolves every pair by the end, so the count `l` is the
//! number of boundary-to-boundary crossings and `f = l·d/n` estimates the
//! logical error rate in a single pass over a single long experiment.
//!
//! Because time edges belong to the later of their two layers, an edge is
//! only ever loaded when both its endpoints' layers have been reached, and
//! because boundary vertices are keyed per (side, layer, row), two chains
//! can never collide on the same map key.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{opposite_boundaries, same_boundary, DecodingGraph, VertexId};
use crate::noise::EdgeSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("layer {got} swept out of order; expected layer {expected}")]
    LayerOutOfOrder { got: u32, expected: u32 },
    #[error(
        "{remaining} anyon pair(s) remain after the final layer; \
         the swept edge set is not a valid residual (non-empty syndrome)"
    )]
    UnresolvedPairs { remaining: usize },
}

/// Bidirectional map of anyon pairs: storing pair `uv` means
/// `lookup(u) = v` and `lookup(v) = u`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairSet {
    map: BTreeMap<VertexId, VertexId>,
}

impl PairSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of pairs (half the number of keys).
    pub fn len(&self) -> usize {
        debug_assert_eq!(self.map.len() % 2, 0);
        self.map.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.map.contains_key(v)
    }

    pub fn lookup(&self, v: &VertexId) -> Option<VertexId> {
        self.map.get(v).copied()
    }

    /// Add pair `uv`. Neither vertex may already be paired.
    pub fn add(&mut self, u: VertexId, v: VertexId) {
        debug_assert_ne!(u, v, "self-pair");
        let a = self.map.insert(u, v);
        let b = self.map.insert(v, u);
        debug_assert!(a.is_none() && b.is_none(), "vertex already paired");
    }

    /// Remove the pair containing `x`, returning it.
    pub fn remove(&mut self, x: &VertexId) -> Option<(VertexId, VertexId)> {
        let y = self.map.remove(x)?;
        let back = self.map.remove(&y);
        debug_assert_eq!(back, Some(*x));
        Some((*x, y))
    }

    /// All pairs, each reported once as (smaller, larger), ascending.
    pub fn iter_pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.map
            .iter()
            .filter(|(k, v)| k < v)
            .map(|(k, v)| (*k, *v))
    }
}

/// Update `pairs` with one residual edge `uv`, keeping every anyon an
/// endpoint of a path of residual edges. Case analysis:
/// both endpoints paired → their far partners join (`wx`); the edge closes
/// its own pair → the pair annihilates; one endpoint paired → the far
/// partner moves to the new endpoint; neither paired → a new pair is born.
pub fn load(pairs: &mut PairSet, u: VertexId, v: VertexId) {
    assert_ne!(u, v, "load requires distinct endpoints");
    if let Some(w) = pairs.lookup(&u) {
        pairs.remove(&u);
        if let Some(x) = pairs.lookup(&v) {
            pairs.remove(&v);
            pairs.add(w, x);
        } else if v != w {
            pairs.add(v, w);
        }
        // v == w: the edge closed its own pair; both anyons annihilate.
    } else if let Some(x) = pairs.lookup(&v) {
        pairs.remove(&v);
        pairs.add(u, x);
    } else {
        pairs.add(u, v);
    }
}

/// Sweep progress over one experiment: the live pair map, the logical
/// bitflip count, and the next layer expected.
#[derive(Debug, Clone, Default)]
pub struct SweepState {
    pairs: PairSet,
    l: u64,
    swept: u32,
}

impl SweepState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn logical_count(&self) -> u64 {
        self.l
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    /// The layer the next `sweep_layer` call must pass.
    pub fn expected_layer(&self) -> u32 {
        self.swept + 1
    }

    /// Load layer `t`'s residual edges, then resolve boundary-spanning
    /// pairs: opposite boundaries count a logical bitflip, same-boundary
    /// pairs vanish, everything else is carried into the next layer.
    pub fn sweep_layer(
        &mut self,
        g: &DecodingGraph,
        t: u32,
        residual: &EdgeSet,
    ) -> Result<(), SweepError> {
        if t != self.expected_layer() || t > g.layer_count() {
            return Err(SweepError::LayerOutOfOrder {
                got: t,
                expected: self.expected_layer(),
            });
        }
        let range = g.layer_edge_range(t).expect("validated layer");
        for e in residual.iter_range(range) {
            let (u, v) = g.edge_endpoints(e);
            load(&mut self.pairs, g.vertex_id(u), g.vertex_id(v));
        }
        let mut carried = PairSet::new();
        for (u, v) in self.pairs.iter_pairs() {
            if opposite_boundaries(&u, &v) {
                self.l += 1;
            } else if !same_boundary(&u, &v) {
                load(&mut carried, u, v);
            }
        }
        self.pairs = carried;
        self.swept = t;
        Ok(())
    }

    /// Consume the state and return `l`. Errors if pairs survived the final
    /// layer — that means the swept set was not a valid residual.
    pub fn finish(self) -> Result<u64, SweepError> {
        if !self.pairs.is_empty() {
            return Err(SweepError::UnresolvedPairs {
                remaining: self.pairs.len(),
            });
        }
        Ok(self.l)
    }
}

/// Count the logical bitflips of a full residual in one pass.
///
/// `residual` must have an empty syndrome (errors ⊕ correction, with the
/// correction honouring the decoder's contract); otherwise the sweep ends
/// with unresolved pairs and reports the violation as an error.
pub fn count_logical_bitflips(g: &DecodingGraph, residual: &EdgeSet) -> Result<u64, SweepError> {
    let mut state = SweepState::new();
    for t in 1..=g.layer_count() {
        state.sweep_layer(g, t, residual)?;
    }
    state.finish()
}
