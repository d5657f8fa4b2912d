//! The decoding graph for a distance-`d`, `n`-round memory experiment.
//!
//! The graph is a stack of `n + 1` layers. Each layer holds a `d`-row by
//! `(d-1)`-column grid of bulk detectors. Horizontal chains of `d` space edges
//! run from the Left boundary to the Right boundary, vertical space edges
//! couple neighbouring rows, and time edges couple the same detector in
//! consecutive layers. Layers `1..=n` are noisy measurement rounds; layer
//! `n + 1` closes the experiment with a perfect readout, so no time edges
//! leave it. A time edge is assigned to the later of its two layers, which
//! guarantees a layer-by-layer traversal never references an unvisited layer.
//!
//! Vertices and edges are laid out layer-major with a fixed order inside each
//! layer (time, then horizontal space, then vertical space), so a layer maps
//! to a contiguous index range and construction is fully deterministic.

use serde::Serialize;
use thiserror::Error;

/// Which of the two absorbing boundaries a boundary vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Identity of a graph vertex.
///
/// Bulk vertices are detectors at `(layer t, row r, col c)` with
/// `t in 1..=n+1`, `r in 0..d`, `c in 0..d-1`. Boundary vertices are keyed by
/// `(side, t, r)` and each has exactly one incident edge, so two distinct
/// error chains can never collide on the same boundary key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VertexId {
    Bulk { t: u32, r: u32, c: u32 },
    Boundary { side: Side, t: u32, r: u32 },
}

impl VertexId {
    pub fn is_boundary(&self) -> bool {
        matches!(self, VertexId::Boundary { .. })
    }

    pub fn boundary_side(&self) -> Option<Side> {
        match self {
            VertexId::Boundary { side, .. } => Some(*side),
            VertexId::Bulk { .. } => None,
        }
    }
}

/// True iff both vertices are boundary vertices on different sides.
pub fn opposite_boundaries(u: &VertexId, v: &VertexId) -> bool {
    match (u.boundary_side(), v.boundary_side()) {
        (Some(a), Some(b)) => a != b,
        _ => false,
    }
}

/// True iff both vertices are boundary vertices on the same side
/// (any layer, any row).
pub fn same_boundary(u: &VertexId, v: &VertexId) -> bool {
    match (u.boundary_side(), v.boundary_side()) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// Edge flavour: horizontal space, vertical space, or time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    SpaceH,
    SpaceV,
    Time,
}

/// A fully described edge, as returned by the inspection API.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub kind: EdgeKind,
    pub layer: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("code distance must be an odd integer >= 3, got {0}")]
    InvalidDistance(u32),
    #[error("round count must be >= 1, got {0}")]
    InvalidRounds(u32),
    #[error("layer {t} out of range 1..={max}")]
    LayerOutOfRange { t: u32, max: u32 },
}

/// Immutable space-time decoding graph for one `(d, n)` memory experiment.
///
/// Construction is a pure function of `(d, n)`: two builds with equal inputs
/// produce identical vertex and edge orderings. The graph is safe to share
/// across concurrent shot workers.
#[derive(Clone, Debug)]
pub struct DecodingGraph {
    d: u32,
    n: u32,
    /// Edge endpoints as vertex indices, in global edge order.
    endpoints: Vec<[u32; 2]>,
    /// CSR adjacency: `adj[adj_off[v]..adj_off[v+1]]` are the edge indices
    /// incident to vertex `v`, ascending.
    adj_off: Vec<u32>,
    adj: Vec<u32>,
}

impl DecodingGraph {
    /// Build the graph. Rejects even or too-small `d` and `n < 1`.
    pub fn build(d: u32, n: u32) -> Result<Self, GraphError> {
        if d < 3 || d % 2 == 0 {
            return Err(GraphError::InvalidDistance(d));
        }
        if n < 1 {
            return Err(GraphError::InvalidRounds(n));
        }
        let layers = n + 1;
        let bulk = (d * (d - 1)) as usize;
        let space_per_layer = (d * d + (d - 1) * (d - 1)) as usize;
        let edge_total = space_per_layer * layers as usize + bulk * n as usize;
        let vert_total = Self::verts_per_layer_for(d) * layers as usize;

        let mut g = DecodingGraph {
            d,
            n,
            endpoints: Vec::with_capacity(edge_total),
            adj_off: Vec::new(),
            adj: Vec::new(),
        };
        let bulk_at = |t: u32, r: u32, c: u32| g.bulk_index(t, r, c) as u32;
        let left_at = |t: u32, r: u32| g.boundary_index(Side::Left, t, r) as u32;
        let right_at = |t: u32, r: u32| g.boundary_index(Side::Right, t, r) as u32;

        let mut endpoints = Vec::with_capacity(edge_total);
        for t in 1..=layers {
            if t >= 2 {
                for r in 0..d {
                    for c in 0..d - 1 {
                        endpoints.push([bulk_at(t - 1, r, c), bulk_at(t, r, c)]);
                    }
                }
            }
            for r in 0..d {
                endpoints.push([left_at(t, r), bulk_at(t, r, 0)]);
                for c in 0..d - 2 {
                    endpoints.push([bulk_at(t, r, c), bulk_at(t, r, c + 1)]);
                }
                endpoints.push([bulk_at(t, r, d - 2), right_at(t, r)]);
            }
            for r in 0..d - 1 {
                for c in 0..d - 1 {
                    endpoints.push([bulk_at(t, r, c), bulk_at(t, r + 1, c)]);
                }
            }
        }
        debug_assert_eq!(endpoints.len(), edge_total);
        g.endpoints = endpoints;

        // CSR adjacency, edge indices ascending per vertex.
        let mut degree = vec![0u32; vert_total];
        for &[u, v] in &g.endpoints {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut off = Vec::with_capacity(vert_total + 1);
        let mut acc = 0u32;
        off.push(0);
        for &deg in &degree {
            acc += deg;
            off.push(acc);
        }
        let mut cursor = off.clone();
        let mut adj = vec![0u32; acc as usize];
        for (e, &[u, v]) in g.endpoints.iter().enumerate() {
            adj[cursor[u as usize] as usize] = e as u32;
            cursor[u as usize] += 1;
            adj[cursor[v as usize] as usize] = e as u32;
            cursor[v as usize] += 1;
        }
        g.adj_off = off;
        g.adj = adj;
        Ok(g)
    }

    pub fn distance(&self) -> u32 {
        self.d
    }

    /// Number of noisy measurement rounds `n`.
    pub fn rounds(&self) -> u32 {
        self.n
    }

    /// Total layer count `n + 1` (noisy rounds plus the readout closure).
    pub fn layer_count(&self) -> u32 {
        self.n + 1
    }

    fn verts_per_layer_for(d: u32) -> usize {
        (d * (d - 1) + 2 * d) as usize
    }

    fn verts_per_layer(&self) -> usize {
        Self::verts_per_layer_for(self.d)
    }

    fn bulk_per_layer(&self) -> usize {
        (self.d * (self.d - 1)) as usize
    }

    fn space_per_layer(&self) -> usize {
        (self.d * self.d + (self.d - 1) * (self.d - 1)) as usize
    }

    pub fn vertex_count(&self) -> usize {
        self.verts_per_layer() * self.layer_count() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    fn bulk_index(&self, t: u32, r: u32, c: u32) -> usize {
        (t as usize - 1) * self.verts_per_layer() + (r * (self.d - 1) + c) as usize
    }

    fn boundary_index(&self, side: Side, t: u32, r: u32) -> usize {
        let side_off = match side {
            Side::Left => 0,
            Side::Right => self.d,
        };
        (t as usize - 1) * self.verts_per_layer() + self.bulk_per_layer() + (side_off + r) as usize
    }

    /// Dense index of a vertex, if it exists in this graph.
    pub fn vertex_index(&self, id: VertexId) -> Option<usize> {
        match id {
            VertexId::Bulk { t, r, c } => {
                if t >= 1 && t <= self.layer_count() && r < self.d && c < self.d - 1 {
                    Some(self.bulk_index(t, r, c))
                } else {
                    None
                }
            }
            VertexId::Boundary { side, t, r } => {
                if t >= 1 && t <= self.layer_count() && r < self.d {
                    Some(self.boundary_index(side, t, r))
                } else {
                    None
                }
            }
        }
    }

    /// Inverse of [`vertex_index`](Self::vertex_index).
    pub fn vertex_id(&self, idx: usize) -> VertexId {
        debug_assert!(idx < self.vertex_count());
        let per = self.verts_per_layer();
        let t = (idx / per) as u32 + 1;
        let off = idx % per;
        let bulk = self.bulk_per_layer();
        if off < bulk {
            VertexId::Bulk {
                t,
                r: (off / (self.d - 1) as usize) as u32,
                c: (off % (self.d - 1) as usize) as u32,
            }
        } else {
            let b = off - bulk;
            let (side, r) = if b < self.d as usize {
                (Side::Left, b as u32)
            } else {
                (Side::Right, (b - self.d as usize) as u32)
            };
            VertexId::Boundary { side, t, r }
        }
    }

    #[inline]
    pub fn is_boundary_index(&self, idx: usize) -> bool {
        idx % self.verts_per_layer() >= self.bulk_per_layer()
    }

    /// Boundary side of a vertex index, if it is a boundary vertex.
    pub fn side_of_index(&self, idx: usize) -> Option<Side> {
        let off = idx % self.verts_per_layer();
        let bulk = self.bulk_per_layer();
        if off < bulk {
            None
        } else if off < bulk + self.d as usize {
            Some(Side::Left)
        } else {
            Some(Side::Right)
        }
    }

    pub fn vertex_layer(&self, idx: usize) -> u32 {
        (idx / self.verts_per_layer()) as u32 + 1
    }

    /// Dense vertex index range of layers `t0..=t1` (clamped to the graph).
    pub fn vertex_range(&self, t0: u32, t1: u32) -> std::ops::Range<usize> {
        let per = self.verts_per_layer();
        let lo = (t0.max(1) as usize - 1) * per;
        let hi = (t1.min(self.layer_count()) as usize) * per;
        lo..hi.max(lo)
    }

    #[inline]
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let [u, v] = self.endpoints[e];
        (u as usize, v as usize)
    }

    /// Layer an edge is assigned to. Time edges belong to the later of their
    /// two layers.
    pub fn edge_layer(&self, e: usize) -> u32 {
        let space = self.space_per_layer();
        if e < space {
            1
        } else {
            let full = space + self.bulk_per_layer();
            ((e - space) / full) as u32 + 2
        }
    }

    pub fn edge_kind(&self, e: usize) -> EdgeKind {
        let t = self.edge_layer(e);
        let mut off = e - self.layer_edge_range_unchecked(t).start;
        if t >= 2 {
            if off < self.bulk_per_layer() {
                return EdgeKind::Time;
            }
            off -= self.bulk_per_layer();
        }
        if off < (self.d * self.d) as usize {
            EdgeKind::SpaceH
        } else {
            EdgeKind::SpaceV
        }
    }

    /// Full description of edge `e`.
    pub fn edge(&self, e: usize) -> Edge {
        let (u, v) = self.edge_endpoints(e);
        Edge {
            u: self.vertex_id(u),
            v: self.vertex_id(v),
            kind: self.edge_kind(e),
            layer: self.edge_layer(e),
        }
    }

    fn layer_edge_range_unchecked(&self, t: u32) -> std::ops::Range<usize> {
        let space = self.space_per_layer();
        let full = space + self.bulk_per_layer();
        if t == 1 {
            0..space
        } else {
            let start = space + (t as usize - 2) * full;
            start..(start + full).min(self.edge_count())
        }
    }

    /// Global edge index range of layer `t`. Errors on out-of-range `t`.
    pub fn layer_edge_range(&self, t: u32) -> Result<std::ops::Range<usize>, GraphError> {
        if t < 1 || t > self.layer_count() {
            return Err(GraphError::LayerOutOfRange {
                t,
                max: self.layer_count(),
            });
        }
        Ok(self.layer_edge_range_unchecked(t))
    }

    /// Edge index range of layer `t`'s time edges (empty for layer 1 and for
    /// layers beyond the graph).
    pub fn time_edge_range(&self, t: u32) -> std::ops::Range<usize> {
        if t < 2 || t > self.layer_count() {
            return 0..0;
        }
        let r = self.layer_edge_range_unchecked(t);
        r.start..r.start + self.bulk_per_layer()
    }

    /// The edges assigned to layer `t`, in the builder's stable order.
    pub fn edges_in_layer(
        &self,
        t: u32,
    ) -> Result<impl Iterator<Item = Edge> + '_, GraphError> {
        Ok(self.layer_edge_range(t)?.map(move |e| self.edge(e)))
    }

    /// Edge indices incident to vertex `idx`, ascending.
    #[inline]
    pub fn incident_edges(&self, idx: usize) -> &[u32] {
        &self.adj[self.adj_off[idx] as usize..self.adj_off[idx + 1] as usize]
    }

    /// Edge joining two vertices, if present.
    pub fn edge_index_between(&self, a: VertexId, b: VertexId) -> Option<usize> {
        let ai = self.vertex_index(a)?;
        let bi = self.vertex_index(b)? as u32;
        self.incident_edges(ai)
            .iter()
            .copied()
            .find(|&e| {
                let [u, v] = self.endpoints[e as usize];
                u == bi || v == bi
            })
            .map(|e| e as usize)
    }

    /// Serializable snapshot of the whole graph (the `graph-dump` schema).
    pub fn dump(&self) -> GraphDump {
        GraphDump {
            d: self.d,
            n: self.n,
            vertices: (0..self.vertex_count()).map(|i| self.vertex_id(i)).collect(),
            edges: (0..self.edge_count())
                .map(|e| {
                    let (u, v) = self.edge_endpoints(e);
                    EdgeDump {
                        u,
                        v,
                        kind: self.edge_kind(e),
                        layer: self.edge_layer(e),
                    }
                })
                .collect(),
        }
    }
}

/// JSON schema of `graph-dump`: vertices in index order, edges referring to
/// vertices by index.
#[derive(Serialize)]
pub struct GraphDump {
    pub d: u32,
    pub n: u32,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeDump>,
}

#[derive(Serialize)]
pub struct EdgeDump {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeKind,
    pub layer: u32,
}
