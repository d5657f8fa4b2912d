//! Union–Find decoding, batch and sliding-window.
//!
//! [`uf_decode`] runs the classic two-phase decoder over the whole graph:
//! odd clusters grow by half an edge per round, merging on contact, until
//! every cluster is even or touches a boundary; a spanning forest of the
//! grown edges is then peeled by subtree parity to read off a correction.
//!
//! [`forward_decode`] decodes the same syndrome through a window of `W`
//! layers sliding up the time axis. Only edges in the oldest `C` layers of a
//! window are committed; the defects a partial commit leaves behind are fed
//! back into the next window, whose start adapts downward to cover them.
//! While a window is not the last one, the time edges of the layer just above
//! it act as a free "future face": chains may exit upward at no cost, and the
//! face vertices they exit through are re-emitted as pending defects for a
//! later window, mirroring how a streaming decoder defers decisions it cannot
//! make yet. With `W = n + 1` the first window is the final one, everything
//! is committed at once, and the call reduces to `uf_decode` exactly.
//!
//! All decisions (growth order, merge order, forest construction, peel
//! roots) are made in ascending index order, so both decoders are
//! deterministic functions of their inputs.

use thiserror::Error;

use crate::bits::Bits;
use crate::graph::DecodingGraph;
use crate::noise::{EdgeSet, Syndrome};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecoderError {
    #[error(
        "window parameters must satisfy 1 <= commit < window <= {max}; \
         got window {window}, commit {commit}"
    )]
    InvalidWindow { window: u32, commit: u32, max: u32 },
    #[error("syndrome defect {0} is not a bulk detector of the graph")]
    InvalidSyndrome(u32),
}

const NONE: u32 = u32::MAX;

/// Reusable per-window working memory. Cleared and resized on every decode,
/// so one instance serves all windows of a shot (and all shots of a thread).
#[derive(Default)]
struct Scratch {
    // cluster-growth state, indexed by window-local vertex
    parent: Vec<u32>,
    parity: Vec<bool>,
    boundary: Vec<bool>,
    members: Vec<Vec<u32>>,
    /// per window-local edge: 0, 1, or 2 (fully grown)
    growth: Vec<u8>,
    active: Vec<u32>,
    next_active: Vec<u32>,
    newly_grown: Vec<u32>,
    defect: Vec<bool>,
    defect_list: Vec<u32>,
    // forest + peel state
    forest_parent: Vec<u32>,
    forest_edges: Vec<(u32, u32, u32)>,
    deg: Vec<u32>,
    adj_off: Vec<u32>,
    adj_vert: Vec<u32>,
    adj_edge: Vec<u32>,
    visited: Vec<bool>,
    subparity: Vec<bool>,
    tree_parent: Vec<u32>,
    tree_edge: Vec<u32>,
    stack: Vec<u32>,
    comp: Vec<u32>,
    order: Vec<u32>,
}

impl Scratch {
    fn reset(&mut self, nv: usize, ne: usize) {
        self.parent.clear();
        self.parent.extend(0..nv as u32);
        reset_flags(&mut self.parity, nv);
        reset_flags(&mut self.boundary, nv);
        if self.members.len() < nv {
            self.members.resize_with(nv, Vec::new);
        }
        for m in &mut self.members[..nv] {
            m.clear();
        }
        self.growth.clear();
        self.growth.resize(ne, 0);
        self.active.clear();
        self.defect_list.clear();
        reset_flags(&mut self.defect, nv);
        self.forest_parent.clear();
        self.forest_parent.extend(0..nv as u32);
        self.forest_edges.clear();
        reset_flags(&mut self.visited, nv);
        reset_flags(&mut self.subparity, nv);
        self.tree_parent.clear();
        self.tree_parent.resize(nv, NONE);
        self.tree_edge.clear();
        self.tree_edge.resize(nv, NONE);
    }
}

fn reset_flags(v: &mut Vec<bool>, n: usize) {
    v.clear();
    v.resize(n, false);
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

/// Merge the clusters of local vertices `a` and `b`. The smaller root index
/// survives, so cluster identity is deterministic.
fn union(
    parent: &mut [u32],
    parity: &mut [bool],
    boundary: &mut [bool],
    members: &mut [Vec<u32>],
    a: u32,
    b: u32,
) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra == rb {
        return;
    }
    let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
    for r in [keep, drop] {
        if members[r as usize].is_empty() {
            members[r as usize].push(r);
        }
    }
    parent[drop as usize] = keep;
    parity[keep as usize] ^= parity[drop as usize];
    boundary[keep as usize] |= boundary[drop as usize];
    let moved = std::mem::take(&mut members[drop as usize]);
    members[keep as usize].extend(moved);
}

/// Decode the defects of layers `lo..=hi` against the sub-graph spanned by
/// those layers (plus, if `face` is set, the time edges into layer `hi + 1`,
/// whose far endpoints absorb chains like boundaries do). Selected global
/// edge indices are appended to `out`.
///
/// `defects` must yield global bulk-vertex indices within layers `lo..=hi`,
/// ascending. Time edges of layer `lo` reach down to layer `lo - 1` and are
/// excluded from the window.
fn decode_window(
    g: &DecodingGraph,
    sc: &mut Scratch,
    defects: impl Iterator<Item = usize>,
    lo: u32,
    hi: u32,
    face: bool,
    out: &mut Vec<u32>,
) {
    let span_top = if face { hi + 1 } else { hi };
    let vr = g.vertex_range(lo, span_top);
    let (v_lo, v_hi) = (vr.start, vr.end);
    let e_lo = g.time_edge_range(lo).end.max(g.layer_edge_range(lo).unwrap().start);
    let e_hi = if face {
        g.time_edge_range(hi + 1).end
    } else {
        g.layer_edge_range(hi).unwrap().end
    };
    let nv = v_hi - v_lo;
    let ne = e_hi - e_lo;
    let face_start = if face {
        g.vertex_range(hi + 1, hi + 1).start
    } else {
        usize::MAX
    };
    let absorber = |vg: usize| g.is_boundary_index(vg) || vg >= face_start;

    sc.reset(nv, ne);
    let Scratch {
        parent,
        parity,
        boundary,
        members,
        growth,
        active,
        next_active,
        newly_grown,
        defect,
        defect_list,
        ..
    } = sc;

    for vg in v_lo..v_hi {
        if absorber(vg) {
            boundary[vg - v_lo] = true;
        }
    }
    for dg in defects {
        debug_assert!((v_lo..v_hi).contains(&dg) && !absorber(dg));
        let dl = (dg - v_lo) as u32;
        parity[dl as usize] = true;
        defect[dl as usize] = true;
        members[dl as usize].push(dl);
        defect_list.push(dl);
        active.push(dl);
    }

    // Growth: every active (odd, boundary-free) cluster adds half an edge to
    // its whole frontier each round; edges reaching full growth merge their
    // endpoint clusters. Active roots are snapshot at round start and
    // processed ascending.
    while !active.is_empty() {
        newly_grown.clear();
        for &r in active.iter() {
            for i in 0..members[r as usize].len() {
                let vg = v_lo + members[r as usize][i] as usize;
                for &eg in g.incident_edges(vg) {
                    let eg = eg as usize;
                    if eg < e_lo || eg >= e_hi {
                        continue;
                    }
                    let le = eg - e_lo;
                    if growth[le] >= 2 {
                        continue;
                    }
                    let (a, b) = g.edge_endpoints(eg);
                    let other = if a == vg { b } else { a };
                    if find(parent, (other - v_lo) as u32) == r {
                        continue;
                    }
                    growth[le] += 1;
                    if growth[le] == 2 {
                        newly_grown.push(le as u32);
                    }
                }
            }
        }
        for &le in newly_grown.iter() {
            let (a, b) = g.edge_endpoints(e_lo + le as usize);
            union(
                parent,
                parity,
                boundary,
                members,
                (a - v_lo) as u32,
                (b - v_lo) as u32,
            );
        }
        // A cluster can only become active through a merge involving one
        // that already was, so the old list's roots cover all candidates.
        next_active.clear();
        for &r in active.iter() {
            next_active.push(find(parent, r));
        }
        next_active.sort_unstable();
        next_active.dedup();
        next_active.retain(|&r| parity[r as usize] && !boundary[r as usize]);
        std::mem::swap(active, next_active);
    }

    // Spanning forest of the grown edges, Kruskal order = ascending edge id.
    let Scratch {
        growth,
        forest_parent,
        forest_edges,
        deg,
        adj_off,
        adj_vert,
        adj_edge,
        visited,
        subparity,
        tree_parent,
        tree_edge,
        stack,
        comp,
        order,
        defect,
        ..
    } = sc;
    deg.clear();
    deg.resize(nv, 0);
    for le in 0..ne {
        if growth[le] != 2 {
            continue;
        }
        let (a, b) = g.edge_endpoints(e_lo + le);
        let (al, bl) = ((a - v_lo) as u32, (b - v_lo) as u32);
        let (ra, rb) = (find(forest_parent, al), find(forest_parent, bl));
        if ra == rb {
            continue; // would close a cycle
        }
        forest_parent[ra.max(rb) as usize] = ra.min(rb);
        forest_edges.push((al, bl, le as u32));
        deg[al as usize] += 1;
        deg[bl as usize] += 1;
    }
    adj_off.clear();
    adj_off.reserve(nv + 1);
    let mut acc = 0u32;
    adj_off.push(0);
    for &d in deg.iter() {
        acc += d;
        adj_off.push(acc);
    }
    adj_vert.clear();
    adj_vert.resize(acc as usize, 0);
    adj_edge.clear();
    adj_edge.resize(acc as usize, 0);
    let mut cursor: Vec<u32> = adj_off.clone();
    for &(a, b, e) in forest_edges.iter() {
        for (x, y) in [(a, b), (b, a)] {
            let slot = cursor[x as usize] as usize;
            adj_vert[slot] = y;
            adj_edge[slot] = e;
            cursor[x as usize] += 1;
        }
    }

    // Peel each tree: root at its smallest absorber (else smallest vertex),
    // then take exactly the edges whose child-side subtree holds an odd
    // number of defects. The choice is forced, so peeling needs no ordering
    // heuristics and cannot fail.
    for v0 in 0..nv as u32 {
        if visited[v0 as usize] || deg[v0 as usize] == 0 {
            debug_assert!(
                !defect[v0 as usize] || visited[v0 as usize],
                "defect vertex left unclustered"
            );
            continue;
        }
        comp.clear();
        stack.clear();
        stack.push(v0);
        visited[v0 as usize] = true;
        let mut root = NONE; // smallest absorber, if any
        while let Some(v) = stack.pop() {
            comp.push(v);
            if root == NONE && boundaryish(v, v_lo, face_start, g) {
                root = v;
            } else if boundaryish(v, v_lo, face_start, g) && v < root {
                root = v;
            }
            let (s, e) = (adj_off[v as usize] as usize, adj_off[v as usize + 1] as usize);
            for &w in &adj_vert[s..e] {
                if !visited[w as usize] {
                    visited[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        let root = if root == NONE { v0 } else { root };

        // rooted DFS recording discovery order and parent edges
        order.clear();
        stack.clear();
        stack.push(root);
        tree_parent[root as usize] = root;
        while let Some(v) = stack.pop() {
            order.push(v);
            let (s, e) = (adj_off[v as usize] as usize, adj_off[v as usize + 1] as usize);
            for i in s..e {
                let w = adj_vert[i];
                if tree_parent[w as usize] == NONE && w != root {
                    tree_parent[w as usize] = v;
                    tree_edge[w as usize] = adj_edge[i];
                    stack.push(w);
                }
            }
        }
        debug_assert_eq!(order.len(), comp.len());
        for &v in order.iter().rev() {
            let odd = defect[v as usize] ^ subparity[v as usize];
            if v != root && odd {
                out.push((e_lo + tree_edge[v as usize] as usize) as u32);
                subparity[tree_parent[v as usize] as usize] ^= true;
            }
        }
        // An odd tree must hand its last defect to an absorber; growth only
        // stops odd clusters by giving them one, and it becomes the root.
        debug_assert!(
            !(defect[root as usize] ^ subparity[root as usize])
                || boundaryish(root, v_lo, face_start, g)
        );
    }
}

#[inline]
fn boundaryish(v_local: u32, v_lo: usize, face_start: usize, g: &DecodingGraph) -> bool {
    let vg = v_lo + v_local as usize;
    g.is_boundary_index(vg) || vg >= face_start
}

fn validate_syndrome(g: &DecodingGraph, s: &Syndrome) -> Result<(), DecoderError> {
    let mut prev = None;
    for &d in &s.defects {
        let ok = (d as usize) < g.vertex_count()
            && !g.is_boundary_index(d as usize)
            && prev.map_or(true, |p| p < d);
        if !ok {
            return Err(DecoderError::InvalidSyndrome(d));
        }
        prev = Some(d);
    }
    Ok(())
}

/// Decode the full experiment at once. The returned correction reproduces
/// the syndrome exactly: `syndrome_of(g, &uf_decode(g, s)?) == *s`.
pub fn uf_decode(g: &DecodingGraph, s: &Syndrome) -> Result<EdgeSet, DecoderError> {
    validate_syndrome(g, s)?;
    let mut sc = Scratch::default();
    let mut picked = Vec::new();
    decode_window(
        g,
        &mut sc,
        s.defects.iter().map(|&d| d as usize),
        1,
        g.layer_count(),
        false,
        &mut picked,
    );
    let mut out = EdgeSet::for_graph(g);
    for e in picked {
        out.toggle(e as usize);
    }
    Ok(out)
}

/// Decode through a sliding window of `window` layers, committing the oldest
/// `commit` layers of each placement. Requires `1 <= commit < window <=
/// n + 1`. Satisfies the same syndrome-reproduction postcondition as
/// [`uf_decode`], and equals it bit for bit when `window == n + 1`.
pub fn forward_decode(
    g: &DecodingGraph,
    s: &Syndrome,
    window: u32,
    commit: u32,
) -> Result<EdgeSet, DecoderError> {
    let max = g.layer_count();
    if commit < 1 || commit >= window || window > max {
        return Err(DecoderError::InvalidWindow {
            window,
            commit,
            max,
        });
    }
    validate_syndrome(g, s)?;

    let mut committed = EdgeSet::for_graph(g);
    // pending = syndrome XOR syndrome_of(committed): the defects not yet
    // explained by what has been committed. Never contains boundary vertices
    // and, by construction, nothing below the current window start.
    let mut pending = Bits::new(g.vertex_count());
    for &d in &s.defects {
        pending.insert(d as usize);
    }
    let mut sc = Scratch::default();
    let mut picked: Vec<u32> = Vec::new();

    let commit_edge = |eg: u32, committed: &mut EdgeSet, pending: &mut Bits| {
        committed.toggle(eg as usize);
        let (u, v) = g.edge_endpoints(eg as usize);
        if !g.is_boundary_index(u) {
            pending.toggle(u);
        }
        if !g.is_boundary_index(v) {
            pending.toggle(v);
        }
    };

    let mut lo = 1u32;
    loop {
        let scan_from = g.vertex_range(lo, lo).start;
        let Some(first) = pending.iter_range(scan_from..g.vertex_count()).next() else {
            break;
        };
        debug_assert!(g.vertex_layer(first) >= lo, "pending defect below window");
        let hi = (lo + window - 1).min(max);
        let last = hi == max;
        picked.clear();
        let feed = pending.iter_range(scan_from..g.vertex_range(hi, hi).end);
        decode_window(g, &mut sc, feed, lo, hi, !last, &mut picked);

        if last {
            for i in 0..picked.len() {
                commit_edge(picked[i], &mut committed, &mut pending);
            }
            debug_assert!(pending.range_is_empty(0..g.vertex_count()));
            break;
        }

        // Normal step: commit only the window's oldest `commit` layers.
        for i in 0..picked.len() {
            if g.edge_layer(picked[i] as usize) < lo + commit {
                commit_edge(picked[i], &mut committed, &mut pending);
            }
        }
        let floor = pending
            .iter_range(scan_from..g.vertex_count())
            .next()
            .map(|v| g.vertex_layer(v));
        match floor {
            None => break,
            Some(f) if f == lo => {
                // No headway at the window start (only possible for
                // commit = 1, when a defect pairs straight up its time
                // edge). Commit the rest of the window's correction, face
                // edges included; their upper endpoints rejoin `pending` and
                // are re-decoded by a later window.
                for i in 0..picked.len() {
                    if g.edge_layer(picked[i] as usize) >= lo + commit {
                        commit_edge(picked[i], &mut committed, &mut pending);
                    }
                }
                lo += commit;
            }
            Some(f) => lo = f.min(lo + commit),
        }
    }
    Ok(committed)
}

/// Symmetric difference of physical errors and correction: the error chains
/// left after correction is applied.
pub fn residual(errors: &EdgeSet, correction: &EdgeSet) -> EdgeSet {
    let mut r = errors.clone();
    r.xor_assign(correction);
    r
}
