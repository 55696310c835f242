//! Vertex connectivity, bipartite-(k+1)-connectivity and bipartite
//! completeness.
//!
//! A connected bipartite graph is *bipartite-(k+1)-connected* when both
//! sides have at least `k + 1` vertices and no set of at most `k` vertices
//! taken from a single side disconnects it. The test replaces every vertex
//! of one side by `k + 1` twins ([`replicate_side`]): twins can never all be
//! removed by a cut of size `k`, so the replicated graph is
//! `(k + 1)`-connected exactly when no cut of size `<= k` lies on the other
//! side.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::graph::{connected_components, count_components_within, Edge, EdgeKey, MixedGraph, Side, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConnectivityError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
}

/// Replaces each vertex on `side` by `k + 1` copies; copy `t` of vertex `i`
/// gets index `i * (k + 1) + t`. Every incident edge is copied once per copy.
pub fn replicate_side(g: &MixedGraph, side: Side, k: usize) -> MixedGraph {
    let m = k + 1;
    let (rows, cols) = match side {
        Side::Row => (g.rows() * m, g.cols()),
        Side::Col => (g.rows(), g.cols() * m),
    };
    let edges = g.edges().flat_map(|e| {
        (0..m).map(move |t| match side {
            Side::Row => Edge::new(e.row * m + t, e.col, e.orientation),
            Side::Col => Edge::new(e.row, e.col * m + t, e.orientation),
        })
    });
    MixedGraph::from_edges(rows, cols, edges).expect("copies of distinct edges stay distinct")
}

/// Unit vertex capacities on a direction-blind graph, reused across pairs.
struct SplitNetwork {
    head: Vec<usize>,
    cap: Vec<u8>,
    adj: Vec<Vec<usize>>,
}

impl SplitNetwork {
    // Node 2v is v's entry, 2v+1 its exit; arcs are stored in pairs (a, a^1).
    fn new(g: &MixedGraph) -> Self {
        let n = g.vertex_count();
        let mut net = SplitNetwork { head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); 2 * n] };
        for v in 0..n {
            net.arc(2 * v, 2 * v + 1, 1);
        }
        for k in g.edge_keys() {
            let (r, c) = (g.dense(k.endpoint(Side::Row)), g.dense(k.endpoint(Side::Col)));
            net.arc(2 * r + 1, 2 * c, 2);
            net.arc(2 * c + 1, 2 * r, 2);
        }
        net
    }

    fn arc(&mut self, from: usize, to: usize, cap: u8) {
        self.adj[from].push(self.head.len());
        self.head.push(to);
        self.cap.push(cap);
        self.adj[to].push(self.head.len());
        self.head.push(from);
        self.cap.push(0);
    }

    /// Number of internally vertex-disjoint `s`-`t` paths, stopping at `limit`.
    /// Leaves the residual network in `res` for separator extraction.
    fn disjoint_paths(&self, s: usize, t: usize, limit: usize, res: &mut Vec<u8>) -> usize {
        res.clear();
        res.extend_from_slice(&self.cap);
        let (src, sink) = (2 * s + 1, 2 * t);
        let mut flow = 0;
        let mut parent = vec![usize::MAX; self.adj.len()];
        while flow < limit {
            parent.iter_mut().for_each(|p| *p = usize::MAX);
            parent[src] = usize::MAX - 1;
            let mut queue = VecDeque::from([src]);
            'bfs: while let Some(u) = queue.pop_front() {
                for &a in &self.adj[u] {
                    let w = self.head[a];
                    if res[a] > 0 && parent[w] == usize::MAX {
                        parent[w] = a;
                        if w == sink {
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if parent[sink] == usize::MAX {
                break;
            }
            let mut w = sink;
            while w != src {
                let a = parent[w];
                res[a] -= 1;
                res[a ^ 1] += 1;
                w = self.head[a ^ 1];
            }
            flow += 1;
        }
        flow
    }

    /// Minimum separator read off a saturated residual network.
    fn separator(&self, s: usize, res: &[u8]) -> Vec<usize> {
        let src = 2 * s + 1;
        let mut seen = vec![false; self.adj.len()];
        seen[src] = true;
        let mut stack = vec![src];
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let w = self.head[a];
                if res[a] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..self.adj.len() / 2).filter(|&v| seen[2 * v] && !seen[2 * v + 1]).collect()
    }
}

/// Smallest vertex cut of size `< c` found by pairwise flows, if any.
///
/// Pairs are tried in the order `(v_i, v_j)` for `i < c`, `j > i`, which is
/// enough: a cut of size `< c` misses one of the first `c` vertices, and the
/// first such vertex is separated from some later vertex.
fn small_cut(g: &MixedGraph, c: usize) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let net = SplitNetwork::new(g);
    let mut adjacent = vec![BTreeSet::new(); n];
    for k in g.edge_keys() {
        let (r, col) = (g.dense(k.endpoint(Side::Row)), g.dense(k.endpoint(Side::Col)));
        adjacent[r].insert(col);
        adjacent[col].insert(r);
    }
    let mut res = Vec::new();
    for i in 0..c.min(n) {
        for j in i + 1..n {
            if adjacent[i].contains(&j) {
                continue;
            }
            if net.disjoint_paths(i, j, c, &mut res) < c {
                return Some(net.separator(i, &res));
            }
        }
    }
    None
}

fn ensure_connected(g: &MixedGraph) -> Result<(), ConnectivityError> {
    if connected_components(g).blocks.len() > 1 {
        return Err(ConnectivityError::Disconnected);
    }
    Ok(())
}

/// True iff `g` has at least `c + 1` vertices and no set of fewer than `c`
/// vertices disconnects it. Edge directions are ignored.
pub fn vertex_connectivity_at_least(g: &MixedGraph, c: usize) -> Result<bool, ConnectivityError> {
    ensure_connected(g)?;
    if g.vertex_count() < c + 1 {
        return Ok(false);
    }
    Ok(small_cut(g, c).is_none())
}

/// A set of at most `k` same-side vertices whose removal disconnects a
/// component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideCutWitness {
    pub side: Side,
    pub vertices: Vec<Vertex>,
    /// The component the cut was found in.
    pub component: Vec<Vertex>,
    /// The smallest piece left after removing `vertices`.
    pub isolated: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KConnectivity {
    Holds,
    /// One side has fewer than `needed` vertices.
    SizeDeficiency { side: Side, size: usize, needed: usize },
    SideCut(SideCutWitness),
}

impl KConnectivity {
    pub fn holds(&self) -> bool {
        matches!(self, KConnectivity::Holds)
    }
}

/// Bipartite-(k+1)-connectivity of a connected graph.
pub fn is_bipartite_k1_connected(g: &MixedGraph, k: usize) -> Result<KConnectivity, ConnectivityError> {
    ensure_connected(g)?;
    for (side, size) in [(Side::Row, g.rows()), (Side::Col, g.cols())] {
        if size < k + 1 {
            return Ok(KConnectivity::SizeDeficiency { side, size, needed: k + 1 });
        }
    }
    // Replicating rows exposes column cuts, and vice versa.
    for replicated in [Side::Row, Side::Col] {
        let aux = replicate_side(g, replicated, k);
        if let Some(cut) = small_cut(&aux, k + 1) {
            let cut_side = replicated.other();
            let vertices: Vec<Vertex> = cut
                .into_iter()
                .map(|id| aux.vertex_at(id))
                .inspect(|v| debug_assert_eq!(v.side, cut_side, "minimum separators avoid twins"))
                .collect();
            return Ok(KConnectivity::SideCut(witness(g, &g.vertices().collect::<Vec<_>>(), cut_side, vertices)));
        }
    }
    Ok(KConnectivity::Holds)
}

/// [`is_bipartite_k1_connected`] on the subgraph induced by `block`, with
/// witnesses reported in `g`'s vertex names.
pub fn is_block_k1_connected(g: &MixedGraph, block: &[Vertex], k: usize) -> Result<KConnectivity, ConnectivityError> {
    if let Some(&v) = block.iter().find(|v| !g.contains_vertex(**v)) {
        return Err(ConnectivityError::UnknownVertex(v));
    }
    let (sub, rows, cols) = g.induced(block);
    let back = |v: Vertex| match v.side {
        Side::Row => rows[v.index],
        Side::Col => cols[v.index],
    };
    Ok(match is_bipartite_k1_connected(&sub, k)? {
        KConnectivity::SideCut(w) => {
            let mut vertices: Vec<Vertex> = w.vertices.into_iter().map(back).collect();
            vertices.sort();
            let mut component: Vec<Vertex> = block.to_vec();
            component.sort();
            component.dedup();
            let mut isolated: Vec<Vertex> = w.isolated.into_iter().map(back).collect();
            isolated.sort();
            KConnectivity::SideCut(SideCutWitness { side: w.side, vertices, component, isolated })
        }
        other => other,
    })
}

fn witness(g: &MixedGraph, component: &[Vertex], side: Side, mut vertices: Vec<Vertex>) -> SideCutWitness {
    vertices.sort();
    let removed: BTreeSet<Vertex> = vertices.iter().copied().collect();
    let rest: Vec<Vertex> = component.iter().copied().filter(|v| !removed.contains(v)).collect();
    let pieces = pieces_within(g, &rest);
    let isolated = pieces
        .into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .unwrap_or_default();
    SideCutWitness { side, vertices, component: component.to_vec(), isolated }
}

/// Direction-blind components of the subgraph induced by `vertices`.
pub(crate) fn pieces_within(g: &MixedGraph, vertices: &[Vertex]) -> Vec<Vec<Vertex>> {
    let (sub, rows, cols) = g.induced(vertices);
    connected_components(&sub)
        .blocks
        .into_iter()
        .map(|b| {
            b.into_iter()
                .map(|v| match v.side {
                    Side::Row => rows[v.index],
                    Side::Col => cols[v.index],
                })
                .collect()
        })
        .collect()
}

/// Does removing `cut` split the vertices of `block` into two or more pieces?
/// Removing all but one vertex never counts as a disconnection.
pub(crate) fn disconnects(g: &MixedGraph, block: &[Vertex], cut: &BTreeSet<Vertex>) -> bool {
    let rest: Vec<Vertex> = block.iter().copied().filter(|v| !cut.contains(v)).collect();
    rest.len() >= 2 && count_components_within(g, &rest, &BTreeSet::new()) >= 2
}

/// At least two rows, two columns, and every row/column pair of `block` is
/// an edge.
pub fn is_bipartite_complete(g: &MixedGraph, block: &[Vertex]) -> bool {
    let rows = block.iter().filter(|v| v.side == Side::Row).count();
    let cols = block.len() - rows;
    rows >= 2 && cols >= 2 && missing_pairs(g, block).is_empty()
}

/// Row/column pairs of `block` with no edge, in canonical order.
pub fn missing_pairs(g: &MixedGraph, block: &[Vertex]) -> Vec<EdgeKey> {
    let rows: BTreeSet<usize> = block.iter().filter(|v| v.side == Side::Row).map(|v| v.index).collect();
    let cols: BTreeSet<usize> = block.iter().filter(|v| v.side == Side::Col).map(|v| v.index).collect();
    rows.iter()
        .flat_map(|&r| cols.iter().map(move |&c| EdgeKey::new(r, c)))
        .filter(|&k| !g.contains(k))
        .collect()
}
