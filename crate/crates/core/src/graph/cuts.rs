use std::collections::BTreeSet;

use serde::Serialize;

use super::{EdgeKey, MixedGraph, Vertex};

/// Largest block `minimal_edge_cuts` will enumerate by default.
pub const DEFAULT_CUT_VERTEX_LIMIT: usize = 16;

/// A minimal edge cut together with the two sides it separates.
/// `side1` always holds the smallest vertex of the block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EdgeCut {
    pub edges: BTreeSet<EdgeKey>,
    pub side1: Vec<Vertex>,
    pub side2: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CutError {
    #[error("block has {size} vertices; enumeration limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
}

/// Every minimal edge cut of the block, found by enumerating bipartitions
/// whose two sides both induce connected subgraphs.
///
/// For a connected block this is exactly the set of minimal cuts: removing
/// a minimal cut leaves two components and every cut edge runs between them.
pub fn minimal_edge_cuts(g: &MixedGraph, block: &[Vertex]) -> Result<Vec<EdgeCut>, CutError> {
    minimal_edge_cuts_with_limit(g, block, DEFAULT_CUT_VERTEX_LIMIT)
}

pub fn minimal_edge_cuts_with_limit(
    g: &MixedGraph,
    block: &[Vertex],
    limit: usize,
) -> Result<Vec<EdgeCut>, CutError> {
    let mut verts: Vec<Vertex> = block.to_vec();
    verts.sort();
    verts.dedup();
    if let Some(&v) = verts.iter().find(|v| !g.contains_vertex(**v)) {
        return Err(CutError::UnknownVertex(v));
    }
    let n = verts.len();
    if n > limit || n > 31 {
        return Err(CutError::TooLarge { size: n, limit });
    }
    if n < 2 {
        return Ok(Vec::new());
    }

    let pos = |v: Vertex| verts.binary_search(&v).ok();
    let mut adj = vec![0u32; n];
    let mut inner: Vec<(usize, usize, EdgeKey)> = Vec::new();
    for k in g.edge_keys() {
        if let (Some(a), Some(b)) = (pos(Vertex::row(k.row)), pos(Vertex::col(k.col))) {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
            inner.push((a, b, k));
        }
    }
    let connected = |mask: u32| -> bool {
        let start = mask.trailing_zeros();
        let mut seen = 1u32 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[u] & mask & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen == mask
    };

    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut cuts = Vec::new();
    // Vertex 0 stays in side 1; `rest` ranges over the other vertices' side-1 membership.
    for rest in 0..(1u32 << (n - 1)) {
        let side1 = 1 | (rest << 1);
        let side2 = full & !side1;
        if side2 == 0 || !connected(side1) || !connected(side2) {
            continue;
        }
        let edges: BTreeSet<EdgeKey> = inner
            .iter()
            .filter(|(a, b, _)| ((side1 >> a) & 1) != ((side1 >> b) & 1))
            .map(|&(_, _, k)| k)
            .collect();
        let pick = |mask: u32| (0..n).filter(|i| (mask >> i) & 1 == 1).map(|i| verts[i]).collect();
        cuts.push(EdgeCut { edges, side1: pick(side1), side2: pick(side2) });
    }
    cuts.sort();
    Ok(cuts)
}
