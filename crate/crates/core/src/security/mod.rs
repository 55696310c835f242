//! The four protection levels as graph predicates on the suppressed graph.
//!
//! | level                      | suppressed graph must be                          |
//! |----------------------------|---------------------------------------------------|
//! | every cell                 | strongly connected, bridge-free                   |
//! | every row and column       | strongly connected, bipartite-2-connected         |
//! | every set of <= k lines    | strongly connected, bipartite-(k+1)-connected     |
//! | the whole table            | strongly connected, bipartite-complete            |
//!
//! Each condition applies to every nonsingleton connected component.

mod report;

use std::collections::BTreeSet;

use crate::connectivity::{self, is_block_k1_connected, missing_pairs, KConnectivity, SideCutWitness};
use crate::graph::{
    connected_components, direction_blind_bridges, reach_dense, strong_components, EdgeKey, MixedGraph, Orientation,
    Side, Vertex,
};

pub use report::{AuditReport, CellLevel, LineFailure, LineLevel, SetsLevel, TableLevel};

/// Largest set (within one strong component) whose subsets are checked for
/// vertex cuts.
pub const SET_SUBSET_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SecurityError {
    #[error("set mixes rows and columns")]
    MixedSet,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("{size} set members share a strong component; the limit is {limit}")]
    SetTooLarge { size: usize, limit: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Suppressed cells whose edge lies on no edge-simple traversable cycle,
/// i.e. cells whose value can be recomputed exactly.
pub fn unprotected_cells(h: &MixedGraph) -> BTreeSet<EdgeKey> {
    let adj = h.arc_adjacency();
    let mut out = BTreeSet::new();
    for e in h.edges() {
        let r = h.dense(Vertex::row(e.row));
        let c = h.dense(Vertex::col(e.col));
        let key = e.key();
        let reaches = |from: usize, to: usize| reach_dense(&adj, from, Some(key))[to];
        let on_cycle = match e.orientation {
            Orientation::RowToCol => reaches(c, r),
            Orientation::ColToRow => reaches(r, c),
            Orientation::Undirected => reaches(r, c) || reaches(c, r),
        };
        if !on_cycle {
            out.insert(key);
        }
    }
    out
}

/// Every connected component strongly connected and free of bridges.
pub fn all_cells_protected(h: &MixedGraph) -> bool {
    connected_components(h).blocks == strong_components(h).blocks && direction_blind_bridges(h).is_empty()
}

/// Why a same-side vertex set fails to be protected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetFailure {
    /// An edge at `vertex` leaves the strong component containing it.
    EdgeLeavesComponent { vertex: Vertex, edge: EdgeKey },
    /// Removing `cut` (a subset of the set) disconnects a strong component.
    VertexCut { cut: Vec<Vertex>, component: Vec<Vertex> },
    /// `vertex` has exactly one suppressed cell, which is therefore exposed.
    SingleEdge { vertex: Vertex },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetVerdict {
    Protected,
    Unprotected(SetFailure),
}

impl SetVerdict {
    pub fn is_protected(&self) -> bool {
        matches!(self, SetVerdict::Protected)
    }
}

/// Protection of a set of rows, or of a set of columns.
///
/// Members with no suppressed cells are dropped first. The rest must each
/// have at least two edges and keep all of them inside their strong
/// component, and no nonempty subset of them may disconnect a strong
/// component.
pub fn is_set_protected(h: &MixedGraph, set: &[Vertex]) -> Result<SetVerdict, SecurityError> {
    if let Some(&v) = set.iter().find(|v| !h.contains_vertex(**v)) {
        return Err(SecurityError::UnknownVertex(v));
    }
    if set.iter().any(|v| v.side != set[0].side) {
        return Err(SecurityError::MixedSet);
    }
    let mut members: Vec<Vertex> = set.iter().copied().filter(|&v| h.degree(v) > 0).collect();
    members.sort();
    members.dedup();

    for &v in &members {
        if h.degree(v) == 1 {
            return Ok(SetVerdict::Unprotected(SetFailure::SingleEdge { vertex: v }));
        }
    }
    let strong = strong_components(h);
    for &v in &members {
        let block = strong.block_of(v).expect("partition covers every vertex");
        for e in h.incident(v) {
            let other = e.key().endpoint(v.side.other());
            if strong.block_of(other) != Some(block) {
                return Ok(SetVerdict::Unprotected(SetFailure::EdgeLeavesComponent { vertex: v, edge: e.key() }));
            }
        }
    }

    let blocks: BTreeSet<usize> = members.iter().map(|&v| strong.block_of(v).unwrap()).collect();
    let mut best: Option<(Vec<Vertex>, Vec<Vertex>)> = None;
    for b in blocks {
        let component = &strong.blocks[b];
        let inside: Vec<Vertex> = members.iter().copied().filter(|v| component.binary_search(v).is_ok()).collect();
        if inside.len() > SET_SUBSET_LIMIT {
            return Err(SecurityError::SetTooLarge { size: inside.len(), limit: SET_SUBSET_LIMIT });
        }
        if let Some(cut) = smallest_cut_subset(h, component, &inside) {
            let better = best.as_ref().is_none_or(|(c, _)| (cut.len(), &cut) < (c.len(), c));
            if better {
                best = Some((cut, component.clone()));
            }
        }
    }
    Ok(match best {
        Some((cut, component)) => SetVerdict::Unprotected(SetFailure::VertexCut { cut, component }),
        None => SetVerdict::Protected,
    })
}

fn smallest_cut_subset(h: &MixedGraph, component: &[Vertex], members: &[Vertex]) -> Option<Vec<Vertex>> {
    let n = members.len();
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    masks.into_iter().find_map(|mask| {
        let cut: BTreeSet<Vertex> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| members[i]).collect();
        connectivity::disconnects(h, component, &cut).then(|| cut.into_iter().collect())
    })
}

/// Why a component fails a level-3 or level-4 condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentFailure {
    NotStronglyConnected { component: Vec<Vertex> },
    SizeDeficiency { component: Vec<Vertex>, side: Side, size: usize, needed: usize },
    SideCut(SideCutWitness),
    Incomplete { component: Vec<Vertex>, missing: Vec<EdgeKey> },
}

/// A predicate over all nonsingleton components, with one entry per failing
/// component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub failures: Vec<ComponentFailure>,
}

impl Verdict {
    fn from_failures(failures: Vec<ComponentFailure>) -> Self {
        Verdict { holds: failures.is_empty(), failures }
    }
}

fn strong_blocks(h: &MixedGraph) -> (Vec<Vec<Vertex>>, BTreeSet<Vec<Vertex>>) {
    let connected: Vec<Vec<Vertex>> = connected_components(h).nonsingleton().cloned().collect();
    let strong: BTreeSet<Vec<Vertex>> = strong_components(h).blocks.into_iter().collect();
    (connected, strong)
}

/// Every set of at most `k` rows, and every set of at most `k` columns, is
/// protected.
pub fn all_k_sets_protected(h: &MixedGraph, k: usize) -> Verdict {
    let (components, strong) = strong_blocks(h);
    let mut failures = Vec::new();
    for component in components {
        if !strong.contains(&component) {
            failures.push(ComponentFailure::NotStronglyConnected { component });
            continue;
        }
        match is_block_k1_connected(h, &component, k).expect("components are connected") {
            KConnectivity::Holds => {}
            KConnectivity::SizeDeficiency { side, size, needed } => {
                failures.push(ComponentFailure::SizeDeficiency { component, side, size, needed })
            }
            KConnectivity::SideCut(w) => failures.push(ComponentFailure::SideCut(w)),
        }
    }
    Verdict::from_failures(failures)
}

/// The whole table is protected: every nonsingleton component is strongly
/// connected and complete bipartite with at least two vertices per side.
pub fn is_table_protected(h: &MixedGraph) -> Verdict {
    let (components, strong) = strong_blocks(h);
    let mut failures = Vec::new();
    for component in components {
        if !strong.contains(&component) {
            failures.push(ComponentFailure::NotStronglyConnected { component });
            continue;
        }
        let rows = component.iter().filter(|v| v.side == Side::Row).count();
        let cols = component.len() - rows;
        if rows < 2 || cols < 2 {
            let (side, size) = if rows < 2 { (Side::Row, rows) } else { (Side::Col, cols) };
            failures.push(ComponentFailure::SizeDeficiency { component, side, size, needed: 2 });
            continue;
        }
        let missing = missing_pairs(h, &component);
        if !missing.is_empty() {
            failures.push(ComponentFailure::Incomplete { component, missing });
        }
    }
    Verdict::from_failures(failures)
}

/// Smallest number of rows, or of columns, in any nonsingleton component.
pub fn min_side(h: &MixedGraph) -> Option<usize> {
    connected_components(h)
        .nonsingleton()
        .map(|b| {
            let rows = b.iter().filter(|v| v.side == Side::Row).count();
            rows.min(b.len() - rows)
        })
        .min()
}

/// Evaluates all four levels (level 3 for `k = 1..=k_max`) and cross-checks
/// the implications between them. A failed cross-check is an
/// [`SecurityError::Internal`] error.
pub fn audit(h: &MixedGraph, k_max: usize) -> Result<AuditReport, SecurityError> {
    let unprotected = unprotected_cells(h);
    let cells_ok = all_cells_protected(h);
    if cells_ok != unprotected.is_empty() {
        return Err(SecurityError::Internal(format!(
            "cell predicate says {cells_ok} but {} cells lie on no cycle",
            unprotected.len()
        )));
    }

    let mut lines = Vec::new();
    for v in h.vertices() {
        if let SetVerdict::Unprotected(reason) = is_set_protected(h, &[v])? {
            lines.push(LineFailure { vertex: v, reason });
        }
    }

    let mut notes = Vec::new();
    let sets: Vec<SetsLevel> = (1..=k_max).map(|k| SetsLevel { k, verdict: all_k_sets_protected(h, k) }).collect();
    let k1 = match sets.first() {
        Some(s) => s.verdict.holds,
        None => all_k_sets_protected(h, 1).holds,
    };
    if k1 != lines.is_empty() {
        return Err(SecurityError::Internal(format!(
            "per-line checks found {} unprotected lines but the k=1 predicate says {k1}",
            lines.len()
        )));
    }
    notes.push("every line protected agrees with the k=1 set predicate".to_string());

    let bad_lines: BTreeSet<Vertex> = lines.iter().map(|l| l.vertex).collect();
    for &cell in &unprotected {
        for side in [Side::Row, Side::Col] {
            let v = cell.endpoint(side);
            if !bad_lines.contains(&v) {
                return Err(SecurityError::Internal(format!("line {v} is protected but its cell {cell} is not")));
            }
        }
    }
    notes.push("protected lines contain only protected cells".to_string());

    for pair in sets.windows(2) {
        if pair[1].verdict.holds && !pair[0].verdict.holds {
            return Err(SecurityError::Internal(format!(
                "sets of {} lines protected but sets of {} are not",
                pair[1].k, pair[0].k
            )));
        }
    }
    if sets.len() > 1 {
        notes.push("set protection is monotone in k".to_string());
    }

    let table = is_table_protected(h);
    if table.holds {
        if let Some(m) = min_side(h).filter(|&m| m >= 2) {
            let k = m - 1;
            let holds = match sets.iter().find(|s| s.k == k) {
                Some(s) => s.verdict.holds,
                None => all_k_sets_protected(h, k).holds,
            };
            if !holds {
                return Err(SecurityError::Internal(format!("table protected but sets of {k} lines are not")));
            }
            notes.push(format!("table protection implies protection of every set of at most {k} lines"));
        }
    }

    Ok(AuditReport {
        level1: CellLevel { all_protected: cells_ok, unprotected_cells: unprotected.into_iter().collect() },
        level2: LineLevel { all_protected: lines.is_empty(), unprotected: lines },
        level3: sets,
        level4: TableLevel { verdict: table },
        hierarchy_notes: notes,
    })
}
