//! Mixed bipartite graphs and the connectivity primitives built on them.
//!
//! A [`MixedGraph`] has one vertex per table row (side [`Side::Row`]) and one
//! per table column (side [`Side::Col`]). Every edge joins a row to a column
//! and is either undirected or directed one way. There is at most one edge
//! per row/column pair, so edges are keyed by [`EdgeKey`].
//!
//! Algorithms work on dense vertex ids: rows occupy `0..rows`, columns
//! `rows..rows + cols`. [`MixedGraph::dense`] and [`MixedGraph::vertex_at`]
//! convert between the two forms.

mod cuts;
mod traverse;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use cuts::{minimal_edge_cuts, minimal_edge_cuts_with_limit, CutError, EdgeCut, DEFAULT_CUT_VERTEX_LIMIT};
pub(crate) use traverse::{count_components_within, reach_dense};
pub use traverse::{
    connected_components, direction_blind_bridges, strong_components, traversable_reachable,
    ComponentPartition, PartitionKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Row,
    Col,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Row => Side::Col,
            Side::Col => Side::Row,
        }
    }
}

/// A vertex: its side and its index on that side. Rows order before columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub side: Side,
    pub index: usize,
}

impl Vertex {
    pub fn row(index: usize) -> Self {
        Vertex { side: Side::Row, index }
    }

    pub fn col(index: usize) -> Self {
        Vertex { side: Side::Col, index }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Row => write!(f, "R{}", self.index),
            Side::Col => write!(f, "C{}", self.index),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Undirected,
    RowToCol,
    ColToRow,
}

impl Orientation {
    pub fn is_directed(self) -> bool {
        self != Orientation::Undirected
    }
}

/// The row/column pair an edge joins; doubles as the id of a table cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub row: usize,
    pub col: usize,
}

impl EdgeKey {
    pub fn new(row: usize, col: usize) -> Self {
        EdgeKey { row, col }
    }

    pub fn endpoint(&self, side: Side) -> Vertex {
        match side {
            Side::Row => Vertex::row(self.row),
            Side::Col => Vertex::col(self.col),
        }
    }

    pub fn touches(&self, v: Vertex) -> bool {
        match v.side {
            Side::Row => self.row == v.index,
            Side::Col => self.col == v.index,
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(R{},C{})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub row: usize,
    pub col: usize,
    pub orientation: Orientation,
}

impl Edge {
    pub fn new(row: usize, col: usize, orientation: Orientation) -> Self {
        Edge { row, col, orientation }
    }

    pub fn undirected(row: usize, col: usize) -> Self {
        Edge::new(row, col, Orientation::Undirected)
    }

    pub fn row_to_col(row: usize, col: usize) -> Self {
        Edge::new(row, col, Orientation::RowToCol)
    }

    pub fn col_to_row(row: usize, col: usize) -> Self {
        Edge::new(row, col, Orientation::ColToRow)
    }

    pub fn key(&self) -> EdgeKey {
        EdgeKey::new(self.row, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {0} refers to a vertex outside the graph")]
    OutOfRange(EdgeKey),
    #[error("more than one edge between R{} and C{}", .0.row, .0.col)]
    DuplicateEdge(EdgeKey),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
}

/// A bipartite mixed graph `(A, B, E)`; immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixedGraph {
    rows: usize,
    cols: usize,
    edges: BTreeMap<EdgeKey, Orientation>,
}

impl MixedGraph {
    /// An edgeless graph with the given side sizes.
    pub fn new(rows: usize, cols: usize) -> Self {
        MixedGraph { rows, cols, edges: BTreeMap::new() }
    }

    pub fn from_edges(
        rows: usize,
        cols: usize,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut g = MixedGraph::new(rows, cols);
        for e in edges {
            g.insert(e)?;
        }
        Ok(g)
    }

    /// The complete bipartite graph whose orientations come from `orient`.
    pub fn complete(rows: usize, cols: usize, orient: impl Fn(usize, usize) -> Orientation) -> Self {
        let mut edges = BTreeMap::new();
        for r in 0..rows {
            for c in 0..cols {
                edges.insert(EdgeKey::new(r, c), orient(r, c));
            }
        }
        MixedGraph { rows, cols, edges }
    }

    fn insert(&mut self, e: Edge) -> Result<(), GraphError> {
        let key = e.key();
        if e.row >= self.rows || e.col >= self.cols {
            return Err(GraphError::OutOfRange(key));
        }
        if self.edges.insert(key, e.orientation).is_some() {
            return Err(GraphError::DuplicateEdge(key));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn vertex_count(&self) -> usize {
        self.rows + self.cols
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges in canonical `(row, col)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|(k, &o)| Edge::new(k.row, k.col, o))
    }

    pub fn edge_keys(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.edges.keys().copied()
    }

    pub fn orientation(&self, key: EdgeKey) -> Option<Orientation> {
        self.edges.get(&key).copied()
    }

    pub fn contains(&self, key: EdgeKey) -> bool {
        self.edges.contains_key(&key)
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        match v.side {
            Side::Row => v.index < self.rows,
            Side::Col => v.index < self.cols,
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        let (rows, cols) = (self.rows, self.cols);
        (0..rows).map(Vertex::row).chain((0..cols).map(Vertex::col))
    }

    pub fn dense(&self, v: Vertex) -> usize {
        match v.side {
            Side::Row => v.index,
            Side::Col => self.rows + v.index,
        }
    }

    pub fn vertex_at(&self, id: usize) -> Vertex {
        if id < self.rows {
            Vertex::row(id)
        } else {
            Vertex::col(id - self.rows)
        }
    }

    /// Edges incident to `v`, in canonical order.
    pub fn incident(&self, v: Vertex) -> Vec<Edge> {
        self.edges().filter(|e| e.key().touches(v)).collect()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.keys().filter(|k| k.touches(v)).count()
    }

    /// Direction-blind neighbours of `v`.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        self.edges
            .keys()
            .filter(|k| k.touches(v))
            .map(|k| k.endpoint(v.side.other()))
            .collect()
    }

    /// A new graph with `extra` added; fails on a pair that already has an edge.
    pub fn with_edges(&self, extra: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        let mut g = self.clone();
        for e in extra {
            g.insert(e)?;
        }
        Ok(g)
    }

    pub fn without_edge(&self, key: EdgeKey) -> Self {
        let mut g = self.clone();
        g.edges.remove(&key);
        g
    }

    /// Every row/column pair carries exactly one edge.
    pub fn is_complete_bipartite(&self) -> bool {
        self.edges.len() == self.rows * self.cols
    }

    pub fn is_undirected(&self) -> bool {
        self.edges.values().all(|o| !o.is_directed())
    }

    /// True when `self` and `other` share vertex sets and every edge of
    /// `self` appears in `other` with the same orientation.
    pub fn is_subgraph_of(&self, other: &MixedGraph) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.edges.iter().all(|(k, o)| other.edges.get(k) == Some(o))
    }

    /// Edges of `self` missing from `sub`, in canonical order.
    pub fn difference(&self, sub: &MixedGraph) -> Vec<Edge> {
        self.edges().filter(|e| !sub.contains(e.key())).collect()
    }

    /// The subgraph induced by `vertices`, re-indexed densely per side in the
    /// order given. Returns the graph and the original vertex of each new row
    /// and column.
    pub fn induced(&self, vertices: &[Vertex]) -> (MixedGraph, Vec<Vertex>, Vec<Vertex>) {
        let mut rows: Vec<Vertex> = vertices.iter().copied().filter(|v| v.side == Side::Row).collect();
        let mut cols: Vec<Vertex> = vertices.iter().copied().filter(|v| v.side == Side::Col).collect();
        rows.sort();
        rows.dedup();
        cols.sort();
        cols.dedup();
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, v)| (v.index, i)).collect();
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, v)| (v.index, i)).collect();
        let mut g = MixedGraph::new(rows.len(), cols.len());
        for e in self.edges() {
            if let (Some(&r), Some(&c)) = (row_pos.get(&e.row), col_pos.get(&e.col)) {
                g.edges.insert(EdgeKey::new(r, c), e.orientation);
            }
        }
        (g, rows, cols)
    }

    /// Direction-blind adjacency on dense ids; each entry is `(neighbour, edge)`.
    pub(crate) fn blind_adjacency(&self) -> Vec<Vec<(usize, EdgeKey)>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for k in self.edges.keys() {
            let (r, c) = (k.row, self.rows + k.col);
            adj[r].push((c, *k));
            adj[c].push((r, *k));
        }
        adj
    }

    /// Traversable arcs on dense ids; undirected edges contribute both arcs.
    pub(crate) fn arc_adjacency(&self) -> Vec<Vec<(usize, EdgeKey)>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (k, o) in &self.edges {
            let (r, c) = (k.row, self.rows + k.col);
            match o {
                Orientation::Undirected => {
                    adj[r].push((c, *k));
                    adj[c].push((r, *k));
                }
                Orientation::RowToCol => adj[r].push((c, *k)),
                Orientation::ColToRow => adj[c].push((r, *k)),
            }
        }
        adj
    }
}
