//! Hitting Set instances turned into suppression planning instances.
//!
//! Rows are `a0, a1..aα` (`a_i` stands for element `s_i`), columns are
//! `b0, b1..bβ` (`b_j` stands for set `S_j`). The total graph orients
//! `b0→a0`, `a0→b_j`, `a_i→b0`, and `b_j→a_i` exactly when `s_i ∈ S_j`
//! (otherwise `a_i→b_j`). The suppressed graph is the star `b0→a0→b_j`.
//! Every `b_j` is a sink, so protecting anything forces an edge `b_j→a_i`
//! with `s_i ∈ S_j`, which is where the hitting set comes from.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::augment::Target;
use crate::graph::{Edge, EdgeKey, MixedGraph, Orientation};
use crate::table::{table_from_graphs_with_labels, Labels, Table, TableError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Budget `h + β`; used for the cell target and for sets with `k = 1`.
    CellOrSets,
    /// Budget `(β + 1)·h`; used for the table target.
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("invalid gadget spec: {0}")]
    Spec(String),
    #[error("the family of sets is empty")]
    EmptyFamily,
    #[error("set {set} names unknown element {element:?}")]
    UnknownElement { set: usize, element: String },
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("{0:?} is not an element")]
    NotAnElement(String),
    #[error("chosen elements miss set {0}")]
    NotHitting(usize),
    #[error("{size} chosen elements exceed the budget {budget}")]
    TooLarge { size: usize, budget: usize },
    #[error("cell {0} is not a published cell of the gadget")]
    NotCandidate(EdgeKey),
    #[error("{size} added cells exceed the budget {p}")]
    OverBudget { size: usize, p: usize },
    #[error("the added cells do not reach the gadget's target")]
    TargetNotMet,
    #[error("internal error: {0}")]
    Internal(String),
}

/// Universe `S`, nonempty family `W` of subsets (as element indices), and
/// the size budget `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HittingSetInstance {
    pub universe: Vec<String>,
    pub family: Vec<BTreeSet<usize>>,
    pub budget: usize,
}

impl HittingSetInstance {
    pub fn new(universe: Vec<String>, family: Vec<Vec<String>>, budget: usize) -> Result<Self, GadgetError> {
        let mut seen = BTreeSet::new();
        for s in &universe {
            if !seen.insert(s) {
                return Err(GadgetError::DuplicateElement(s.clone()));
            }
        }
        if family.is_empty() {
            return Err(GadgetError::EmptyFamily);
        }
        let family = family
            .into_iter()
            .enumerate()
            .map(|(j, set)| {
                set.into_iter()
                    .map(|e| {
                        universe
                            .iter()
                            .position(|s| *s == e)
                            .ok_or(GadgetError::UnknownElement { set: j + 1, element: e })
                    })
                    .collect()
            })
            .collect::<Result<Vec<BTreeSet<usize>>, _>>()?;
        Ok(HittingSetInstance { universe, family, budget })
    }

    /// Elements named `s1..sn`, sets given by zero-based element indices.
    pub fn from_indices(n: usize, family: &[&[usize]], budget: usize) -> Result<Self, GadgetError> {
        let universe: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
        let family = family.iter().map(|set| set.iter().map(|&i| format!("s{}", i + 1)).collect()).collect();
        HittingSetInstance::new(universe, family, budget)
    }

    pub fn is_hitting_set(&self, chosen: &BTreeSet<usize>) -> Result<(), GadgetError> {
        for (j, set) in self.family.iter().enumerate() {
            if set.is_disjoint(chosen) {
                return Err(GadgetError::NotHitting(j + 1));
            }
        }
        if chosen.len() > self.budget {
            return Err(GadgetError::TooLarge { size: chosen.len(), budget: self.budget });
        }
        Ok(())
    }

    pub fn names(&self, chosen: &BTreeSet<usize>) -> Vec<String> {
        chosen.iter().map(|&i| self.universe[i].clone()).collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(rename = "S")]
    universe: Vec<String>,
    #[serde(rename = "W")]
    family: Vec<Vec<String>>,
    h: usize,
    #[serde(default)]
    variant: Option<Variant>,
}

/// Reads `{"S": [...], "W": [[...], ...], "h": n, "variant": "..."}`; the
/// variant is optional.
pub fn parse_gadget_spec(text: &str) -> Result<(HittingSetInstance, Option<Variant>), GadgetError> {
    let spec: SpecFile = serde_json::from_str(text).map_err(|e| GadgetError::Spec(e.to_string()))?;
    Ok((HittingSetInstance::new(spec.universe, spec.family, spec.h)?, spec.variant))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetInstance {
    pub instance: HittingSetInstance,
    pub variant: Variant,
    pub total: MixedGraph,
    pub suppressed: MixedGraph,
    pub p: usize,
    pub labels: Labels,
}

pub fn build_gadget(hs: &HittingSetInstance, variant: Variant) -> GadgetInstance {
    let (alpha, beta) = (hs.universe.len(), hs.family.len());
    let total = MixedGraph::complete(alpha + 1, beta + 1, |i, j| match (i, j) {
        (0, 0) => Orientation::ColToRow,
        (0, _) | (_, 0) => Orientation::RowToCol,
        _ if hs.family[j - 1].contains(&(i - 1)) => Orientation::ColToRow,
        _ => Orientation::RowToCol,
    });
    let suppressed = MixedGraph::from_edges(
        alpha + 1,
        beta + 1,
        std::iter::once(Edge::col_to_row(0, 0)).chain((1..=beta).map(|j| Edge::row_to_col(0, j))),
    )
    .expect("star edges are distinct");
    let p = match variant {
        Variant::CellOrSets => hs.budget + beta,
        Variant::Table => (beta + 1) * hs.budget,
    };
    let labels = Labels {
        rows: (0..=alpha).map(|i| format!("a{i}")).collect(),
        cols: (0..=beta).map(|j| format!("b{j}")).collect(),
    };
    GadgetInstance { instance: hs.clone(), variant, total, suppressed, p, labels }
}

impl GadgetInstance {
    /// Targets whose planning problem this gadget encodes.
    pub fn targets(&self) -> Vec<Target> {
        match self.variant {
            Variant::CellOrSets => vec![Target::Cells, Target::Sets(1)],
            Variant::Table => vec![Target::Table],
        }
    }

    /// The gadget as a table whose graphs are exactly the gadget's.
    pub fn to_table(&self) -> Result<Table, TableError> {
        table_from_graphs_with_labels(&self.total, &self.suppressed, self.labels.clone())
    }
}

fn edge(total: &MixedGraph, row: usize, col: usize) -> Edge {
    let key = EdgeKey::new(row, col);
    Edge::new(row, col, total.orientation(key).expect("total graph is complete"))
}

/// Published cells to suppress, built from a hitting set of size at most
/// `h`: for each set `S_j` take its smallest chosen element `s_i`. The cell
/// variant adds `b_j→a_i` and `a_i→b0`; the table variant adds every edge
/// between the chosen `a_i` and `b1..bβ`, plus `a_i→b0`.
pub fn witness_from_hitting_set(g: &GadgetInstance, chosen: &BTreeSet<usize>) -> Result<Vec<Edge>, GadgetError> {
    let hs = &g.instance;
    if let Some(&bad) = chosen.iter().find(|&&i| i >= hs.universe.len()) {
        return Err(GadgetError::NotAnElement(format!("#{bad}")));
    }
    hs.is_hitting_set(chosen)?;
    let picks: Vec<usize> =
        hs.family.iter().map(|set| *set.intersection(chosen).next().expect("hitting set meets every set")).collect();
    let used: BTreeSet<usize> = picks.iter().copied().collect();
    let mut edges: BTreeSet<Edge> = used.iter().map(|&i| edge(&g.total, i + 1, 0)).collect();
    match g.variant {
        Variant::CellOrSets => {
            for (j, &i) in picks.iter().enumerate() {
                edges.insert(edge(&g.total, i + 1, j + 1));
            }
        }
        Variant::Table => {
            for &i in &used {
                for j in 1..=hs.family.len() {
                    edges.insert(edge(&g.total, i + 1, j));
                }
            }
        }
    }
    let mut out: Vec<Edge> = edges.into_iter().collect();
    out.sort_by_key(Edge::key);
    Ok(out)
}

/// Reads a hitting set back from cells that reach the gadget's target: for
/// each `b_j`, the smallest `i` with an added edge `b_j→a_i`.
pub fn hitting_set_from_witness(g: &GadgetInstance, added: &[EdgeKey]) -> Result<BTreeSet<usize>, GadgetError> {
    let mut edges = Vec::with_capacity(added.len());
    for &k in added {
        if !g.total.contains(k) || g.suppressed.contains(k) {
            return Err(GadgetError::NotCandidate(k));
        }
        edges.push(edge(&g.total, k.row, k.col));
    }
    if added.len() > g.p {
        return Err(GadgetError::OverBudget { size: added.len(), p: g.p });
    }
    let h = g.suppressed.with_edges(edges.iter().copied()).map_err(|e| GadgetError::Internal(e.to_string()))?;
    if !g.targets().iter().any(|t| t.holds(&h)) {
        return Err(GadgetError::TargetNotMet);
    }
    let mut chosen = BTreeSet::new();
    for j in 1..=g.instance.family.len() {
        let i = edges
            .iter()
            .filter(|e| e.col == j && e.row > 0 && e.orientation == Orientation::ColToRow)
            .map(|e| e.row)
            .min()
            .ok_or_else(|| GadgetError::Internal(format!("b{j} has no outgoing edge")))?;
        chosen.insert(i - 1);
    }
    g.instance.is_hitting_set(&chosen).map_err(|e| GadgetError::Internal(format!("extracted set fails: {e}")))?;
    Ok(chosen)
}
