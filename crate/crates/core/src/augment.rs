//! Choosing extra published cells to suppress so that a protection level
//! holds.
//!
//! Suppressing a published cell adds its edge from the total graph, with the
//! orientation the total graph already gives it. The exact search deepens
//! on the number of added edges and only branches on edges that some failure
//! forces: a sink strong component needs a new edge leaving it, one side of
//! a bridge needs a new edge leaving that side, a vertex cut's piece needs a
//! new edge around the cut, a missing pair needs exactly that pair. Every
//! solution extending the current set contains one of the branch edges, so
//! no solution is skipped.

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::graph::{
    connected_components, direction_blind_bridges, strong_components, Edge, EdgeKey, MixedGraph, Orientation,
    Side, Vertex,
};
use crate::security::{all_cells_protected, all_k_sets_protected, is_table_protected, ComponentFailure};
use crate::table::Labels;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    /// Every suppressed cell protected.
    Cells,
    /// Every set of at most `k` rows or `k` columns protected.
    Sets(usize),
    /// The whole table protected.
    Table,
}

impl Target {
    pub fn holds(&self, g: &MixedGraph) -> bool {
        match *self {
            Target::Cells => all_cells_protected(g),
            Target::Sets(k) => all_k_sets_protected(g, k).holds,
            Target::Table => is_table_protected(g).holds,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Target::Cells => "cells".into(),
            Target::Sets(k) => format!("sets(k={k})"),
            Target::Table => "table".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Most candidate edges (published cells) the exact search accepts.
    pub max_candidates: usize,
    /// Most search nodes before giving up.
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_candidates: 24, max_nodes: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AugmentError {
    #[error("the total graph is not complete bipartite")]
    TotalNotComplete,
    #[error("the suppressed graph is not a subgraph of the total graph")]
    NotSubgraph,
    #[error("{candidates} published cells exceed the exact search limit of {limit}")]
    TooManyCandidates { candidates: usize, limit: usize },
    #[error("exact search gave up after {0} nodes")]
    NodeLimit(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuppressionPlan {
    pub target: Target,
    /// Edges to add, sorted by cell.
    pub added_edges: Vec<Edge>,
    /// No smaller set of added edges reaches the target.
    pub optimal: bool,
}

impl SuppressionPlan {
    pub fn cost(&self) -> usize {
        self.added_edges.len()
    }

    pub fn cells(&self) -> Vec<EdgeKey> {
        self.added_edges.iter().map(Edge::key).collect()
    }

    pub fn apply(&self, h: &MixedGraph) -> MixedGraph {
        h.with_edges(self.added_edges.iter().copied()).expect("plan edges are absent from the suppressed graph")
    }

    pub fn to_json(&self, labels: &Labels) -> Value {
        json!({
            "target": self.target.name(),
            "cost": self.cost(),
            "optimal": self.optimal,
            "cells": self.cells().iter().map(|&k| {
                let (r, c) = labels.cell(k);
                json!([r, c])
            }).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanOutcome {
    Found(SuppressionPlan),
    /// No set of published cells reaches the target.
    Infeasible,
}

impl PlanOutcome {
    pub fn plan(&self) -> Option<&SuppressionPlan> {
        match self {
            PlanOutcome::Found(p) => Some(p),
            PlanOutcome::Infeasible => None,
        }
    }
}

/// Published cells of `total`, as edges, sorted by cell.
pub fn candidates(total: &MixedGraph, h: &MixedGraph) -> Result<Vec<Edge>, AugmentError> {
    if !total.is_complete_bipartite() {
        return Err(AugmentError::TotalNotComplete);
    }
    if !h.is_subgraph_of(total) {
        return Err(AugmentError::NotSubgraph);
    }
    Ok(total.difference(h))
}

/// Edges every solution containing the current graph must add one of.
/// `None` when the target already holds.
fn forced_choices(g: &MixedGraph, target: Target, free: &[Edge]) -> Option<Vec<usize>> {
    if target.holds(g) {
        return None;
    }
    let connected = connected_components(g);
    let strong = strong_components(g);
    let mut certificates: Vec<Vec<usize>> = Vec::new();
    let leaving = |inside: &BTreeSet<Vertex>, avoid: &BTreeSet<Vertex>, dir: Option<bool>| -> Vec<usize> {
        (0..free.len())
            .filter(|&i| {
                let e = free[i];
                let (r, c) = (Vertex::row(e.row), Vertex::col(e.col));
                let (in_r, in_c) = (inside.contains(&r), inside.contains(&c));
                if in_r == in_c {
                    return false;
                }
                let other = if in_r { c } else { r };
                if avoid.contains(&other) {
                    return false;
                }
                // dir: Some(true) needs traversal out of `inside`, Some(false) into it.
                match (dir, e.orientation) {
                    (None, _) | (_, Orientation::Undirected) => true,
                    (Some(out), Orientation::RowToCol) => in_r == out,
                    (Some(out), Orientation::ColToRow) => in_c == out,
                }
            })
            .collect()
    };
    let none = BTreeSet::new();

    for component in connected.nonsingleton() {
        let blocks: Vec<&Vec<Vertex>> =
            strong.blocks.iter().filter(|b| component.binary_search(&b[0]).is_ok()).collect();
        if blocks.len() > 1 {
            // Sinks need an edge out, sources an edge in.
            for b in blocks {
                let set: BTreeSet<Vertex> = b.iter().copied().collect();
                let (out, inn) = exits(g, &set);
                if !out {
                    certificates.push(leaving(&set, &none, Some(true)));
                }
                if !inn {
                    certificates.push(leaving(&set, &none, Some(false)));
                }
            }
        }
    }
    if certificates.is_empty() {
        match target {
            Target::Cells => {
                for e in direction_blind_bridges(g) {
                    let cut = g.without_edge(e);
                    let side: BTreeSet<Vertex> = reach(&cut, Vertex::row(e.row));
                    certificates.push(leaving(&side, &none, None));
                }
            }
            Target::Sets(k) => {
                for f in all_k_sets_protected(g, k).failures {
                    match f {
                        ComponentFailure::SizeDeficiency { component, .. } => {
                            certificates.push(leaving(&component.into_iter().collect(), &none, None))
                        }
                        ComponentFailure::SideCut(w) => {
                            let avoid: BTreeSet<Vertex> = w.vertices.iter().copied().collect();
                            certificates.push(leaving(&w.isolated.into_iter().collect(), &avoid, None));
                        }
                        ComponentFailure::NotStronglyConnected { .. } | ComponentFailure::Incomplete { .. } => {}
                    }
                }
            }
            Target::Table => {
                for f in is_table_protected(g).failures {
                    match f {
                        ComponentFailure::SizeDeficiency { component, .. } => {
                            certificates.push(leaving(&component.into_iter().collect(), &none, None))
                        }
                        ComponentFailure::Incomplete { missing, .. } => {
                            for k in missing {
                                certificates.push((0..free.len()).filter(|&i| free[i].key() == k).collect());
                            }
                        }
                        ComponentFailure::NotStronglyConnected { .. } | ComponentFailure::SideCut(_) => {}
                    }
                }
            }
        }
    }
    // Any solution adds at least one edge, so all free edges is always sound.
    Some(certificates.into_iter().min_by_key(|c| c.len()).unwrap_or_else(|| (0..free.len()).collect()))
}

/// Whether some edge leaves `set` in the direction of travel, and whether
/// some edge enters it.
fn exits(g: &MixedGraph, set: &BTreeSet<Vertex>) -> (bool, bool) {
    let (mut out, mut inn) = (false, false);
    for &v in set {
        for e in g.incident(v) {
            if set.contains(&e.key().endpoint(v.side.other())) {
                continue;
            }
            match e.orientation {
                Orientation::Undirected => return (true, true),
                Orientation::RowToCol => {
                    if v.side == Side::Row { out = true } else { inn = true }
                }
                Orientation::ColToRow => {
                    if v.side == Side::Col { out = true } else { inn = true }
                }
            }
        }
    }
    (out, inn)
}

fn reach(g: &MixedGraph, from: Vertex) -> BTreeSet<Vertex> {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for w in g.neighbors(v) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

struct Search<'a> {
    h: &'a MixedGraph,
    target: Target,
    free: &'a [Edge],
    limits: SearchLimits,
    nodes: u64,
    seen: HashMap<u64, usize>,
    budget_hit: bool,
    collect_all: bool,
    found: Vec<u64>,
}

impl Search<'_> {
    fn graph(&self, mask: u64) -> MixedGraph {
        self.h
            .with_edges((0..self.free.len()).filter(|i| mask >> i & 1 == 1).map(|i| self.free[i]))
            .expect("candidates are absent from the suppressed graph")
    }

    /// Depth-first search for solutions with at most `budget` more edges.
    fn run(&mut self, mask: u64, budget: usize) -> Result<(), AugmentError> {
        if self.seen.get(&mask).is_some_and(|&b| b >= budget) {
            return Ok(());
        }
        self.seen.insert(mask, budget);
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            return Err(AugmentError::NodeLimit(self.limits.max_nodes));
        }
        let g = self.graph(mask);
        let Some(choices) = forced_choices(&g, self.target, self.free) else {
            self.found.push(mask);
            return Ok(());
        };
        let choices: Vec<usize> = choices.into_iter().filter(|i| mask >> i & 1 == 0).collect();
        if budget == 0 {
            if !choices.is_empty() {
                self.budget_hit = true;
            }
            return Ok(());
        }
        for i in choices {
            self.run(mask | 1 << i, budget - 1)?;
            if !self.collect_all && !self.found.is_empty() {
                return Ok(());
            }
        }
        Ok(())
    }
}

fn sorted_edges(free: &[Edge], mask: u64) -> Vec<Edge> {
    (0..free.len()).filter(|i| mask >> i & 1 == 1).map(|i| free[i]).collect()
}

/// Iterative deepening up to `max_cost` added edges. Stops early, with no
/// plan, once a round finishes without running out of budget anywhere.
fn deepen(
    total: &MixedGraph,
    h: &MixedGraph,
    target: Target,
    max_cost: Option<usize>,
    collect_all: bool,
    limits: &SearchLimits,
) -> Result<Option<Vec<Edge>>, AugmentError> {
    let free = candidates(total, h)?;
    if free.len() > limits.max_candidates.min(64) {
        return Err(AugmentError::TooManyCandidates { candidates: free.len(), limit: limits.max_candidates.min(64) });
    }
    let mut search = Search {
        h,
        target,
        free: &free,
        limits: *limits,
        nodes: 0,
        seen: HashMap::new(),
        budget_hit: false,
        collect_all,
        found: Vec::new(),
    };
    let cap = max_cost.unwrap_or(free.len()).min(free.len());
    for depth in 0..=cap {
        search.seen.clear();
        search.budget_hit = false;
        search.run(0, depth)?;
        if !search.found.is_empty() {
            let best = search
                .found
                .iter()
                .map(|&m| sorted_edges(&free, m))
                .min_by(|a, b| (a.len(), a.iter().map(Edge::key).collect::<Vec<_>>()).cmp(&(b.len(), b.iter().map(Edge::key).collect())))
                .unwrap();
            return Ok(Some(best));
        }
        if !search.budget_hit {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Whether at most `p` published cells can be suppressed to reach the
/// target, with a smallest such plan as witness.
pub fn decide(
    total: &MixedGraph,
    h: &MixedGraph,
    target: Target,
    p: usize,
    limits: &SearchLimits,
) -> Result<Option<SuppressionPlan>, AugmentError> {
    let plan = deepen(total, h, target, Some(p), false, limits)?;
    Ok(plan.map(|added_edges| SuppressionPlan { target, added_edges, optimal: true }))
}

/// A cheapest plan; among the cheapest, the one whose sorted cell list is
/// lexicographically smallest.
pub fn exact_plan(
    total: &MixedGraph,
    h: &MixedGraph,
    target: Target,
    limits: &SearchLimits,
) -> Result<PlanOutcome, AugmentError> {
    let plan = deepen(total, h, target, None, true, limits)?;
    Ok(match plan {
        Some(added_edges) => PlanOutcome::Found(SuppressionPlan { target, added_edges, optimal: true }),
        None => PlanOutcome::Infeasible,
    })
}

/// Sum over nonsingleton components of the edge endpoints the target
/// certainly still needs, halved, or the number of missing pairs for the
/// table target.
pub fn lower_bound(g: &MixedGraph, target: Target) -> usize {
    let connected = connected_components(g);
    let strong = strong_components(g);
    let mut endpoints = 0;
    for component in connected.nonsingleton() {
        let blocks: Vec<&Vec<Vertex>> =
            strong.blocks.iter().filter(|b| component.binary_search(&b[0]).is_ok()).collect();
        if blocks.len() > 1 {
            let (mut sources, mut sinks) = (0, 0);
            for b in &blocks {
                let (out, inn) = exits(g, &b.iter().copied().collect());
                sinks += usize::from(!out);
                sources += usize::from(!inn);
            }
            endpoints += sources.max(sinks);
        } else if target == Target::Cells {
            endpoints += bridge_tree_leaves(g, component);
        }
    }
    let mut bound = endpoints.div_ceil(2);
    if target == Target::Table {
        let missing: usize = is_table_protected(g)
            .failures
            .iter()
            .map(|f| match f {
                ComponentFailure::Incomplete { missing, .. } => missing.len(),
                _ => 0,
            })
            .sum();
        bound = bound.max(missing);
    }
    bound
}

fn bridge_tree_leaves(g: &MixedGraph, component: &[Vertex]) -> usize {
    let inside: BTreeSet<Vertex> = component.iter().copied().collect();
    let bridges: Vec<EdgeKey> = direction_blind_bridges(g)
        .into_iter()
        .filter(|k| inside.contains(&Vertex::row(k.row)))
        .collect();
    if bridges.is_empty() {
        return 0;
    }
    let mut stripped = g.clone();
    for &k in &bridges {
        stripped = stripped.without_edge(k);
    }
    let pieces = connected_components(&stripped);
    let mut degree: HashMap<usize, usize> = HashMap::new();
    for k in bridges {
        for v in [Vertex::row(k.row), Vertex::col(k.col)] {
            *degree.entry(pieces.block_of(v).unwrap()).or_default() += 1;
        }
    }
    degree.values().filter(|&&d| d == 1).count()
}

/// A plan built by repeatedly adding the forced edge that leaves the fewest
/// failures, falling back to the exact search if that stalls.
pub fn greedy_plan(
    total: &MixedGraph,
    h: &MixedGraph,
    target: Target,
    limits: &SearchLimits,
) -> Result<PlanOutcome, AugmentError> {
    let free = candidates(total, h)?;
    let bound = lower_bound(h, target);
    let mut g = h.clone();
    let mut added: Vec<Edge> = Vec::new();
    let mut used = vec![false; free.len()];
    loop {
        let Some(choices) = forced_choices(&g, target, &free) else {
            added.sort_by_key(Edge::key);
            let optimal = added.len() == bound;
            return Ok(PlanOutcome::Found(SuppressionPlan { target, added_edges: added, optimal }));
        };
        let best = choices
            .into_iter()
            .filter(|&i| !used[i])
            .map(|i| {
                let next = g.with_edges([free[i]]).unwrap();
                let score = (usize::from(!target.holds(&next)), failure_count(&next, target), free[i].key());
                (score, i, next)
            })
            .min_by(|a, b| a.0.cmp(&b.0));
        match best {
            Some((_, i, next)) => {
                used[i] = true;
                added.push(free[i]);
                g = next;
            }
            None => return exact_plan(total, h, target, limits),
        }
    }
}

fn failure_count(g: &MixedGraph, target: Target) -> usize {
    let base = lower_bound(g, target);
    base + match target {
        Target::Cells => crate::security::unprotected_cells(g).len(),
        Target::Sets(k) => all_k_sets_protected(g, k).failures.len(),
        Target::Table => is_table_protected(g).failures.len(),
    }
}
