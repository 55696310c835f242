//! Exact ranges of suppressed cells via network flow.
//!
//! Suppressed cells are arcs from row nodes to column nodes. A feasible
//! assignment is a flow meeting every row residual and column residual; the
//! largest value of a cell is its current value plus the most flow that can
//! be pushed back from its column to its row around the residual network.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};

use crate::graph::{EdgeKey, Vertex};
use crate::rational::{Extended, Rational};
use crate::table::Table;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error("cell {0} is not suppressed")]
    NotSuppressed(EdgeKey),
    #[error("no assignment of the suppressed cells meets the bounds and sums")]
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Cap {
    Finite(Rational),
    Inf,
}

impl Cap {
    fn positive(&self) -> bool {
        match self {
            Cap::Finite(q) => q.is_positive(),
            Cap::Inf => true,
        }
    }

    fn sub(&mut self, q: &Rational) {
        if let Cap::Finite(c) = self {
            *c -= q;
        }
    }

    fn add(&mut self, q: &Rational) {
        if let Cap::Finite(c) = self {
            *c += q;
        }
    }
}

struct Network {
    head: Vec<usize>,
    cap: Vec<Cap>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network { head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] }
    }

    fn arc(&mut self, from: usize, to: usize, cap: Cap) -> usize {
        let id = self.head.len();
        self.adj[from].push(id);
        self.head.push(to);
        self.cap.push(cap);
        self.adj[to].push(id + 1);
        self.head.push(from);
        self.cap.push(Cap::Finite(Rational::zero()));
        id
    }

    /// Maximum `s`-`t` flow, or `None` when it is unbounded.
    fn max_flow(&mut self, s: usize, t: usize, skip: &[usize]) -> Option<Rational> {
        let usable = |net: &Network, a: usize| !skip.contains(&(a & !1)) && net.cap[a].positive();
        // Unbounded iff a path of infinite arcs exists.
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let w = self.head[a];
                if !seen[w] && !skip.contains(&(a & !1)) && self.cap[a] == Cap::Inf {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen[t] {
            return None;
        }
        let mut total = Rational::zero();
        loop {
            let mut parent = vec![usize::MAX; self.adj.len()];
            let mut visited = vec![false; self.adj.len()];
            visited[s] = true;
            let mut queue = VecDeque::from([s]);
            'bfs: while let Some(u) = queue.pop_front() {
                for &a in &self.adj[u] {
                    let w = self.head[a];
                    if !visited[w] && usable(self, a) {
                        visited[w] = true;
                        parent[w] = a;
                        if w == t {
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if !visited[t] {
                return Some(total);
            }
            let mut path = Vec::new();
            let mut w = t;
            while w != s {
                let a = parent[w];
                path.push(a);
                w = self.head[a ^ 1];
            }
            let delta = path
                .iter()
                .filter_map(|&a| match &self.cap[a] {
                    Cap::Finite(q) => Some(q.clone()),
                    Cap::Inf => None,
                })
                .min()
                .expect("an all-infinite path was ruled out");
            for a in path {
                self.cap[a].sub(&delta);
                self.cap[a ^ 1].add(&delta);
            }
            total += delta;
        }
    }
}

/// One feasible assignment of the suppressed cells, in row-major order.
pub fn feasible_point(t: &Table) -> Result<Vec<(EdgeKey, Rational)>, FlowError> {
    let cells = t.suppressed_cells();
    let (rows, cols) = (t.rows(), t.cols());
    let row_res: Vec<Rational> = (0..rows).map(|i| t.residual(Vertex::row(i))).collect();
    let col_res: Vec<Rational> = (0..cols).map(|j| t.residual(Vertex::col(j))).collect();

    // Infinite bounds are replaced by a surrogate large enough that some
    // feasible assignment survives whenever one exists.
    let mut m = Rational::from_integer(1.into());
    for q in row_res.iter().chain(&col_res) {
        m += q.abs();
    }
    for &k in &cells {
        let b = &t.cell(k).bounds;
        for q in b.lower().into_iter().chain(b.upper()) {
            m += q.abs();
        }
    }
    let lower = |k: EdgeKey| t.cell(k).bounds.lower().cloned().unwrap_or_else(|| -m.clone());
    let upper = |k: EdgeKey| t.cell(k).bounds.upper().cloned().unwrap_or_else(|| m.clone());

    let (src, sink) = (rows + cols, rows + cols + 1);
    let mut net = Network::new(rows + cols + 2);
    let mut supply = row_res.clone();
    let mut demand = col_res.clone();
    let mut arcs = Vec::with_capacity(cells.len());
    for &k in &cells {
        let l = lower(k);
        supply[k.row] -= &l;
        demand[k.col] -= &l;
        arcs.push(net.arc(k.row, rows + k.col, Cap::Finite(upper(k) - &l)));
    }
    if supply.iter().chain(&demand).any(|q| q.is_negative()) {
        return Err(FlowError::Infeasible);
    }
    let need: Rational = supply.iter().cloned().sum();
    if need != demand.iter().cloned().sum::<Rational>() {
        return Err(FlowError::Infeasible);
    }
    for (i, s) in supply.iter().enumerate() {
        net.arc(src, i, Cap::Finite(s.clone()));
    }
    for (j, d) in demand.iter().enumerate() {
        net.arc(rows + j, sink, Cap::Finite(d.clone()));
    }
    let flow = net.max_flow(src, sink, &[]).expect("all capacities are finite");
    if flow != need {
        return Err(FlowError::Infeasible);
    }
    Ok(cells
        .iter()
        .zip(arcs)
        .map(|(&k, a)| {
            let Cap::Finite(back) = &net.cap[a + 1] else { unreachable!() };
            (k, lower(k) + back)
        })
        .collect())
}

/// Exact minimum and maximum of every suppressed cell over all real
/// assignments meeting the bounds and sums, in row-major order.
pub fn cell_ranges(t: &Table) -> Result<Vec<(EdgeKey, Extended, Extended)>, FlowError> {
    let point = feasible_point(t)?;
    let rows = t.rows();
    let mut base = Network::new(rows + t.cols());
    let mut arcs = Vec::with_capacity(point.len());
    for (k, x) in &point {
        let b = &t.cell(*k).bounds;
        let up = b.upper().map_or(Cap::Inf, |u| Cap::Finite(u - x));
        let down = b.lower().map_or(Cap::Inf, |l| Cap::Finite(x - l));
        let a = base.arc(k.row, rows + k.col, up);
        base.cap[a + 1] = down;
        arcs.push(a);
    }
    let mut out = Vec::with_capacity(point.len());
    for (i, (k, x)) in point.iter().enumerate() {
        let b = &t.cell(*k).bounds;
        let (r, c) = (k.row, rows + k.col);
        let skip = [arcs[i]];

        let mut net = Network { head: base.head.clone(), cap: base.cap.clone(), adj: base.adj.clone() };
        let max = match (net.max_flow(c, r, &skip), b.upper()) {
            (None, None) => Extended::PosInf,
            (None, Some(u)) => Extended::Finite(u.clone()),
            (Some(f), None) => Extended::Finite(x + f),
            (Some(f), Some(u)) => Extended::Finite((x + f).min(u.clone())),
        };
        let mut net = Network { head: base.head.clone(), cap: base.cap.clone(), adj: base.adj.clone() };
        let min = match (net.max_flow(r, c, &skip), b.lower()) {
            (None, None) => Extended::NegInf,
            (None, Some(l)) => Extended::Finite(l.clone()),
            (Some(f), None) => Extended::Finite(x - f),
            (Some(f), Some(l)) => Extended::Finite((x - f).max(l.clone())),
        };
        out.push((*k, min, max));
    }
    Ok(out)
}

/// Exact range of one suppressed cell.
pub fn cell_range(t: &Table, cell: EdgeKey) -> Result<(Extended, Extended), FlowError> {
    if cell.row >= t.rows() || cell.col >= t.cols() || !t.cell(cell).suppressed {
        return Err(FlowError::NotSuppressed(cell));
    }
    let ranges = cell_ranges(t)?;
    let (_, lo, hi) = ranges.into_iter().find(|(k, _, _)| *k == cell).expect("cell is suppressed");
    Ok((lo, hi))
}
