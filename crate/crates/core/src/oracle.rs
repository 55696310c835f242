//! Ground truth by enumeration, independent of the graph characterizations.
//!
//! For an integer table with finite bounds, [`Oracle::new`] lists every
//! integer assignment of the suppressed cells that meets the bounds and the
//! sums. A coefficient vector is a linear invariant exactly when it is
//! orthogonal to every difference of two assignments: the constraint matrix
//! is a network matrix, so integer points span the same affine hull as the
//! real feasible region when the bounds are integers.
//!
//! Everything else (invariant space, minimal invariants, protection of row
//! and column sets, protection of the table) is computed from that span by
//! exact linear algebra and bounded enumeration of small coefficient vectors.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::graph::{EdgeKey, Side, Vertex};
use crate::linalg::{dot, null_space, rank, IntEchelon, PivotSystem};
use crate::rational::{int, to_i64, Rational};
use crate::table::{Arithmetic, Table};

/// Sparse coefficients over suppressed cells.
pub type Coeffs = BTreeMap<EdgeKey, Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Backtracking nodes allowed while enumerating assignments.
    pub enum_budget: u64,
    /// Candidate coefficient vectors allowed in one class enumeration.
    pub candidates: u64,
    /// Suppressed cells allowed when listing all minimal invariants.
    pub circuit_cells: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { enum_budget: 10_000_000, candidates: 2_000_000, circuit_cells: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvariantClass {
    Linear,
    Unitary,
    Sum,
    RectangularSum,
}

impl InvariantClass {
    pub const ALL: [InvariantClass; 4] =
        [InvariantClass::Linear, InvariantClass::Unitary, InvariantClass::Sum, InvariantClass::RectangularSum];
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration needs a table in integer mode")]
    NotIntegerMode,
    #[error("enumeration needs finite bounds; cell {0} has an infinite bound")]
    InfiniteBounds(EdgeKey),
    #[error("enumeration budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("no assignment of the suppressed cells meets the bounds and sums")]
    Infeasible,
    #[error("cell {0} is not suppressed")]
    NotSuppressed(EdgeKey),
    #[error("{what}: {size} exceeds the limit {limit}")]
    LimitExceeded { what: &'static str, size: u64, limit: u64 },
    #[error("set mixes rows and columns")]
    MixedSet,
    #[error("vertex {0} is not in the table")]
    UnknownVertex(Vertex),
}

/// Values of the suppressed cells in one bounded feasible assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleAssignment {
    pub values: BTreeMap<EdgeKey, Rational>,
}

/// Basis of all linear invariants, plus the coordinates of each nonzero
/// line sum in that basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSpaceBasis {
    pub cells: Vec<EdgeKey>,
    pub basis: Vec<Vec<Rational>>,
    pub gammas: Vec<(Vertex, Vec<Rational>)>,
}

impl InvariantSpaceBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Enumerated assignments of one table and the span of their differences.
pub struct Oracle<'t> {
    table: &'t Table,
    cells: Vec<EdgeKey>,
    index: BTreeMap<EdgeKey, usize>,
    assignments: Vec<Vec<i64>>,
    diffs: Vec<Vec<Rational>>,
    limits: Limits,
}

pub fn enumerate_feasible(t: &Table, limits: &Limits) -> Result<Vec<FeasibleAssignment>, OracleError> {
    let oracle = Oracle::new(t, limits)?;
    Ok(oracle.feasible())
}

pub fn invariant_space(t: &Table, limits: &Limits) -> Result<InvariantSpaceBasis, OracleError> {
    Oracle::new(t, limits)?.invariant_space()
}

pub fn is_invariant(t: &Table, coeffs: &Coeffs, limits: &Limits) -> Result<bool, OracleError> {
    Oracle::new(t, limits)?.is_invariant(coeffs)
}

pub fn verify_minimal(t: &Table, coeffs: &Coeffs, limits: &Limits) -> Result<bool, OracleError> {
    Oracle::new(t, limits)?.verify_minimal(coeffs)
}

pub fn is_set_protected_oracle(
    t: &Table,
    set: &[Vertex],
    class: InvariantClass,
    limits: &Limits,
) -> Result<bool, OracleError> {
    Oracle::new(t, limits)?.set_protected(set, class)
}

pub fn is_table_protected_oracle(t: &Table, limits: &Limits) -> Result<bool, OracleError> {
    Oracle::new(t, limits)?.table_protected()
}

struct Search<'a> {
    lo: &'a [i64],
    hi: &'a [i64],
    rows: &'a [usize],
    cols: &'a [usize],
    order: Vec<usize>,
    row_need: Vec<i64>,
    col_need: Vec<i64>,
    row_lo: Vec<i64>,
    row_hi: Vec<i64>,
    col_lo: Vec<i64>,
    col_hi: Vec<i64>,
    current: Vec<i64>,
    nodes: u64,
    budget: u64,
    found: Vec<Vec<i64>>,
}

impl Search<'_> {
    fn fits(need: i64, lo: i64, hi: i64) -> bool {
        lo <= need && need <= hi
    }

    fn run(&mut self, pos: usize) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExceeded(self.budget));
        }
        if pos == self.order.len() {
            self.found.push(self.current.clone());
            return Ok(());
        }
        let i = self.order[pos];
        let (r, c) = (self.rows[i], self.cols[i]);
        let (lo, hi) = (self.lo[i], self.hi[i]);
        self.row_lo[r] -= lo;
        self.row_hi[r] -= hi;
        self.col_lo[c] -= lo;
        self.col_hi[c] -= hi;
        for v in lo..=hi {
            let (rn, cn) = (self.row_need[r] - v, self.col_need[c] - v);
            if Self::fits(rn, self.row_lo[r], self.row_hi[r]) && Self::fits(cn, self.col_lo[c], self.col_hi[c]) {
                self.row_need[r] = rn;
                self.col_need[c] = cn;
                self.current[i] = v;
                let res = self.run(pos + 1);
                self.row_need[r] += v;
                self.col_need[c] += v;
                res?;
            }
        }
        self.row_lo[r] += lo;
        self.row_hi[r] += hi;
        self.col_lo[c] += lo;
        self.col_hi[c] += hi;
        Ok(())
    }
}

impl<'t> Oracle<'t> {
    /// Enumerates every integer bounded feasible assignment of `t`.
    ///
    /// Cells are tried narrowest bounds first, and a branch is cut as soon
    /// as some row or column can no longer reach its sum.
    pub fn new(t: &'t Table, limits: &Limits) -> Result<Self, OracleError> {
        if t.arithmetic() != Arithmetic::Integer {
            return Err(OracleError::NotIntegerMode);
        }
        let cells = t.suppressed_cells();
        let n = cells.len();
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for &k in &cells {
            let b = &t.cell(k).bounds;
            match (b.lower().and_then(to_i64), b.upper().and_then(to_i64)) {
                (Some(l), Some(u)) => {
                    lo.push(l);
                    hi.push(u);
                }
                _ if b.is_finite() => return Err(OracleError::NotIntegerMode),
                _ => return Err(OracleError::InfiniteBounds(k)),
            }
        }
        let need = |v: Vertex| to_i64(&t.residual(v)).ok_or(OracleError::NotIntegerMode);
        let row_need = (0..t.rows()).map(|i| need(Vertex::row(i))).collect::<Result<Vec<_>, _>>()?;
        let col_need = (0..t.cols()).map(|j| need(Vertex::col(j))).collect::<Result<Vec<_>, _>>()?;
        let rows: Vec<usize> = cells.iter().map(|k| k.row).collect();
        let cols: Vec<usize> = cells.iter().map(|k| k.col).collect();
        let mut row_lo = vec![0; t.rows()];
        let mut row_hi = vec![0; t.rows()];
        let mut col_lo = vec![0; t.cols()];
        let mut col_hi = vec![0; t.cols()];
        for i in 0..n {
            row_lo[rows[i]] += lo[i];
            row_hi[rows[i]] += hi[i];
            col_lo[cols[i]] += lo[i];
            col_hi[cols[i]] += hi[i];
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (hi[i] - lo[i], i));

        let feasible_start = (0..t.rows()).all(|r| Search::fits(row_need[r], row_lo[r], row_hi[r]))
            && (0..t.cols()).all(|c| Search::fits(col_need[c], col_lo[c], col_hi[c]));
        let mut search = Search {
            lo: &lo,
            hi: &hi,
            rows: &rows,
            cols: &cols,
            order,
            row_need,
            col_need,
            row_lo,
            row_hi,
            col_lo,
            col_hi,
            current: vec![0; n],
            nodes: 0,
            budget: limits.enum_budget,
            found: Vec::new(),
        };
        if feasible_start {
            search.run(0)?;
        }
        let mut assignments = search.found;
        if assignments.is_empty() {
            return Err(OracleError::Infeasible);
        }
        assignments.sort();

        // The affine hull can be no larger than the null space of the
        // margin equations; stop collecting differences once it is reached.
        let margin_rows: Vec<Vec<Rational>> = (0..t.rows())
            .map(|r| rows.iter().map(|&x| if x == r { Rational::one() } else { Rational::zero() }).collect())
            .chain((0..t.cols()).map(|c| cols.iter().map(|&x| if x == c { Rational::one() } else { Rational::zero() }).collect()))
            .collect();
        let max_dim = n - rank(&margin_rows, n);
        let mut span = IntEchelon::new(n);
        for a in &assignments[1..] {
            if span.rank() == max_dim {
                break;
            }
            span.insert(a.iter().zip(&assignments[0]).map(|(x, y)| (x - y) as i128).collect());
        }
        let index = cells.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Ok(Oracle { table: t, cells, index, assignments, diffs: span.to_rational(), limits: *limits })
    }

    /// Suppressed cells in row-major order; vectors below use this order.
    pub fn cells(&self) -> &[EdgeKey] {
        &self.cells
    }

    /// Assignments as integer vectors, lexicographically sorted.
    pub fn assignments(&self) -> &[Vec<i64>] {
        &self.assignments
    }

    pub fn feasible(&self) -> Vec<FeasibleAssignment> {
        self.assignments
            .iter()
            .map(|a| FeasibleAssignment { values: self.cells.iter().zip(a).map(|(&k, &v)| (k, int(v))).collect() })
            .collect()
    }

    /// Dimension of the affine hull of the feasible assignments.
    pub fn freedom(&self) -> usize {
        self.diffs.len()
    }

    /// Smallest and largest enumerated value of a suppressed cell.
    pub fn range(&self, cell: EdgeKey) -> Result<(i64, i64), OracleError> {
        let i = *self.index.get(&cell).ok_or(OracleError::NotSuppressed(cell))?;
        let values = self.assignments.iter().map(|a| a[i]);
        Ok((values.clone().min().unwrap(), values.max().unwrap()))
    }

    pub fn is_invariant_cell(&self, cell: EdgeKey) -> Result<bool, OracleError> {
        let (lo, hi) = self.range(cell)?;
        Ok(lo == hi)
    }

    pub fn to_dense(&self, coeffs: &Coeffs) -> Result<Vec<Rational>, OracleError> {
        let mut v = vec![Rational::zero(); self.cells.len()];
        for (k, q) in coeffs {
            if q.is_zero() {
                continue;
            }
            let i = *self.index.get(k).ok_or(OracleError::NotSuppressed(*k))?;
            v[i] = q.clone();
        }
        Ok(v)
    }

    pub fn to_sparse(&self, v: &[Rational]) -> Coeffs {
        self.cells.iter().zip(v).filter(|(_, q)| !q.is_zero()).map(|(&k, q)| (k, q.clone())).collect()
    }

    /// Sum of the suppressed cells of a row or column.
    pub fn gamma(&self, v: Vertex) -> Coeffs {
        self.cells.iter().filter(|k| k.touches(v)).map(|&k| (k, Rational::one())).collect()
    }

    /// Value of an invariant on the published table.
    pub fn value(&self, coeffs: &Coeffs) -> Rational {
        coeffs.iter().map(|(k, q)| q * &self.table.cell(*k).value).sum()
    }

    fn dense_is_invariant(&self, v: &[Rational]) -> bool {
        self.diffs.iter().all(|d| dot(d, v).is_zero())
    }

    pub fn is_invariant(&self, coeffs: &Coeffs) -> Result<bool, OracleError> {
        Ok(self.dense_is_invariant(&self.to_dense(coeffs)?))
    }

    fn columns_rank(&self, support: &[usize]) -> usize {
        let sub: Vec<Vec<Rational>> = self.diffs.iter().map(|d| support.iter().map(|&i| d[i].clone()).collect()).collect();
        rank(&sub, support.len())
    }

    /// A nonzero invariant such that no nonzero invariant lives on a proper
    /// subset of its effective area.
    pub fn verify_minimal(&self, coeffs: &Coeffs) -> Result<bool, OracleError> {
        let v = self.to_dense(coeffs)?;
        let support: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
        if support.is_empty() || !self.dense_is_invariant(&v) {
            return Ok(false);
        }
        Ok(support.iter().all(|&drop| {
            let rest: Vec<usize> = support.iter().copied().filter(|&i| i != drop).collect();
            self.columns_rank(&rest) == rest.len()
        }))
    }

    pub fn invariant_space(&self) -> Result<InvariantSpaceBasis, OracleError> {
        let n = self.cells.len();
        let basis = null_space(&self.diffs, n);
        // Basis vector j is the unit vector on free coordinate j, so the
        // coordinates of an invariant are its values on the free cells.
        let free: Vec<usize> = basis.iter().map(|b| (0..n).rev().find(|&i| b[i].is_one()).unwrap()).collect();
        let mut gammas = Vec::new();
        for v in (0..self.table.rows()).map(Vertex::row).chain((0..self.table.cols()).map(Vertex::col)) {
            let g = self.gamma(v);
            if g.is_empty() {
                continue;
            }
            let dense = self.to_dense(&g)?;
            gammas.push((v, free.iter().map(|&f| dense[f].clone()).collect()));
        }
        Ok(InvariantSpaceBasis { cells: self.cells.clone(), basis, gammas })
    }

    /// Supports of all minimal invariants, each as sorted cell indices.
    pub fn minimal_supports(&self) -> Result<Vec<Vec<usize>>, OracleError> {
        let n = self.cells.len();
        if n > self.limits.circuit_cells {
            return Err(OracleError::LimitExceeded {
                what: "suppressed cells for minimal invariant listing",
                size: n as u64,
                limit: self.limits.circuit_cells as u64,
            });
        }
        let max_size = (self.diffs.len() + 1).min(n);
        let mut found: Vec<u32> = Vec::new();
        for size in 1..=max_size {
            let mut mask: u32 = (1u32 << size) - 1;
            while mask < (1u32 << n) {
                if found.iter().all(|&c| c & !mask != 0) {
                    let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                    if self.columns_rank(&support) == size - 1 {
                        found.push(mask);
                    }
                }
                // Next mask with the same number of bits.
                let low = mask & mask.wrapping_neg();
                let ripple = mask + low;
                mask = (((ripple ^ mask) >> 2) / low) | ripple;
            }
        }
        Ok(found.into_iter().map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect())
    }

    /// The invariant on a minimal support, scaled to coprime integers with a
    /// positive first coefficient.
    pub fn minimal_invariant_on(&self, support: &[usize]) -> Coeffs {
        let sub: Vec<Vec<Rational>> = self.diffs.iter().map(|d| support.iter().map(|&i| d[i].clone()).collect()).collect();
        let ns = null_space(&sub, support.len());
        let mut v = ns.into_iter().next().expect("support carries an invariant");
        integral_primitive(&mut v);
        support.iter().zip(v).map(|(&i, q)| (self.cells[i], q)).collect()
    }

    pub fn minimal_invariants(&self) -> Result<Vec<Coeffs>, OracleError> {
        Ok(self.minimal_supports()?.iter().map(|s| self.minimal_invariant_on(s)).collect())
    }

    fn check_candidates(&self, free: usize, values: usize) -> Result<(), OracleError> {
        let count = (values as u64).checked_pow(free as u32).unwrap_or(u64::MAX);
        if count > self.limits.candidates {
            return Err(OracleError::LimitExceeded {
                what: "candidate coefficient vectors",
                size: count,
                limit: self.limits.candidates,
            });
        }
        Ok(())
    }

    /// Every nonzero invariant with coefficients in `values` and support
    /// inside `within` (cell indices), as dense vectors over `within`.
    fn small_invariants(&self, within: &[usize], values: &[i64]) -> Result<Vec<Vec<i64>>, OracleError> {
        let sub: Vec<Vec<Rational>> = self.diffs.iter().map(|d| within.iter().map(|&i| d[i].clone()).collect()).collect();
        let system = PivotSystem::new(&sub, within.len());
        self.check_candidates(system.free.len(), values.len())?;
        Ok(system.small_solutions(within.len(), values))
    }

    /// Effective areas of the sum invariants that are minimal.
    pub fn sum_minimal_supports(&self) -> Result<BTreeSet<BTreeSet<EdgeKey>>, OracleError> {
        let all: Vec<usize> = (0..self.cells.len()).collect();
        let mut out = BTreeSet::new();
        for v in self.small_invariants(&all, &[0, 1])? {
            let coeffs: Coeffs = all
                .iter()
                .filter(|&&i| v[i] != 0)
                .map(|&i| (self.cells[i], Rational::one()))
                .collect();
            if self.verify_minimal(&coeffs)? {
                out.insert(coeffs.into_keys().collect());
            }
        }
        Ok(out)
    }

    fn check_set(&self, set: &[Vertex]) -> Result<Vec<Vertex>, OracleError> {
        for &v in set {
            let size = if v.side == Side::Row { self.table.rows() } else { self.table.cols() };
            if v.index >= size {
                return Err(OracleError::UnknownVertex(v));
            }
        }
        if set.iter().any(|v| v.side != set[0].side) {
            return Err(OracleError::MixedSet);
        }
        let mut members = set.to_vec();
        members.sort();
        members.dedup();
        Ok(members)
    }

    /// Protection of a pure row set or column set with respect to one class
    /// of invariants, straight from the definition: no member cell is
    /// invariant, and every invariant of the class living on the members'
    /// cells is a combination of the members' sums.
    pub fn set_protected(&self, set: &[Vertex], class: InvariantClass) -> Result<bool, OracleError> {
        let members = self.check_set(set)?;
        let within: Vec<usize> = (0..self.cells.len())
            .filter(|&i| members.iter().any(|&m| self.cells[i].touches(m)))
            .collect();
        for &i in &within {
            if self.is_invariant_cell(self.cells[i])? {
                return Ok(false);
            }
        }
        if within.is_empty() {
            return Ok(true);
        }
        // Member sums have disjoint supports, so a vector is in their span
        // iff it is constant on each member's cells.
        let owner: Vec<usize> = within
            .iter()
            .map(|&i| members.iter().position(|&m| self.cells[i].touches(m)).unwrap())
            .collect();
        let in_span = |v: &[Rational]| {
            let mut seen: Vec<Option<&Rational>> = vec![None; members.len()];
            v.iter().zip(&owner).all(|(q, &m)| match seen[m] {
                None => {
                    seen[m] = Some(q);
                    true
                }
                Some(p) => p == q,
            })
        };
        let to_q = |v: Vec<i64>| -> Vec<Rational> { v.into_iter().map(int).collect() };
        Ok(match class {
            InvariantClass::Linear => {
                let sub: Vec<Vec<Rational>> =
                    self.diffs.iter().map(|d| within.iter().map(|&i| d[i].clone()).collect()).collect();
                null_space(&sub, within.len()).iter().all(|v| in_span(v))
            }
            InvariantClass::Unitary => self.small_invariants(&within, &[-1, 0, 1])?.into_iter().all(|v| in_span(&to_q(v))),
            InvariantClass::Sum => self.small_invariants(&within, &[0, 1])?.into_iter().all(|v| in_span(&to_q(v))),
            InvariantClass::RectangularSum => self
                .small_invariants(&within, &[0, 1])?
                .into_iter()
                .filter(|v| {
                    let support: BTreeSet<EdgeKey> =
                        within.iter().zip(v).filter(|(_, &x)| x != 0).map(|(&i, _)| self.cells[i]).collect();
                    self.is_rectangle(&support)
                })
                .all(|v| in_span(&to_q(v))),
        })
    }

    /// All suppressed cells of the rectangle spanned by the support's rows
    /// and columns, and nothing else.
    pub fn is_rectangle(&self, support: &BTreeSet<EdgeKey>) -> bool {
        let rows: BTreeSet<usize> = support.iter().map(|k| k.row).collect();
        let cols: BTreeSet<usize> = support.iter().map(|k| k.col).collect();
        self.cells
            .iter()
            .filter(|k| rows.contains(&k.row) && cols.contains(&k.col))
            .all(|k| support.contains(k))
    }

    fn line_supports(&self) -> BTreeSet<BTreeSet<EdgeKey>> {
        (0..self.table.rows())
            .map(Vertex::row)
            .chain((0..self.table.cols()).map(Vertex::col))
            .map(|v| self.gamma(v).into_keys().collect::<BTreeSet<_>>())
            .filter(|s| !s.is_empty())
            .collect()
    }

    /// Table protection in its sum-minimal form: the nonzero line sums are
    /// exactly the sum minimal invariants, and no line has a single
    /// suppressed cell.
    pub fn table_protected(&self) -> Result<bool, OracleError> {
        let lines = self.line_supports();
        if lines.iter().any(|s| s.len() == 1) {
            return Ok(false);
        }
        if self.cells.iter().any(|&k| self.is_invariant_cell(k).unwrap()) {
            return Ok(false);
        }
        Ok(self.sum_minimal_supports()? == lines)
    }

    /// Table protection with respect to sum invariants, from the definition:
    /// no invariant cell, and every nonzero sum invariant is a nonnegative
    /// combination of line sums.
    pub fn table_protected_by_definition(&self) -> Result<bool, OracleError> {
        if self.cells.iter().any(|&k| self.is_invariant_cell(k).unwrap()) {
            return Ok(false);
        }
        let all: Vec<usize> = (0..self.cells.len()).collect();
        for v in self.small_invariants(&all, &[0, 1])? {
            let target: Vec<Rational> = v.into_iter().map(int).collect();
            if !self.positive_line_combination(&target) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Solves `lambda_row + lambda_col = target` on every suppressed cell with
    /// all `lambda >= 0`. Each connected group of lines has one degree of
    /// freedom `t`: rows carry `o + t` and columns `o - t`.
    fn positive_line_combination(&self, target: &[Rational]) -> bool {
        let (rows, cols) = (self.table.rows(), self.table.cols());
        let id = |v: Vertex| if v.side == Side::Row { v.index } else { rows + v.index };
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); rows + cols];
        for (i, k) in self.cells.iter().enumerate() {
            incident[k.row].push(i);
            incident[rows + k.col].push(i);
        }
        let mut offset: Vec<Option<Rational>> = vec![None; rows + cols];
        for start in 0..rows + cols {
            if offset[start].is_some() || incident[start].is_empty() {
                continue;
            }
            offset[start] = Some(Rational::zero());
            let mut group = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &i in &incident[u] {
                    let k = self.cells[i];
                    let w = if u < rows { id(Vertex::col(k.col)) } else { id(Vertex::row(k.row)) };
                    let want = &target[i] - offset[u].as_ref().unwrap();
                    match &offset[w] {
                        None => {
                            offset[w] = Some(want);
                            group.push(w);
                            stack.push(w);
                        }
                        Some(o) if *o != want => return false,
                        Some(_) => {}
                    }
                }
            }
            // Rows: o + t >= 0; columns: o - t >= 0.
            let low = group.iter().filter(|&&v| v < rows).map(|&v| -offset[v].clone().unwrap()).max();
            let high = group.iter().filter(|&&v| v >= rows).map(|&v| offset[v].clone().unwrap()).min();
            if let (Some(l), Some(h)) = (low, high) {
                if l > h {
                    return false;
                }
            }
        }
        true
    }
}

/// Scales `v` to coprime integers with a positive first nonzero entry.
pub(crate) fn integral_primitive(v: &mut [Rational]) {
    use num_integer::Integer;
    let l = v.iter().fold(num_bigint::BigInt::one(), |l, q| l.lcm(q.denom()));
    let mut ints: Vec<num_bigint::BigInt> = v.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() {
        let first_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        for x in ints.iter_mut() {
            *x = &*x / &g;
            if first_negative {
                *x = -&*x;
            }
        }
    }
    for (q, x) in v.iter_mut().zip(ints) {
        *q = Rational::from_integer(x);
    }
}
