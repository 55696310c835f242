//! Basic sets of the suppressed graph and the minimal invariants they carry.
//!
//! A basic set is either a single edge outside every strong component or a
//! minimal edge cut of a strong component. The invariant on a cut with sides
//! `H1`, `H2` is built from line sums: add the sums of the rows in `H1`,
//! subtract the sums of the columns in `H1`. Edges inside `H1` cancel, edges
//! inside `H2` never appear, and edges leaving the component are invariant
//! cells whose published values are moved into the constant. What remains is
//! `+1` on cut edges whose `H1` end is a row and `-1` where it is a column.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::flow::{cell_ranges, FlowError};
use crate::graph::{
    minimal_edge_cuts_with_limit, strong_components, CutError, EdgeKey, MixedGraph, Side, Vertex,
    DEFAULT_CUT_VERTEX_LIMIT,
};
use crate::oracle::{Coeffs, Oracle, OracleError};
use crate::rational::{format_rational, Extended, Rational};
use crate::table::{build_graphs, Labels, Table};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasicSetOrigin {
    NonStrongEdge,
    MinimalCut { block: Vec<Vertex>, side1: Vec<Vertex>, side2: Vec<Vertex> },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasicSet {
    pub edges: BTreeSet<EdgeKey>,
    pub origin: BasicSetOrigin,
    pub bipartite: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BasicSetError {
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("the zero vector has no decomposition")]
    ZeroInvariant,
    #[error("no conformal minimal invariant fits the remainder {0:?}")]
    NoDecomposition(Vec<EdgeKey>),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A linear combination of suppressed cells and its value on every bounded
/// feasible assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearInvariant {
    pub coeffs: Coeffs,
    pub constant: Rational,
}

impl LinearInvariant {
    /// Builds the combination and evaluates it on the published table.
    pub fn from_coeffs(t: &Table, coeffs: Coeffs) -> Self {
        let coeffs: Coeffs = coeffs.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        let constant = coeffs.iter().map(|(k, q)| q * &t.cell(*k).value).sum();
        LinearInvariant { coeffs, constant }
    }

    pub fn effective_area(&self) -> BTreeSet<EdgeKey> {
        self.coeffs.iter().filter(|(_, q)| !q.is_zero()).map(|(k, _)| *k).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|q| q.is_zero())
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.values().all(|q| !q.is_negative()) && self.coeffs.values().any(|q| q.is_positive())
    }

    pub fn is_unitary(&self) -> bool {
        self.coeffs.values().all(|q| q.is_zero() || q.abs().is_one())
    }

    pub fn is_sum(&self) -> bool {
        self.coeffs.values().all(|q| q.is_zero() || q.is_one())
    }

    /// A sum invariant or the negation of one.
    pub fn is_signed_sum(&self) -> bool {
        self.is_sum() || self.negated().is_sum()
    }

    /// A sum over all suppressed cells in some set of rows crossed with some
    /// set of columns.
    pub fn is_rectangular(&self, t: &Table) -> bool {
        if !self.is_sum() || self.is_zero() {
            return false;
        }
        let area = self.effective_area();
        let rows: BTreeSet<usize> = area.iter().map(|k| k.row).collect();
        let cols: BTreeSet<usize> = area.iter().map(|k| k.col).collect();
        t.suppressed_cells()
            .into_iter()
            .filter(|k| rows.contains(&k.row) && cols.contains(&k.col))
            .all(|k| area.contains(&k))
    }

    pub fn classes(&self, t: &Table) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.is_positive() {
            out.push("positive");
        }
        if self.is_unitary() {
            out.push("unitary");
        }
        if self.is_sum() {
            out.push("sum");
        }
        if self.is_rectangular(t) {
            out.push("rectangular");
        }
        out
    }

    pub fn negated(&self) -> Self {
        LinearInvariant {
            coeffs: self.coeffs.iter().map(|(k, q)| (*k, -q.clone())).collect(),
            constant: -self.constant.clone(),
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        LinearInvariant {
            coeffs: self.coeffs.iter().map(|(k, q)| (*k, q * c)).filter(|(_, q)| !q.is_zero()).collect(),
            constant: &self.constant * c,
        }
    }

    pub fn to_json(&self, labels: &Labels, t: &Table) -> Value {
        json!({
            "coeffs": self.coeffs.iter().map(|(k, q)| {
                let (r, c) = labels.cell(*k);
                json!([r, c, format_rational(q)])
            }).collect::<Vec<_>>(),
            "constant": format_rational(&self.constant),
            "classes": self.classes(t),
        })
    }
}

pub fn enumerate_basic_sets(h: &MixedGraph) -> Result<Vec<BasicSet>, BasicSetError> {
    enumerate_basic_sets_with_limit(h, DEFAULT_CUT_VERTEX_LIMIT)
}

/// Singleton basic sets for edges between strong components, then the
/// minimal edge cuts of each strong component. `limit` caps the size of a
/// component whose cuts are enumerated.
pub fn enumerate_basic_sets_with_limit(h: &MixedGraph, limit: usize) -> Result<Vec<BasicSet>, BasicSetError> {
    let strong = strong_components(h);
    let mut out = Vec::new();
    for k in h.edge_keys() {
        if strong.block_of(Vertex::row(k.row)) != strong.block_of(Vertex::col(k.col)) {
            out.push(BasicSet { edges: BTreeSet::from([k]), origin: BasicSetOrigin::NonStrongEdge, bipartite: true });
        }
    }
    for block in strong.nonsingleton() {
        for cut in minimal_edge_cuts_with_limit(h, block, limit)? {
            let in_side1: BTreeSet<Vertex> = cut.side1.iter().copied().collect();
            let ends: BTreeSet<Side> = cut
                .edges
                .iter()
                .map(|k| if in_side1.contains(&Vertex::row(k.row)) { Side::Row } else { Side::Col })
                .collect();
            out.push(BasicSet {
                edges: cut.edges,
                origin: BasicSetOrigin::MinimalCut { block: block.clone(), side1: cut.side1, side2: cut.side2 },
                bipartite: ends.len() == 1,
            });
        }
    }
    Ok(out)
}

/// Coefficients from the sign rule, before any check.
fn sign_rule(h: &MixedGraph, b: &BasicSet) -> (Coeffs, Vec<EdgeKey>) {
    match &b.origin {
        BasicSetOrigin::NonStrongEdge => (b.edges.iter().map(|&k| (k, Rational::one())).collect(), Vec::new()),
        BasicSetOrigin::MinimalCut { block, side1, .. } => {
            let side1: BTreeSet<Vertex> = side1.iter().copied().collect();
            let mut coeffs: BTreeMap<EdgeKey, Rational> = BTreeMap::new();
            for &v in &side1 {
                let sign = if v.side == Side::Row { Rational::one() } else { -Rational::one() };
                for e in h.incident(v) {
                    *coeffs.entry(e.key()).or_insert_with(Rational::zero) += &sign;
                }
            }
            let inside = |k: &EdgeKey| block.binary_search(&Vertex::row(k.row)).is_ok() && block.binary_search(&Vertex::col(k.col)).is_ok();
            let leaving: Vec<EdgeKey> = coeffs.keys().copied().filter(|k| !inside(k)).collect();
            for k in &leaving {
                coeffs.remove(k);
            }
            coeffs.retain(|_, q| !q.is_zero());
            (coeffs, leaving)
        }
    }
}

/// The minimal invariant whose effective area is `b`.
///
/// Invariance is certified without enumeration: the result is a combination
/// of line sums minus cells that exact flow ranges show to be fixed.
pub fn construct_minimal_invariant(t: &Table, b: &BasicSet) -> Result<LinearInvariant, BasicSetError> {
    let (_, h) = build_graphs(t);
    let (coeffs, fixed) = sign_rule(&h, b);
    let must_fix: Vec<EdgeKey> = match b.origin {
        BasicSetOrigin::NonStrongEdge => b.edges.iter().copied().collect(),
        BasicSetOrigin::MinimalCut { .. } => fixed,
    };
    if !must_fix.is_empty() {
        let ranges = cell_ranges(t)?;
        for k in must_fix {
            let (_, lo, hi) = ranges
                .iter()
                .find(|(c, _, _)| *c == k)
                .ok_or_else(|| BasicSetError::Internal(format!("cell {k} is not suppressed")))?;
            let value = Extended::Finite(t.cell(k).value.clone());
            if *lo != value || *hi != value {
                return Err(BasicSetError::Internal(format!("cell {k} leaves its strong component but is not fixed")));
            }
        }
    }
    let f = LinearInvariant::from_coeffs(t, coeffs);
    if f.effective_area() != b.edges {
        return Err(BasicSetError::Internal(format!("sign rule support differs from basic set {:?}", b.edges)));
    }
    if !f.is_unitary() {
        return Err(BasicSetError::Internal("sign rule produced a non-unitary invariant".into()));
    }
    Ok(f)
}

/// [`construct_minimal_invariant`], then confirmed invariant and minimal by
/// enumeration.
pub fn construct_minimal_invariant_checked(
    t: &Table,
    b: &BasicSet,
    oracle: &Oracle<'_>,
) -> Result<LinearInvariant, BasicSetError> {
    let f = construct_minimal_invariant(t, b)?;
    if !oracle.verify_minimal(&f.coeffs)? {
        return Err(BasicSetError::Internal(format!("invariant on {:?} failed the enumeration check", b.edges)));
    }
    Ok(f)
}

/// Writes `f` as a positive combination of unitary minimal invariants whose
/// effective areas lie inside `EA(f)` and whose signs agree with `f` cell by
/// cell.
///
/// Each step subtracts the largest multiple of a conforming minimal
/// invariant that keeps the remainder conforming, which zeroes at least one
/// cell. A nonzero invariant always has a conforming minimal invariant, so
/// the loop only stalls when `f` is not an invariant.
pub fn decompose_invariant(t: &Table, f: &LinearInvariant) -> Result<Vec<(Rational, LinearInvariant)>, BasicSetError> {
    if f.is_zero() {
        return Err(BasicSetError::ZeroInvariant);
    }
    let (_, h) = build_graphs(t);
    let area = f.effective_area();
    let mut pool = Vec::new();
    for b in enumerate_basic_sets(&h)? {
        if b.edges.is_subset(&area) {
            pool.push(construct_minimal_invariant(t, &b)?);
        }
    }
    let mut rest: Coeffs = f.coeffs.iter().filter(|(_, q)| !q.is_zero()).map(|(k, q)| (*k, q.clone())).collect();
    let mut terms: Vec<(Rational, LinearInvariant)> = Vec::new();
    while !rest.is_empty() {
        let conforming = pool.iter().find_map(|g| {
            let signs: Option<Vec<bool>> = g
                .coeffs
                .iter()
                .map(|(k, q)| rest.get(k).map(|r| r.is_positive() == q.is_positive()))
                .collect();
            match signs {
                Some(s) if s.iter().all(|&x| x) => Some(g.clone()),
                Some(s) if s.iter().all(|&x| !x) => Some(g.negated()),
                _ => None,
            }
        });
        let Some(g) = conforming else {
            return Err(BasicSetError::NoDecomposition(rest.into_keys().collect()));
        };
        let c = g.coeffs.keys().map(|k| rest[k].abs()).min().expect("minimal invariants are nonzero");
        for (k, q) in &g.coeffs {
            let r = rest.get_mut(k).unwrap();
            *r -= q * &c;
            if r.is_zero() {
                rest.remove(k);
            }
        }
        match terms.iter_mut().find(|(_, t)| t.coeffs == g.coeffs) {
            Some((d, _)) => *d += c,
            None => terms.push((c, g)),
        }
    }
    let constant: Rational = terms.iter().map(|(c, g)| c * &g.constant).sum();
    if constant != f.constant {
        return Err(BasicSetError::Internal(format!(
            "constant {} does not match the decomposition's {}",
            format_rational(&f.constant),
            format_rational(&constant)
        )));
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Limits;
    use crate::rational::int;
    use crate::table::{fixtures::sample, parse_table, table_from_graphs};

    fn two_by_two() -> Table {
        parse_table(
            r#"{"rows":["1","2"],"cols":["a","b"],"cells":[
                {"row":"1","col":"a","value":2,"lower":0,"upper":5,"suppressed":true},
                {"row":"1","col":"b","value":1,"lower":0,"upper":5,"suppressed":true},
                {"row":"2","col":"a","value":3,"lower":0,"upper":5,"suppressed":true},
                {"row":"2","col":"b","value":2,"lower":0,"upper":5,"suppressed":true}]}"#,
        )
        .unwrap()
    }

    fn coeffs(pairs: &[((usize, usize), i64)]) -> Coeffs {
        pairs.iter().map(|&((r, c), q)| (EdgeKey::new(r, c), int(q))).collect()
    }

    #[test]
    fn four_cycle_has_six_basic_sets() {
        let (_, h) = build_graphs(&two_by_two());
        let sets = enumerate_basic_sets(&h).unwrap();
        assert_eq!(sets.len(), 6);
        assert_eq!(sets.iter().filter(|b| b.bipartite).count(), 4);
        for b in sets.iter().filter(|b| !b.bipartite) {
            assert_eq!(b.edges.len(), 2);
            let rows: BTreeSet<usize> = b.edges.iter().map(|k| k.row).collect();
            assert_eq!(rows.len(), 2);
        }
    }

    #[test]
    fn single_directed_edge() {
        let h = MixedGraph::from_edges(1, 1, [crate::graph::Edge::row_to_col(0, 0)]).unwrap();
        let sets = enumerate_basic_sets(&h).unwrap();
        assert_eq!(sets, vec![BasicSet {
            edges: BTreeSet::from([EdgeKey::new(0, 0)]),
            origin: BasicSetOrigin::NonStrongEdge,
            bipartite: true,
        }]);
    }

    #[test]
    fn sample_stars_are_bipartite_basic_sets() {
        let t = sample();
        let (_, h) = build_graphs(&t);
        let sets = enumerate_basic_sets(&h).unwrap();
        for v in h.vertices() {
            let star: BTreeSet<EdgeKey> = h.incident(v).iter().map(|e| e.key()).collect();
            if !star.is_empty() {
                assert!(sets.iter().any(|b| b.edges == star && b.bipartite), "{v}");
            }
        }
    }

    #[test]
    fn sign_rule_on_four_cycle() {
        let t = two_by_two();
        let (_, h) = build_graphs(&t);
        let oracle = Oracle::new(&t, &Limits::default()).unwrap();
        for b in enumerate_basic_sets(&h).unwrap() {
            let f = construct_minimal_invariant_checked(&t, &b, &oracle).unwrap();
            assert_eq!(f.is_signed_sum(), b.bipartite);
            assert_eq!(f.constant, oracle.value(&f.coeffs));
        }
        let star = enumerate_basic_sets(&h)
            .unwrap()
            .into_iter()
            .find(|b| b.edges == BTreeSet::from([EdgeKey::new(0, 0), EdgeKey::new(0, 1)]))
            .unwrap();
        let f = construct_minimal_invariant(&t, &star).unwrap();
        assert_eq!(f.coeffs, coeffs(&[((0, 0), 1), ((0, 1), 1)]));
        assert_eq!(f.constant, int(3));
        let diagonal = enumerate_basic_sets(&h)
            .unwrap()
            .into_iter()
            .find(|b| b.edges == BTreeSet::from([EdgeKey::new(0, 0), EdgeKey::new(1, 1)]))
            .unwrap();
        let f = construct_minimal_invariant(&t, &diagonal).unwrap();
        assert_eq!(f.coeffs, coeffs(&[((0, 0), 1), ((1, 1), -1)]));
        // Row 1 sum minus column b sum: 3 - 3.
        assert_eq!(f.constant, int(0));
    }

    #[test]
    fn invariant_cell_basic_set() {
        let h = MixedGraph::from_edges(2, 2, [
            crate::graph::Edge::row_to_col(0, 0),
            crate::graph::Edge::undirected(0, 1),
            crate::graph::Edge::undirected(1, 1),
        ])
        .unwrap();
        let total = MixedGraph::complete(2, 2, |r, c| {
            if (r, c) == (0, 0) { crate::graph::Orientation::RowToCol } else { crate::graph::Orientation::Undirected }
        });
        let t = table_from_graphs(&total, &h).unwrap();
        let (_, h) = build_graphs(&t);
        let sets = enumerate_basic_sets(&h).unwrap();
        let oracle = Oracle::new(&t, &Limits::default()).unwrap();
        for b in &sets {
            let f = construct_minimal_invariant_checked(&t, b, &oracle).unwrap();
            assert!(f.is_unitary());
        }
    }

    #[test]
    fn decomposes_into_line_sums() {
        let t = two_by_two();
        let f = LinearInvariant::from_coeffs(&t, coeffs(&[((0, 0), 1), ((0, 1), 2), ((1, 1), 1)]));
        let terms = decompose_invariant(&t, &f).unwrap();
        let areas: BTreeSet<Vec<EdgeKey>> = terms.iter().map(|(_, g)| g.coeffs.keys().copied().collect()).collect();
        assert_eq!(
            areas,
            BTreeSet::from([
                vec![EdgeKey::new(0, 0), EdgeKey::new(0, 1)],
                vec![EdgeKey::new(0, 1), EdgeKey::new(1, 1)],
            ])
        );
        assert!(terms.iter().all(|(c, _)| *c == int(1)));

        let gamma = LinearInvariant::from_coeffs(&t, coeffs(&[((0, 0), 1), ((0, 1), 1)]));
        let single = decompose_invariant(&t, &gamma).unwrap();
        assert_eq!(single, vec![(int(1), gamma)]);

        let diag = LinearInvariant::from_coeffs(&t, coeffs(&[((0, 0), 1), ((1, 1), -1)]));
        assert_eq!(decompose_invariant(&t, &diag).unwrap(), vec![(int(1), diag)]);
    }

    #[test]
    fn decomposition_rejects_non_invariants() {
        let t = two_by_two();
        let f = LinearInvariant::from_coeffs(&t, coeffs(&[((0, 0), 1)]));
        assert!(matches!(decompose_invariant(&t, &f), Err(BasicSetError::NoDecomposition(_))));
    }

    #[test]
    fn classes() {
        let t = two_by_two();
        let row = LinearInvariant::from_coeffs(&t, coeffs(&[((0, 0), 1), ((0, 1), 1)]));
        assert_eq!(row.classes(&t), vec!["positive", "unitary", "sum", "rectangular"]);
        let diag = LinearInvariant::from_coeffs(&t, coeffs(&[((0, 0), 1), ((1, 1), 1)]));
        assert_eq!(diag.classes(&t), vec!["positive", "unitary", "sum"]);
        let json = row.to_json(&t.labels().clone(), &t);
        assert_eq!(json["coeffs"][0], json!(["1", "a", "1"]));
        assert_eq!(json["constant"], json!("3"));
    }
}
