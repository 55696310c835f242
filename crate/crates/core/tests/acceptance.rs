//! Acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the summary is always printed; the
//! process exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::Rng;

use tablelock::augment::{decide, exact_plan, greedy_plan, PlanOutcome, SearchLimits, Target};
use tablelock::basic_sets::{construct_minimal_invariant_checked, enumerate_basic_sets_with_limit};
use tablelock::gadgets::{build_gadget, hitting_set_from_witness, witness_from_hitting_set, HittingSetInstance, Variant};
use tablelock::graph::{strong_components, Edge, EdgeKey, MixedGraph, Orientation};
use tablelock::oracle::{InvariantClass, Limits, Oracle, OracleError};
use tablelock::security::{
    all_cells_protected, all_k_sets_protected, audit, is_set_protected, is_table_protected, min_side,
    unprotected_cells, ComponentFailure,
};
use tablelock::table::{build_graphs, parse_table, table_from_graphs, Table};

const CORPUS_SEED: u64 = 0x7AB1E;
const CORPUS_SIZE: usize = 300;
const MIN_CHECKED: usize = 200;

const CRIT1_LIMIT: Duration = Duration::from_secs(1);
const CRIT2_LIMIT: Duration = Duration::from_secs(60);
const CRIT7_LIMIT: Duration = Duration::from_secs(120);
const CRIT10_LIMIT: Duration = Duration::from_secs(10);

struct Outcome {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: u8, name: &'static str, failures: &[String], detail: String) -> Outcome {
    let detail = match failures.first() {
        None => detail,
        Some(first) => format!("{detail}; {} failures, first: {first}", failures.len()),
    };
    Outcome { id, name, pass: failures.is_empty(), detail }
}

/// Corpus tables the oracle can enumerate, with their oracles.
fn enumerable(corpus: &[Table]) -> Vec<(&Table, Oracle<'_>)> {
    let limits = Limits::default();
    corpus
        .iter()
        .filter_map(|t| match Oracle::new(t, &limits) {
            Ok(o) => Some((t, o)),
            Err(OracleError::BudgetExceeded(_)) => None,
            Err(e) => panic!("corpus table rejected: {e}"),
        })
        .collect()
}

fn sample_fidelity() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let t = parse_table(common::SAMPLE).unwrap();
    let (_, h) = build_graphs(&t);
    let expected = MixedGraph::from_edges(3, 3, [
        Edge::row_to_col(0, 0),
        Edge::col_to_row(1, 0),
        Edge::row_to_col(1, 2),
        Edge::undirected(2, 2),
        Edge::row_to_col(2, 1),
        Edge::col_to_row(0, 1),
        Edge::col_to_row(1, 1),
    ])
    .unwrap();
    if h != expected {
        failures.push(format!("suppressed graph edges {:?}", h.edges().collect::<Vec<_>>()));
    }
    let report = audit(&h, 2).unwrap();
    if !report.level1.all_protected {
        failures.push("level 1 should hold".into());
    }
    if !report.level2.all_protected {
        failures.push("level 2 should hold".into());
    }
    let k2 = &report.level3[1].verdict;
    let witness_ok = matches!(k2.failures.as_slice(), [ComponentFailure::SideCut(w)]
        if t.labels().vertex(w.vertices[0]) == "a" && t.labels().vertex(w.vertices[1]) == "b" && w.vertices.len() == 2);
    if k2.holds || !witness_ok {
        failures.push(format!("level 3 k=2: {:?}", k2));
    }
    let missing = match report.level4.verdict.failures.as_slice() {
        [ComponentFailure::Incomplete { missing, .. }] => missing.clone(),
        _ => Vec::new(),
    };
    if report.level4.verdict.holds || missing != vec![EdgeKey::new(0, 2), EdgeKey::new(2, 0)] {
        failures.push(format!("level 4: {:?}", report.level4.verdict));
    }
    let elapsed = start.elapsed();
    if elapsed >= CRIT1_LIMIT {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(1, "sample table fidelity", &failures, format!("7 edges, audit in {elapsed:?} (limit {CRIT1_LIMIT:?})"))
}

fn cell_oracle_equivalence(checked: &[(&Table, Oracle<'_>)], elapsed: Duration) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut with_fixed = 0usize;
    for (i, (t, o)) in checked.iter().enumerate() {
        let (_, h) = build_graphs(t);
        let fixed: BTreeSet<EdgeKey> = o.cells().iter().copied().filter(|&k| o.is_invariant_cell(k).unwrap()).collect();
        with_fixed += usize::from(!fixed.is_empty());
        let graph = unprotected_cells(&h);
        if graph != fixed {
            failures.push(format!("table {i}: graph {graph:?} vs oracle {fixed:?}"));
        }
        if all_cells_protected(&h) != fixed.is_empty() {
            failures.push(format!("table {i}: all_cells_protected disagrees"));
        }
    }
    let total = elapsed + start.elapsed();
    if checked.len() < MIN_CHECKED {
        failures.push(format!("only {} tables enumerated", checked.len()));
    }
    if total >= CRIT2_LIMIT {
        failures.push(format!("took {total:?}"));
    }
    outcome(2, "invariant cells match the cell predicate", &failures, format!(
        "{} tables ({with_fixed} with invariant cells), {total:?} including enumeration (limit {CRIT2_LIMIT:?})",
        checked.len()
    ))
}

fn set_and_table_equivalence(checked: &[(&Table, Oracle<'_>)]) -> (Outcome, Outcome) {
    let mut failures = Vec::new();
    let mut class_failures = Vec::new();
    let (mut sets_checked, mut tables_checked) = (0usize, 0usize);
    let (mut sets_protected, mut tables_protected) = (0usize, 0usize);
    for (i, (t, o)) in checked.iter().enumerate() {
        let (_, h) = build_graphs(t);
        for k in [1, 2] {
            let mut all = true;
            for set in common::pure_sets(t.rows(), t.cols(), k) {
                let graph = is_set_protected(&h, &set).unwrap().is_protected();
                let mut by_class = Vec::new();
                for class in InvariantClass::ALL {
                    match o.set_protected(&set, class) {
                        Ok(v) => by_class.push((class, v)),
                        Err(OracleError::LimitExceeded { .. }) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
                let Some(&(_, sum)) = by_class.iter().find(|(c, _)| *c == InvariantClass::Sum) else { continue };
                sets_checked += 1;
                sets_protected += usize::from(sum);
                if by_class.iter().any(|(_, v)| *v != sum) {
                    class_failures.push(format!("table {i} set {set:?}: {by_class:?}"));
                }
                if graph != sum {
                    failures.push(format!("table {i} set {set:?}: graph {graph}, oracle {sum}"));
                }
                all &= sum;
            }
            if all_k_sets_protected(&h, k).holds != all {
                failures.push(format!("table {i} k={k}: all-sets predicate disagrees with oracle {all}"));
            }
        }
        match o.table_protected() {
            Ok(v) => {
                tables_checked += 1;
                tables_protected += usize::from(v);
                if is_table_protected(&h).holds != v {
                    failures.push(format!("table {i}: table predicate disagrees with oracle {v}"));
                }
                if o.table_protected_by_definition().unwrap() != v {
                    failures.push(format!("table {i}: the two oracle forms disagree"));
                }
            }
            Err(OracleError::LimitExceeded { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    if tables_checked < MIN_CHECKED {
        failures.push(format!("only {tables_checked} tables within oracle limits"));
    }
    (
        outcome(3, "set and table predicates match the oracle", &failures, format!(
            "{sets_checked} sets with k in {{1,2}} ({sets_protected} protected), {tables_checked} tables ({tables_protected} protected)"
        )),
        outcome(4, "invariant classes agree on every set", &class_failures, format!(
            "{sets_checked} sets, 4 classes each"
        )),
    )
}

fn basic_set_completeness(checked: &[(&Table, Oracle<'_>)]) -> (Outcome, Outcome) {
    let mut failures = Vec::new();
    let mut shape_failures = Vec::new();
    let (mut instances, mut invariants, mut sum_minimal) = (0usize, 0usize, 0usize);
    for (i, (t, o)) in checked.iter().enumerate() {
        let (_, h) = build_graphs(t);
        if strong_components(&h).blocks.iter().any(|b| b.len() > 10) {
            continue;
        }
        let Ok(supports) = o.minimal_supports() else { continue };
        instances += 1;
        let from_oracle: BTreeSet<BTreeSet<EdgeKey>> =
            supports.iter().map(|s| s.iter().map(|&j| o.cells()[j]).collect()).collect();
        let basic = enumerate_basic_sets_with_limit(&h, 10).unwrap();
        let from_graph: BTreeSet<BTreeSet<EdgeKey>> = basic.iter().map(|b| b.edges.clone()).collect();
        if from_oracle != from_graph {
            failures.push(format!("table {i}: oracle {from_oracle:?} vs basic sets {from_graph:?}"));
        }
        for b in &basic {
            invariants += 1;
            match construct_minimal_invariant_checked(t, b, o) {
                Ok(f) => {
                    if !f.is_unitary() {
                        failures.push(format!("table {i}: {:?} not unitary", f.coeffs));
                    }
                    if f.is_signed_sum() != b.bipartite {
                        failures.push(format!("table {i}: {:?} bipartite {} but sum {}", b.edges, b.bipartite, f.is_signed_sum()));
                    }
                }
                Err(e) => failures.push(format!("table {i}: {e}")),
            }
        }
        if let Ok(sums) = o.sum_minimal_supports() {
            for s in sums {
                sum_minimal += 1;
                if !o.is_rectangle(&s) {
                    shape_failures.push(format!("table {i}: {s:?}"));
                }
            }
        }
    }
    (
        outcome(5, "minimal invariants are exactly the basic sets", &failures, format!(
            "{instances} tables, {invariants} constructed invariants"
        )),
        outcome(6, "sum minimal invariants are rectangles", &shape_failures, format!(
            "{sum_minimal} sum minimal invariants"
        )),
    )
}

fn hierarchy(checked: &[(&Table, Oracle<'_>)]) -> Outcome {
    let mut failures = Vec::new();
    let mut audited = 0usize;
    let mut graphs: Vec<MixedGraph> = checked.iter().map(|(t, _)| build_graphs(t).1).collect();
    let mut r = common::rng(CORPUS_SEED + 9);
    for _ in 0..200 {
        let (rows, cols) = (2 + r.gen_range(0..5), 2 + r.gen_range(0..5));
        let edges = r.gen_range(rows.max(cols)..=rows * cols);
        graphs.push(common::random_graph(&mut r, rows, cols, edges));
    }
    for (i, h) in graphs.iter().enumerate() {
        let k_max = h.rows().max(h.cols());
        let report = match audit(h, k_max) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("graph {i}: {e}"));
                continue;
            }
        };
        audited += 1;
        if report.level4.verdict.holds {
            if let Some(m) = min_side(h).filter(|&m| m >= 2) {
                if !report.level3[m - 2].verdict.holds {
                    failures.push(format!("graph {i}: table protected but not sets of {}", m - 1));
                }
            }
        }
        let unprotected: BTreeSet<EdgeKey> = report.level1.unprotected_cells.iter().copied().collect();
        for s in &report.level3 {
            if !s.verdict.holds {
                continue;
            }
            for set in common::pure_sets(h.rows(), h.cols(), s.k.min(3)) {
                if !is_set_protected(h, &set).unwrap().is_protected() {
                    failures.push(format!("graph {i}: k={} holds but {set:?} unprotected", s.k));
                }
            }
        }
        for v in h.vertices() {
            if is_set_protected(h, &[v]).unwrap().is_protected() {
                for e in h.incident(v) {
                    if unprotected.contains(&e.key()) {
                        failures.push(format!("graph {i}: line {v} protected but cell {} is not", e.key()));
                    }
                }
            }
        }
    }
    outcome(9, "protection levels nest", &failures, format!("{audited} audited graphs"))
}

fn large_audit() -> Outcome {
    let mut r = common::rng(CORPUS_SEED + 10);
    let h = common::random_graph(&mut r, 50, 50, 500);
    let total = MixedGraph::complete(50, 50, |row, col| {
        h.orientation(EdgeKey::new(row, col)).unwrap_or(tablelock::graph::Orientation::Undirected)
    });
    let t = table_from_graphs(&total, &h).unwrap();
    let start = Instant::now();
    let (_, h) = build_graphs(&t);
    let report = audit(&h, 0);
    let elapsed = start.elapsed();
    let mut failures = Vec::new();
    if let Err(e) = &report {
        failures.push(e.to_string());
    }
    if elapsed >= CRIT10_LIMIT {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(10, "50x50 audit with 500 suppressed cells", &failures, format!(
        "{} suppressed, levels 1, 2, 4 in {elapsed:?} (limit {CRIT10_LIMIT:?})",
        h.edge_count()
    ))
}

/// Smallest hitting set of size at most `h`, by trying every subset.
fn brute_hitting_set(n: usize, family: &[u32], h: usize) -> Option<BTreeSet<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= h && family.iter().all(|s| s & m != 0))
        .min_by_key(|m| m.count_ones())
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn reduction_round_trip() -> Outcome {
    let start = Instant::now();
    let limits = SearchLimits::default();
    let mut failures = Vec::new();
    let (mut instances, mut solvable) = (0, 0);
    for n in 1..=4usize {
        let subsets: Vec<u32> = (0..1 << n).collect();
        let mut families: Vec<Vec<u32>> = Vec::new();
        for a in 0..subsets.len() {
            families.push(vec![subsets[a]]);
            for b in a + 1..subsets.len() {
                families.push(vec![subsets[a], subsets[b]]);
                for c in b + 1..subsets.len() {
                    families.push(vec![subsets[a], subsets[b], subsets[c]]);
                }
            }
        }
        for family in &families {
            let sets: Vec<Vec<usize>> =
                family.iter().map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect();
            let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
            for h in 0..=2 {
                instances += 1;
                let hs = HittingSetInstance::from_indices(n, &refs, h).unwrap();
                let expected = brute_hitting_set(n, family, h);
                solvable += usize::from(expected.is_some());
                for variant in [Variant::CellOrSets, Variant::Table] {
                    let g = build_gadget(&hs, variant);
                    for target in g.targets() {
                        let tag = format!("n={n} W={sets:?} h={h} {}", target.name());
                        let plan = match decide(&g.total, &g.suppressed, target, g.p, &limits) {
                            Ok(plan) => plan,
                            Err(e) => {
                                failures.push(format!("{tag}: {e}"));
                                continue;
                            }
                        };
                        if plan.is_some() != expected.is_some() {
                            failures.push(format!("{tag}: decide {} but hitting set {:?}", plan.is_some(), expected));
                        }
                        if let Some(chosen) = &expected {
                            match witness_from_hitting_set(&g, chosen) {
                                Ok(p) if p.len() <= g.p
                                    && target.holds(&g.suppressed.with_edges(p.iter().copied()).unwrap()) => {}
                                Ok(p) => failures.push(format!("{tag}: witness {p:?} fails")),
                                Err(e) => failures.push(format!("{tag}: witness: {e}")),
                            }
                        }
                        if let Some(plan) = plan {
                            match hitting_set_from_witness(&g, &plan.cells()) {
                                Ok(chosen) if hs.is_hitting_set(&chosen).is_ok() => {}
                                Ok(chosen) => failures.push(format!("{tag}: extracted {chosen:?} is not a hitting set")),
                                Err(e) => failures.push(format!("{tag}: extraction: {e}")),
                            }
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= CRIT7_LIMIT {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        7,
        "reduction round trip",
        &failures,
        format!("{instances} instances ({solvable} solvable), 3 targets each, in {elapsed:?} (limit {CRIT7_LIMIT:?})"),
    )
}

/// A complete total graph with random orientations and a random suppressed
/// subgraph of it.
fn random_instance(rng: &mut impl Rng) -> (MixedGraph, MixedGraph) {
    let rows = rng.gen_range(2..=4);
    let cols = rng.gen_range(2..=3);
    let orient: Vec<Orientation> = (0..rows * cols)
        .map(|_| match rng.gen_range(0..4) {
            0 | 1 => Orientation::Undirected,
            2 => Orientation::RowToCol,
            _ => Orientation::ColToRow,
        })
        .collect();
    let total = MixedGraph::complete(rows, cols, |r, c| orient[r * cols + c]);
    let keep = rng.gen_range(0.2..0.6);
    let edges: Vec<Edge> = total.edges().filter(|_| rng.gen_bool(keep)).collect();
    let h = MixedGraph::from_edges(rows, cols, edges).unwrap();
    (total, h)
}

/// Smallest number of candidates whose addition reaches the target, found by
/// trying every subset in order of size.
fn brute_min_cost(h: &MixedGraph, free: &[Edge], target: Target) -> Option<usize> {
    let n = free.len();
    let mut masks: Vec<u32> = (0u32..1 << n).collect();
    masks.sort_by_key(|m| m.count_ones());
    masks.into_iter().find_map(|m| {
        let added = (0..n).filter(|i| m >> i & 1 == 1).map(|i| free[i]);
        target.holds(&h.with_edges(added).unwrap()).then_some(m.count_ones() as usize)
    })
}

fn plan_optimality() -> Outcome {
    let mut rng = common::rng(CORPUS_SEED ^ 0xA5);
    let limits = SearchLimits::default();
    let mut failures = Vec::new();
    let (mut instances, mut feasible, mut greedy_gap) = (0, 0, 0);
    while instances < 60 {
        let (total, h) = random_instance(&mut rng);
        let free: Vec<Edge> = total.edges().filter(|e| !h.contains(e.key())).collect();
        if free.len() > 12 {
            continue;
        }
        for target in [Target::Cells, Target::Sets(1), Target::Sets(2), Target::Table] {
            instances += 1;
            let tag = format!("instance {instances} {}", target.name());
            let (exact, greedy) = match (
                exact_plan(&total, &h, target, &limits),
                greedy_plan(&total, &h, target, &limits),
            ) {
                (Ok(e), Ok(g)) => (e, g),
                (e, g) => {
                    failures.push(format!("{tag}: {:?} / {:?}", e.err(), g.err()));
                    continue;
                }
            };
            let best = brute_min_cost(&h, &free, target);
            match (&exact, best) {
                (PlanOutcome::Found(plan), Some(cost)) => {
                    feasible += 1;
                    if plan.cost() != cost {
                        failures.push(format!("{tag}: exact cost {} but exhaustion finds {cost}", plan.cost()));
                    }
                }
                (PlanOutcome::Infeasible, None) => {}
                (e, b) => failures.push(format!("{tag}: exact {:?} vs exhaustion {b:?}", e.plan().map(|p| p.cost()))),
            }
            for (mode, out) in [("exact", &exact), ("greedy", &greedy)] {
                if let Some(plan) = out.plan() {
                    if !target.holds(&plan.apply(&h)) {
                        failures.push(format!("{tag}: {mode} plan misses the target"));
                    }
                }
            }
            match (exact.plan(), greedy.plan()) {
                (Some(e), Some(g)) => {
                    if g.cost() < e.cost() {
                        failures.push(format!("{tag}: greedy {} below exact {}", g.cost(), e.cost()));
                    }
                    greedy_gap += g.cost() - e.cost().min(g.cost());
                }
                (None, None) => {}
                (e, g) => failures.push(format!("{tag}: exact {:?} greedy {:?}", e.map(|p| p.cost()), g.map(|p| p.cost()))),
            }
        }
    }
    outcome(
        8,
        "plan optimality",
        &failures,
        format!("{instances} instances ({feasible} feasible), greedy excess {greedy_gap} cells in total"),
    )
}

fn main() {
    let mut outcomes = vec![sample_fidelity()];

    let corpus = common::corpus(CORPUS_SEED, CORPUS_SIZE);
    let start = Instant::now();
    let checked = enumerable(&corpus);
    let enumeration = start.elapsed();
    outcomes.push(cell_oracle_equivalence(&checked, enumeration));
    let (c3, c4) = set_and_table_equivalence(&checked);
    outcomes.push(c3);
    outcomes.push(c4);
    let (c5, c6) = basic_set_completeness(&checked);
    outcomes.push(c5);
    outcomes.push(c6);
    outcomes.push(hierarchy(&checked));
    outcomes.push(reduction_round_trip());
    outcomes.push(plan_optimality());
    outcomes.push(large_audit());

    outcomes.sort_by_key(|o| o.id);
    let mut failed = 0;
    for o in &outcomes {
        println!("criterion {:>2} {} - {}: {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria pass", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
