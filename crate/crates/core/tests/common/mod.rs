#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use tablelock::graph::{Edge, EdgeKey, MixedGraph, Orientation, Side, Vertex};
use tablelock::rational::int;
use tablelock::table::{parse_table, Arithmetic, Bounds, Cell, Labels, Table};

pub const SAMPLE: &str = include_str!("../../../../data/sample.json");

pub fn sample() -> Table {
    parse_table(SAMPLE).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random integer table of at most 4x4 with bound width at most 3. Half
/// the tables put most values on a bound, so directed edges are common; the
/// rest keep most values strictly inside.
pub fn random_table(rng: &mut ChaCha8Rng) -> Table {
    let rows = rng.gen_range(1..=4);
    let cols = rng.gen_range(1..=4);
    let suppress = rng.gen_range(0.3..0.9);
    let on_bound = if rng.gen_bool(0.5) { 6 } else { 2 };
    let mut cells = Vec::new();
    for row in 0..rows {
        for col in 0..cols {
            let lower = rng.gen_range(0..=2);
            let upper = lower + rng.gen_range(1..=3);
            let roll = rng.gen_range(0..10);
            let value = if roll < on_bound {
                if roll % 2 == 0 { lower } else { upper }
            } else if upper - lower >= 2 {
                rng.gen_range(lower + 1..upper)
            } else {
                rng.gen_range(lower..=upper)
            };
            cells.push(Cell {
                row,
                col,
                value: int(value),
                bounds: Bounds::finite(int(lower), int(upper)).unwrap(),
                suppressed: rng.gen_bool(suppress),
            });
        }
    }
    Table::with_computed_margins(Labels::numbered(rows, cols), cells, Arithmetic::Integer).unwrap()
}

pub fn corpus(seed: u64, n: usize) -> Vec<Table> {
    let mut r = rng(seed);
    (0..n).map(|_| random_table(&mut r)).collect()
}

/// A random suppressed graph on the given sides with roughly `edges` edges.
pub fn random_graph(rng: &mut ChaCha8Rng, rows: usize, cols: usize, edges: usize) -> MixedGraph {
    let mut keys: Vec<EdgeKey> = (0..rows).flat_map(|r| (0..cols).map(move |c| EdgeKey::new(r, c))).collect();
    let mut chosen = Vec::new();
    for _ in 0..edges.min(keys.len()) {
        let i = rng.gen_range(0..keys.len());
        chosen.push(keys.swap_remove(i));
    }
    let orient = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
        0 => Orientation::Undirected,
        1 => Orientation::RowToCol,
        _ => Orientation::ColToRow,
    };
    let edges: Vec<Edge> = chosen.into_iter().map(|k| Edge::new(k.row, k.col, orient(rng))).collect();
    MixedGraph::from_edges(rows, cols, edges).unwrap()
}

/// Every nonempty set of at most `k` rows, and of at most `k` columns.
pub fn pure_sets(rows: usize, cols: usize, k: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    for (side, n) in [(Side::Row, rows), (Side::Col, cols)] {
        for mask in 1u32..(1 << n) {
            if mask.count_ones() as usize <= k {
                out.push((0..n).filter(|i| mask >> i & 1 == 1).map(|index| Vertex { side, index }).collect());
            }
        }
    }
    out
}
