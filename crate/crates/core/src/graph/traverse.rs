use std::collections::BTreeSet;

use serde::Serialize;

use super::{EdgeKey, GraphError, MixedGraph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    Connected,
    Strong,
}

/// A partition of the vertex set into blocks.
///
/// Blocks are sorted internally and ordered by their smallest vertex, so two
/// partitions of the same graph compare equal regardless of traversal order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentPartition {
    pub blocks: Vec<Vec<Vertex>>,
    pub kind: PartitionKind,
}

impl ComponentPartition {
    fn from_labels(g: &MixedGraph, label: &[usize], kind: PartitionKind) -> Self {
        let count = label.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (id, &l) in label.iter().enumerate() {
            blocks[l].push(g.vertex_at(id));
        }
        for b in &mut blocks {
            b.sort();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        ComponentPartition { blocks, kind }
    }

    pub fn block_of(&self, v: Vertex) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&v).is_ok())
    }

    /// Dense block index for every dense vertex id of `g`.
    pub fn labels(&self, g: &MixedGraph) -> Vec<usize> {
        let mut out = vec![usize::MAX; g.vertex_count()];
        for (i, b) in self.blocks.iter().enumerate() {
            for &v in b {
                out[g.dense(v)] = i;
            }
        }
        out
    }

    pub fn nonsingleton(&self) -> impl Iterator<Item = &Vec<Vertex>> {
        self.blocks.iter().filter(|b| b.len() > 1)
    }
}

/// Components of the graph with edge directions ignored.
pub fn connected_components(g: &MixedGraph) -> ComponentPartition {
    let adj = g.blind_adjacency();
    let n = g.vertex_count();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &(w, _) in &adj[u] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    ComponentPartition::from_labels(g, &label, PartitionKind::Connected)
}

/// Strong components, treating an undirected edge as a pair of opposite arcs.
///
/// Iterative Tarjan; the arc expansion is sound here because two vertices
/// share a strong component iff some traversable closed walk visits both.
pub fn strong_components(g: &MixedGraph) -> ComponentPartition {
    let adj = g.arc_adjacency();
    let n = g.vertex_count();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut label = vec![usize::MAX; n];
    let mut counter = 0;
    let mut components = 0;
    // (vertex, next neighbour position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            if *pos < adj[u].len() {
                let w = adj[u][*pos].0;
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[u] = low[u].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    label[w] = components;
                    if w == u {
                        break;
                    }
                }
                components += 1;
            }
        }
    }
    ComponentPartition::from_labels(g, &label, PartitionKind::Strong)
}

/// Edges whose removal increases the number of direction-blind components.
pub fn direction_blind_bridges(g: &MixedGraph) -> BTreeSet<EdgeKey> {
    let adj = g.blind_adjacency();
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut bridges = BTreeSet::new();
    let mut time = 0;
    // (vertex, edge used to enter it, next neighbour position)
    let mut call: Vec<(usize, Option<EdgeKey>, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        call.push((root, None, 0));
        while let Some(&mut (u, via, ref mut pos)) = call.last_mut() {
            if *pos < adj[u].len() {
                let (w, key) = adj[u][*pos];
                *pos += 1;
                if Some(key) == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    call.push((w, Some(key), 0));
                } else {
                    low[u] = low[u].min(disc[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
                if low[u] > disc[parent] {
                    bridges.insert(via.expect("non-root vertex entered by an edge"));
                }
            }
        }
    }
    bridges
}

/// Vertices reachable from `v` along edge directions.
pub fn traversable_reachable(g: &MixedGraph, v: Vertex) -> Result<BTreeSet<Vertex>, GraphError> {
    if !g.contains_vertex(v) {
        return Err(GraphError::UnknownVertex(v));
    }
    let adj = g.arc_adjacency();
    let seen = reach_dense(&adj, g.dense(v), None);
    Ok(seen
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(id, _)| g.vertex_at(id))
        .collect())
}

/// Dense reachability over `adj`, optionally ignoring one edge.
pub(crate) fn reach_dense(adj: &[Vec<(usize, EdgeKey)>], from: usize, skip: Option<EdgeKey>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for &(w, key) in &adj[u] {
            if Some(key) == skip || seen[w] {
                continue;
            }
            seen[w] = true;
            stack.push(w);
        }
    }
    seen
}

/// Number of direction-blind components among `vertices` using only edges
/// with both endpoints in `vertices`, with `removed` edges skipped.
pub(crate) fn count_components_within(
    g: &MixedGraph,
    vertices: &[Vertex],
    removed: &BTreeSet<EdgeKey>,
) -> usize {
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    for &v in vertices {
        inside[g.dense(v)] = true;
    }
    let adj = g.blind_adjacency();
    let mut seen = vec![false; n];
    let mut count = 0;
    for &v in vertices {
        let s = g.dense(v);
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(w, key) in &adj[u] {
                if inside[w] && !seen[w] && !removed.contains(&key) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::sample;
    use super::super::{Edge, Orientation};
    use super::*;

    fn all(g: &MixedGraph) -> Vec<Vertex> {
        g.vertices().collect()
    }

    #[test]
    fn sample_is_one_block_both_ways() {
        let g = sample();
        assert_eq!(connected_components(&g).blocks, vec![all(&g)]);
        assert_eq!(strong_components(&g).blocks, vec![all(&g)]);
        assert!(direction_blind_bridges(&g).is_empty());
        assert_eq!(traversable_reachable(&g, Vertex::row(0)).unwrap().len(), 6);
    }

    #[test]
    fn edgeless_graph_is_all_singletons() {
        let g = MixedGraph::new(3, 3);
        assert_eq!(connected_components(&g).blocks.len(), 6);
        assert_eq!(strong_components(&g).blocks.len(), 6);
    }

    #[test]
    fn two_disjoint_cycles() {
        let g = MixedGraph::from_edges(
            4,
            4,
            [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)]
                .map(|(r, c)| Edge::undirected(r, c)),
        )
        .unwrap();
        let p = connected_components(&g);
        assert_eq!(p.blocks.len(), 2);
        assert!(p.blocks.iter().all(|b| b.len() == 4));
        assert!(direction_blind_bridges(&g).is_empty());
    }

    #[test]
    fn single_arc_versus_single_undirected_edge() {
        let arc = MixedGraph::from_edges(1, 1, [Edge::row_to_col(0, 0)]).unwrap();
        assert_eq!(strong_components(&arc).blocks.len(), 2);
        assert_eq!(
            traversable_reachable(&arc, Vertex::col(0)).unwrap(),
            BTreeSet::from([Vertex::col(0)])
        );
        let edge = MixedGraph::from_edges(1, 1, [Edge::undirected(0, 0)]).unwrap();
        assert_eq!(strong_components(&edge).blocks.len(), 1);
        assert_eq!(
            traversable_reachable(&edge, Vertex::col(0)).unwrap(),
            BTreeSet::from([Vertex::row(0), Vertex::col(0)])
        );
    }

    #[test]
    fn path_has_two_bridges() {
        let g = MixedGraph::from_edges(2, 1, [Edge::undirected(0, 0), Edge::undirected(1, 0)]).unwrap();
        assert_eq!(
            direction_blind_bridges(&g),
            BTreeSet::from([EdgeKey::new(0, 0), EdgeKey::new(1, 0)])
        );
        let cycle = MixedGraph::complete(2, 2, |_, _| Orientation::Undirected);
        assert!(direction_blind_bridges(&cycle).is_empty());
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        let g = MixedGraph::new(1, 1);
        assert_eq!(
            traversable_reachable(&g, Vertex::row(4)),
            Err(GraphError::UnknownVertex(Vertex::row(4)))
        );
    }
}
