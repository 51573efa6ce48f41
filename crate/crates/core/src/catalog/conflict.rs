//! The conflict graph of satisfying partial assignments of 2-XOR clauses.

use super::graph::{all_pairs, Assignment, Graph, VertexSet};
use std::fmt;

/// `x_i = vi, x_j = vj` for a pair `i < j`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialAssignment {
    pub i: usize,
    pub j: usize,
    pub vi: bool,
    pub vj: bool,
}

impl PartialAssignment {
    pub fn compatible(&self, other: &PartialAssignment) -> bool {
        let get = |p: &PartialAssignment, v: usize| {
            if p.i == v {
                Some(p.vi)
            } else if p.j == v {
                Some(p.vj)
            } else {
                None
            }
        };
        [self.i, self.j]
            .into_iter()
            .all(|v| match (get(self, v), get(other, v)) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            })
    }

    /// Whether the full assignment `s` extends this partial one.
    pub fn agrees_with(&self, s: &Assignment) -> bool {
        s.0[self.i] == self.vi && s.0[self.j] == self.vj
    }
}

impl fmt::Debug for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}={},x{}={}", self.i, self.vi as u8, self.j, self.vj as u8)
    }
}

/// Vertices of the conflict graph: for each pair `i < j` the assignments
/// `(0, 1)` then `(1, 0)`, so vertex `2t` and `2t + 1` belong to pair `t`.
pub fn conflict_vertices(n: usize) -> Vec<PartialAssignment> {
    all_pairs(n)
        .into_iter()
        .flat_map(|(i, j)| {
            [(false, true), (true, false)].map(|(vi, vj)| PartialAssignment { i, j, vi, vj })
        })
        .collect()
}

/// Conflict graph on `conflict_vertices(n)`: edges join incompatible assignments.
pub fn conflict_graph(n: usize) -> Graph {
    let vs = conflict_vertices(n);
    let mut edges = Vec::new();
    for a in 0..vs.len() {
        for b in a + 1..vs.len() {
            if !vs[a].compatible(&vs[b]) {
                edges.push((a, b));
            }
        }
    }
    Graph { n: vs.len(), edges }
}

/// `V(H(K))`: the conflict-graph vertices whose pair is an edge of `k`.
pub fn image_vertices(k: &Graph) -> VertexSet {
    let pairs = all_pairs(k.n);
    VertexSet::from_iter(
        pairs
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| k.has_edge(i, j))
            .flat_map(|(t, _)| [2 * t, 2 * t + 1]),
    )
}

/// Conflict-graph vertices compatible with the full assignment `s`.
pub fn compatible_with(n: usize, s: &Assignment) -> VertexSet {
    VertexSet::from_iter(
        conflict_vertices(n)
            .iter()
            .enumerate()
            .filter(|(_, p)| p.agrees_with(s))
            .map(|(t, _)| t),
    )
}

/// Conflict-graph vertices incompatible with `s`.
pub fn incompatible_with(n: usize, s: &Assignment) -> VertexSet {
    let all = VertexSet::full(2 * all_pairs(n).len());
    VertexSet(all.0 & !compatible_with(n, s).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::graph::all_graphs;

    #[test]
    fn small_conflict_graphs() {
        let g2 = conflict_graph(2);
        assert_eq!(g2.n, 2);
        assert_eq!(g2.edges, vec![(0, 1)]);
        assert_eq!(conflict_graph(3).n, 6);
        let a = PartialAssignment { i: 0, j: 1, vi: true, vj: false };
        let b = PartialAssignment { i: 0, j: 2, vi: true, vj: false };
        assert!(a.compatible(&b));
    }

    #[test]
    fn degree_bound_on_images() {
        let cg = conflict_graph(4);
        for k in all_graphs(4) {
            let d = k.max_degree();
            let h = cg.induced(image_vertices(&k));
            assert_eq!(image_vertices(&k).len(), 2 * k.num_edges());
            if d > 0 {
                assert!(h.max_degree() <= 2 * d - 1, "{k:?}");
            }
        }
    }
}
