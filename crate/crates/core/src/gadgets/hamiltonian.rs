//! Perfect matchings of `K_{2n}` into max-weight Hamiltonian cycles of
//! `K_{4n}`. Vertex `(side, j)` of `{0, 1} × [2n]` is numbered `side · 2n + j`.

use super::{GadgetNotes, GadgetResult};
use crate::catalog::{
    all_perfect_matchings, build_matching, hamiltonian_problem, Cycle, Graph, PerfectMatching, WeightedGraph,
};
use crate::error::{Error, Result};
use crate::problem::{exact_guarantees, sound_instances, Problem};
use crate::rational::{int, Rational};
use crate::reduce::{InstanceImage, Reduction, Term};
use std::collections::BTreeMap;
use std::sync::Arc;

pub fn tilde_vertex(side: usize, j: usize, n2: usize) -> usize {
    side * n2 + j
}

/// `G̃`: weight 2 on the rungs `{(0,j),(1,j)}`, 1 on the clique over side 1
/// and 1 on the side-0 copies of the edges of `G`.
pub fn tilde_graph(g: &Graph, n2: usize) -> WeightedGraph {
    let mut w: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for j in 0..n2 {
        w.insert((tilde_vertex(0, j, n2), tilde_vertex(1, j, n2)), int(2));
        for k in j + 1..n2 {
            w.insert((tilde_vertex(1, j, n2), tilde_vertex(1, k, n2)), int(1));
        }
    }
    for &(a, b) in &g.edges {
        w.insert((tilde_vertex(0, a, n2), tilde_vertex(0, b, n2)), int(1));
    }
    let base = Graph::new(2 * n2, w.keys().copied()).expect("edges are in range");
    WeightedGraph::new(base, w.into_values().collect()).expect("weights are positive")
}

fn partner(m: &PerfectMatching, v: usize) -> usize {
    m.0.iter()
        .find_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
        .expect("perfect matching covers every vertex")
}

/// `C_M`: the rungs, `M` on side 0 and the first perfect matching of side 1
/// (in canonical order) that closes them into a single Hamiltonian cycle.
pub fn completion_cycle(m: &PerfectMatching, n2: usize) -> Cycle {
    for m1 in all_perfect_matchings(n2) {
        let mut seq = Vec::with_capacity(2 * n2);
        let mut cur = 0;
        loop {
            let a = partner(m, cur);
            seq.extend([tilde_vertex(0, cur, n2), tilde_vertex(0, a, n2), tilde_vertex(1, a, n2)]);
            let b = partner(&m1, a);
            seq.push(tilde_vertex(1, b, n2));
            cur = b;
            if cur == 0 || seq.len() >= 2 * n2 {
                break;
            }
        }
        if cur == 0 && seq.len() == 2 * n2 {
            return Cycle::canonical(&seq);
        }
    }
    unreachable!("a cyclic shift of M always closes the cycle")
}

/// The per-cycle quantities of the upper-bound argument: restricted to side
/// 0, the cycle splits into `k` paths inside `G`, `l` paths using a non-edge
/// of `G` and `m` isolated vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBounds {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub side0_edges: usize,
    pub side1_edges: usize,
    pub crossing_edges: usize,
    pub side0_weight: Rational,
    pub side1_weight: Rational,
    pub crossing_weight: Rational,
}

impl CycleBounds {
    pub fn total(&self) -> Rational {
        &self.side0_weight + &self.side1_weight + &self.crossing_weight
    }
}

pub fn cycle_bounds(c: &Cycle, g: &Graph, n2: usize) -> CycleBounds {
    let gt = tilde_graph(g, n2);
    let mut adj = vec![Vec::new(); n2];
    let (mut side0_edges, mut side1_edges, mut crossing_edges) = (0, 0, 0);
    let (mut side0_weight, mut side1_weight, mut crossing_weight) = (int(0), int(0), int(0));
    for (a, b) in c.edges() {
        let w = gt.weight(a, b).cloned().unwrap_or_else(|| int(0));
        match (a < n2, b < n2) {
            (true, true) => {
                adj[a].push(b);
                adj[b].push(a);
                side0_edges += 1;
                side0_weight += w;
            }
            (false, false) => {
                side1_edges += 1;
                side1_weight += w;
            }
            _ => {
                crossing_edges += 1;
                crossing_weight += w;
            }
        }
    }
    let (mut k, mut l, mut m) = (0, 0, 0);
    let mut seen = vec![false; n2];
    for start in 0..n2 {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let (mut size, mut inside) = (0, true);
        while let Some(v) = stack.pop() {
            size += 1;
            for &u in &adj[v] {
                inside &= g.has_edge(u, v);
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        match (size, inside) {
            (1, _) => m += 1,
            (_, true) => k += 1,
            _ => l += 1,
        }
    }
    CycleBounds {
        k,
        l,
        m,
        side0_edges,
        side1_edges,
        crossing_edges,
        side0_weight,
        side1_weight,
        crossing_weight,
    }
}

/// Matching on `K_{n2}` to max-weight Hamiltonian cycle on `K_{2 n2}` with
/// `β(G) = G̃`, `γ(M) = C_M` and the constant shift `5n = 5 n2 / 2`; both
/// problems carry exact guarantees.
pub fn matching_to_hamiltonian(n2: usize) -> Result<GadgetResult> {
    let p1 = build_matching(n2)?;
    let g1 = exact_guarantees(&p1)?;
    let images: Vec<WeightedGraph> = p1.instances().iter().map(|g| tilde_graph(g, n2)).collect();
    let p2 = hamiltonian_problem(2 * n2, images.clone())?;
    let g2 = exact_guarantees(&p2)?;
    let shift = int(5 * (n2 / 2) as i64);
    let beta = sound_instances(&p1, &g1)
        .into_iter()
        .map(|f| {
            let t = p2
                .instance_index(&images[f.0])
                .ok_or_else(|| Error::Shape("tilde graph is not a target instance".into()))?;
            Ok(InstanceImage {
                source: f.0,
                terms: vec![Term::unit(t)],
                shift: -shift.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma = p1
        .solutions()
        .iter()
        .map(|m| {
            let c = completion_cycle(m, n2);
            p2.solution_index(&c)
                .map(|s| vec![Term::unit(s)])
                .ok_or_else(|| Error::Shape(format!("{c:?} is not a Hamiltonian cycle")))
        })
        .collect::<Result<Vec<_>>>()?;
    let reduction = Reduction::new(&p1, &g1, &p2, &g2, beta, gamma)?;
    let mut notes = GadgetNotes::new("weighted doubling of K_2n: Matching to max-weight Hamiltonian cycle");
    notes.set("alpha", &int(1));
    notes.set("mu", &shift);
    notes.set_count("target_cycles", p2.num_solutions());
    GadgetResult {
        name: "matching-to-hamiltonian".into(),
        source: Arc::new(p1),
        source_guarantees: g1,
        target: Arc::new(p2),
        target_guarantees: g2,
        reduction,
        notes,
    }
    .certified()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::graph::all_graphs;
    use crate::catalog::{all_hamiltonian_cycles, Graph};

    fn nu(g: &Graph) -> usize {
        g.matching_number()
    }

    #[test]
    fn completion_weight_and_example() {
        let g = Graph::new(4, [(0, 1)]).unwrap();
        let m = PerfectMatching(vec![(0, 1), (2, 3)]);
        let c = completion_cycle(&m, 4);
        assert_eq!(c.weight_in(&tilde_graph(&g, 4)), int(11));
        for g in all_graphs(4) {
            for m in all_perfect_matchings(4) {
                let c = completion_cycle(&m, 4);
                assert_eq!(c.weight_in(&tilde_graph(&g, 4)), int(10 + m.shared_edges(&g) as i64));
            }
        }
    }

    #[test]
    fn per_cycle_bounds_hold_individually() {
        let n = 2;
        let cycles = all_hamiltonian_cycles(8);
        assert_eq!(cycles.len(), 2520);
        for g in all_graphs(4) {
            let gt = tilde_graph(&g, 4);
            let mut best = int(0);
            for c in &cycles {
                let b = cycle_bounds(c, &g, 4);
                let (k, l, m) = (b.k, b.l, b.m);
                assert!(k <= nu(&g) && k + l <= n);
                assert_eq!(b.side0_edges, 2 * n - (k + l + m));
                assert_eq!(b.side1_edges, 2 * n - (k + l + m));
                assert_eq!(b.crossing_edges, 2 * (k + l + m));
                assert!(b.side0_weight <= int((2 * n - k - 2 * l - m) as i64));
                assert_eq!(b.side1_weight, int((2 * n - (k + l + m)) as i64));
                assert!(b.crossing_weight <= int((4 * k + 4 * l + 2 * m) as i64));
                assert_eq!(b.total(), c.weight_in(&gt));
                assert!(b.total() <= int((4 * n + 2 * k + l) as i64));
                best = best.max(b.total());
            }
            assert_eq!(best, int(10 + nu(&g) as i64), "{g:?}");
        }
    }

    #[test]
    fn gadget_certifies() {
        let g = matching_to_hamiltonian(4).unwrap();
        let r = g.certify().unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.target_solutions, 2520);
        assert_eq!(r.source_sound_instances, 64);
    }
}
