//! Small graphs, vertex sets, assignments and the combinatorial objects built on them.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A simple undirected graph on `0..n`; edges stored as sorted `(i, j)` with `i < j`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidProblem(format!("loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidProblem(format!("edge ({a}, {b}) outside 0..{n}")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        let len = out.len();
        out.dedup();
        if out.len() != len {
            return Err(Error::InvalidProblem("multi-edge".into()));
        }
        Ok(Graph { n, edges: out })
    }

    pub fn empty(n: usize) -> Graph {
        Graph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Graph {
        Graph {
            n,
            edges: all_pairs(n),
        }
    }

    /// The graph whose edges are the pairs of `all_pairs(n)` selected by `mask`.
    pub fn from_pair_mask(n: usize, mask: u64) -> Graph {
        let edges = all_pairs(n)
            .into_iter()
            .enumerate()
            .filter(|(t, _)| mask >> t & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        Graph { n, edges }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Number of edges with endpoints on different sides of `s`.
    pub fn cut_value(&self, s: &Assignment) -> usize {
        self.edges.iter().filter(|&&(a, b)| s.0[a] != s.0[b]).count()
    }

    /// Subgraph induced on `set`, keeping the vertex numbering.
    pub fn induced(&self, set: VertexSet) -> Graph {
        Graph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(a, b)| set.contains(a) && set.contains(b))
                .collect(),
        }
    }

    pub fn is_independent(&self, set: VertexSet) -> bool {
        self.edges.iter().all(|&(a, b)| !(set.contains(a) && set.contains(b)))
    }

    pub fn is_vertex_cover(&self, set: VertexSet) -> bool {
        self.edges.iter().all(|&(a, b)| set.contains(a) || set.contains(b))
    }

    /// Independence number by enumeration over subsets of `within`.
    pub fn independence_number(&self, within: VertexSet) -> usize {
        subsets_of(within)
            .filter(|&s| self.is_independent(s))
            .map(VertexSet::len)
            .max()
            .unwrap_or(0)
    }

    /// Minimum vertex cover of the subgraph induced on `within`, by enumeration.
    pub fn min_vertex_cover(&self, within: VertexSet) -> usize {
        let h = self.induced(within);
        subsets_of(within)
            .filter(|&s| h.is_vertex_cover(s))
            .map(VertexSet::len)
            .min()
            .unwrap_or(0)
    }

    /// Maximum cut value by enumeration over all assignments.
    pub fn max_cut(&self) -> usize {
        all_assignments(self.n).map(|s| self.cut_value(&s)).max().unwrap_or(0)
    }

    /// Matching number by enumeration over edge subsets.
    pub fn matching_number(&self) -> usize {
        fn go(edges: &[(usize, usize)], used: u64) -> usize {
            match edges.split_first() {
                None => 0,
                Some((&(a, b), rest)) => {
                    let skip = go(rest, used);
                    if used >> a & 1 == 0 && used >> b & 1 == 0 {
                        skip.max(1 + go(rest, used | 1 << a | 1 << b))
                    } else {
                        skip
                    }
                }
            }
        }
        go(&self.edges, 0)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}[", self.n)?;
        for (t, (a, b)) in self.edges.iter().enumerate() {
            if t > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}-{b}")?;
        }
        f.write_str("]")
    }
}

/// All pairs `(i, j)`, `i < j < n`, in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Every simple graph on `0..n` (edge-mask order).
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let m = n * n.saturating_sub(1) / 2;
    assert!(m < 64, "too many vertex pairs");
    (0..1u64 << m).map(move |mask| Graph::from_pair_mask(n, mask))
}

/// A graph whose edges carry rational weights (aligned with `base.edges`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightedGraph {
    pub base: Graph,
    pub weights: Vec<Rational>,
}

impl WeightedGraph {
    pub fn new(base: Graph, weights: Vec<Rational>) -> Result<WeightedGraph> {
        if weights.len() != base.edges.len() {
            return Err(Error::InvalidProblem("one weight per edge required".into()));
        }
        if weights.iter().any(|w| w < &rational::zero()) {
            return Err(Error::InvalidProblem("negative edge weight".into()));
        }
        Ok(WeightedGraph { base, weights })
    }

    pub fn uniform(base: Graph) -> WeightedGraph {
        let weights = vec![rational::one(); base.edges.len()];
        WeightedGraph { base, weights }
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<&Rational> {
        self.base
            .edges
            .binary_search(&(a.min(b), a.max(b)))
            .ok()
            .map(|t| &self.weights[t])
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn cut_weight(&self, s: &Assignment) -> Rational {
        self.base
            .edges
            .iter()
            .zip(&self.weights)
            .filter(|((a, b), _)| s.0[*a] != s.0[*b])
            .map(|(_, w)| w)
            .sum()
    }
}

impl fmt::Debug for WeightedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}[", self.base.n)?;
        for (t, ((a, b), w)) in self.base.edges.iter().zip(&self.weights).enumerate() {
            if t > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}-{b}:{}", rational::format(w))?;
        }
        f.write_str("]")
    }
}

/// Every weighting of every subgraph of `K_n` with weights drawn from `palette`.
pub fn all_weighted_graphs(n: usize, palette: &[Rational]) -> Vec<WeightedGraph> {
    let mut out = Vec::new();
    for g in all_graphs(n) {
        let m = g.edges.len();
        let mut idx = vec![0usize; m];
        loop {
            out.push(WeightedGraph {
                base: g.clone(),
                weights: idx.iter().map(|&t| palette[t].clone()).collect(),
            });
            // odometer over palette indices
            let mut pos = 0;
            while pos < m && idx[pos] + 1 == palette.len() {
                idx[pos] = 0;
                pos += 1;
            }
            if pos == m {
                break;
            }
            idx[pos] += 1;
        }
    }
    out
}

/// A set of vertices as a bitmask (vertex `v` present iff bit `v` is set).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub fn from_iter(vs: impl IntoIterator<Item = usize>) -> VertexSet {
        VertexSet(vs.into_iter().fold(0, |m, v| m | 1 << v))
    }

    pub fn full(n: usize) -> VertexSet {
        VertexSet(if n == 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersect(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&v| self.contains(v))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", vs.join(","))
    }
}

/// Every subset of `set`, in increasing mask order.
pub fn subsets_of(set: VertexSet) -> impl Iterator<Item = VertexSet> {
    // standard submask enumeration, collected ascending
    let mut subs = Vec::with_capacity(1 << set.len());
    let mut sub = 0u64;
    loop {
        subs.push(VertexSet(sub));
        if sub == set.0 {
            break;
        }
        sub = (sub.wrapping_sub(set.0)) & set.0;
    }
    subs.into_iter()
}

/// A 0/1 assignment to `n` variables (equivalently a cut of `0..n`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn from_bits(bits: &[u8]) -> Assignment {
        Assignment(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All `2^n` assignments in lexicographic order.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Assignment> {
    assert!(n < 32, "too many variables");
    (0..1u64 << n).map(move |m| Assignment((0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect()))
}

/// A partition of `0..n` into cells labelled `0..k`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(pub Vec<u8>);

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A perfect matching, edges sorted with `i < j`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerfectMatching(pub Vec<(usize, usize)>);

impl PerfectMatching {
    pub fn shared_edges(&self, g: &Graph) -> usize {
        self.0.iter().filter(|&&(a, b)| g.has_edge(a, b)).count()
    }
}

impl fmt::Debug for PerfectMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<String> = self.0.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "M[{}]", es.join(" "))
    }
}

/// All perfect matchings of `K_n` (`n` even).
pub fn all_perfect_matchings(n: usize) -> Vec<PerfectMatching> {
    fn go(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<PerfectMatching>) {
        if free.is_empty() {
            let mut m = cur.clone();
            m.sort_unstable();
            out.push(PerfectMatching(m));
            return;
        }
        let a = free.remove(0);
        for t in 0..free.len() {
            let b = free.remove(t);
            cur.push((a, b));
            go(free, cur, out);
            cur.pop();
            free.insert(t, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    if n % 2 == 0 {
        go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// A Hamiltonian cycle of `K_n`, stored as the lexicographically smallest
/// vertex sequence among its rotations and reflections.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle(pub Vec<usize>);

impl Cycle {
    /// Canonicalizes an arbitrary cyclic vertex sequence.
    pub fn canonical(seq: &[usize]) -> Cycle {
        let n = seq.len();
        let start = (0..n).min_by_key(|&t| seq[t]).unwrap_or(0);
        let fwd: Vec<usize> = (0..n).map(|t| seq[(start + t) % n]).collect();
        let bwd: Vec<usize> = (0..n).map(|t| seq[(start + n - t) % n]).collect();
        Cycle(fwd.min(bwd))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.0.len();
        (0..n).map(move |t| {
            let (a, b) = (self.0[t], self.0[(t + 1) % n]);
            (a.min(b), a.max(b))
        })
    }

    pub fn weight_in(&self, g: &WeightedGraph) -> Rational {
        self.edges().filter_map(|(a, b)| g.weight(a, b)).sum()
    }
}

impl fmt::Debug for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "C({})", vs.join(" "))
    }
}

/// All `(n-1)!/2` Hamiltonian cycles of `K_n`, `n >= 3`, in canonical form and order.
pub fn all_hamiltonian_cycles(n: usize) -> Vec<Cycle> {
    fn go(n: usize, seq: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Cycle>) {
        if seq.len() == n {
            if seq[1] < seq[n - 1] {
                out.push(Cycle(seq.clone()));
            }
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                seq.push(v);
                go(n, seq, used, out);
                seq.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    if n >= 3 {
        let mut used = vec![false; n];
        used[0] = true;
        go(n, &mut vec![0], &mut used, &mut out);
    }
    out
}
