//! MaxCUT into MaxMULTICUT-k by gluing copies of an almost complete graph
//! on `k + 2` vertices between pairs of original and extra vertices.
//!
//! Vertex layout: `0..n` are the graph vertices, `n..n + k - 2` the extra
//! ("negative") vertices, one per extra cell. Each anchor pair owns a fixed
//! number of copy slots and `β(G)` fills the first `n_ij` of them, so every
//! image lives on the same vertex set.

use super::{simple_gadget, GadgetResult};
use crate::catalog::{build_maxcut, multicut_problem, Assignment, Graph, Partition};
use crate::error::{Error, Result};
use crate::rational::int;
use crate::reduce::SimpleParams;
use num_traits::One;

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, t| acc * (n - t) / (t + 1))
}

/// `c(k) = [C(k-2, 2) + 2(k-2)] (C(k+2, 2) - 3)`: the closed-form per-edge shift,
/// which leaves out the copy placed on the edge itself.
pub fn nominal_shift(k: usize) -> usize {
    (binom(k - 2, 2) + 2 * (k - 2)) * (binom(k + 2, 2) - 3)
}

fn edges_per_copy(k: usize) -> usize {
    binom(k + 2, 2) - 3
}

fn copies_per_edge(k: usize) -> usize {
    1 + 2 * (k - 2) + binom(k - 2, 2)
}

/// An uncut source edge leaves three copy edges uncut under `γ`, so the
/// cut value enters with weight 3.
pub fn multicut_alpha() -> usize {
    3
}

/// `μ` per source edge: `|E(β(G))| / |E(G)| - α`.
pub fn multicut_mu(k: usize) -> usize {
    edges_per_copy(k) * copies_per_edge(k) - multicut_alpha()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PairKind {
    Edge,
    Extra,
    Mixed,
}

/// One copy slot between anchors `a < b`; its `k` own vertices are
/// `base` (the `(a)` vertex), `base + 1` (the `(b)` vertex) and
/// `base + 2 ..` (the remaining `k - 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub a: usize,
    pub b: usize,
    pub copy: usize,
    pub base: usize,
    kind: PairKind,
}

#[derive(Debug, Clone)]
pub struct MulticutLayout {
    pub n: usize,
    pub k: usize,
    pub slots: Vec<Slot>,
    pub vertices: usize,
}

/// Copy slots: one per pair of graph vertices, `C(n, 2)` per pair of extra
/// vertices (the most edges a graph can have), and `n - 1` per mixed pair
/// (the largest degree).
pub fn multicut_layout(n: usize, k: usize) -> Result<MulticutLayout> {
    if k < 3 || n < 2 {
        return Err(Error::InvalidProblem("the multicut gadget needs k >= 3 and n >= 2".into()));
    }
    let extra = k - 2;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j, PairKind::Edge, 1));
        }
    }
    for a in 0..extra {
        for b in a + 1..extra {
            pairs.push((n + a, n + b, PairKind::Extra, binom(n, 2)));
        }
    }
    for i in 0..n {
        for a in 0..extra {
            pairs.push((i, n + a, PairKind::Mixed, n - 1));
        }
    }
    let mut slots = Vec::new();
    let mut next = n + extra;
    for (a, b, kind, count) in pairs {
        for copy in 0..count {
            slots.push(Slot { a, b, copy, base: next, kind });
            next += k;
        }
    }
    Ok(MulticutLayout {
        n,
        k,
        slots,
        vertices: next,
    })
}

impl MulticutLayout {
    /// `n_ij` for the pair of `slot` under the graph `g`.
    fn copies(&self, g: &Graph, slot: &Slot) -> usize {
        match slot.kind {
            PairKind::Edge => g.has_edge(slot.a, slot.b) as usize,
            PairKind::Extra => g.num_edges(),
            PairKind::Mixed => g.degree(slot.a),
        }
    }

    fn used_slots<'a>(&'a self, g: &'a Graph) -> impl Iterator<Item = &'a Slot> + 'a {
        self.slots.iter().filter(move |s| s.copy < self.copies(g, s))
    }

    /// Edges of one copy: all pairs among `a, b` and the slot's vertices
    /// except `{a, (a)}`, `{a, b}` and `{b, (b)}`.
    fn copy_edges(&self, s: &Slot) -> Vec<(usize, usize)> {
        let mut vs = vec![s.a, s.b];
        vs.extend(s.base..s.base + self.k);
        let mut out = Vec::new();
        for x in 0..vs.len() {
            for y in x + 1..vs.len() {
                let (u, v) = (vs[x], vs[y]);
                let skip = (u == s.a && v == s.base) || (u == s.a && v == s.b) || (u == s.b && v == s.base + 1);
                if !skip {
                    out.push((u.min(v), u.max(v)));
                }
            }
        }
        out
    }
}

/// `β(G)` on the layout's vertex set.
pub fn multicut_image(layout: &MulticutLayout, g: &Graph) -> Graph {
    let edges: Vec<_> = layout.used_slots(g).flat_map(|s| layout.copy_edges(s)).collect();
    Graph::new(layout.vertices, edges).expect("copies are edge-disjoint")
}

/// `γ(p)`: graph vertices keep their side (cells 0, 1), extra vertex `c`
/// gets cell `2 + c`, `(a)` and `(b)` follow their anchors and the remaining
/// copy vertices take the lowest free cells in order.
pub fn multicut_partition(layout: &MulticutLayout, p: &Assignment) -> Partition {
    let k = layout.k;
    let mut cells = vec![0u8; layout.vertices];
    for i in 0..layout.n {
        cells[i] = p.0[i] as u8;
    }
    for c in 0..k - 2 {
        cells[layout.n + c] = (2 + c) as u8;
    }
    for s in &layout.slots {
        let (ca, cb) = (cells[s.a], cells[s.b]);
        cells[s.base] = ca;
        cells[s.base + 1] = cb;
        let free = (0..k as u8).filter(|&c| c != ca && c != cb);
        for (t, c) in free.take(k - 2).enumerate() {
            cells[s.base + 2 + t] = c;
        }
    }
    Partition(cells)
}

/// Exact maximum multicut of `β(G)` without enumerating all partitions:
/// copies only touch their two anchors, so for every anchor colouring each
/// copy is optimized on its own.
pub fn max_multicut_decomposed(layout: &MulticutLayout, g: &Graph) -> usize {
    let k = layout.k;
    let anchors = layout.n + k - 2;
    // best[ca][cb]: most cut edges in one copy with anchors in cells ca, cb
    let probe = Slot {
        a: 0,
        b: 1,
        copy: 0,
        base: 2,
        kind: PairKind::Edge,
    };
    let probe_edges = layout.copy_edges(&probe);
    let mut best = vec![vec![0usize; k]; k];
    for (ca, row) in best.iter_mut().enumerate() {
        for (cb, entry) in row.iter_mut().enumerate() {
            let mut cells = vec![0usize; k + 2];
            cells[0] = ca;
            cells[1] = cb;
            for code in 0..k.pow(k as u32) {
                let mut c = code;
                for v in 0..k {
                    cells[2 + v] = c % k;
                    c /= k;
                }
                let cut = probe_edges.iter().filter(|&&(u, v)| cells[u] != cells[v]).count();
                *entry = (*entry).max(cut);
            }
        }
    }
    let used: Vec<&Slot> = layout.used_slots(g).collect();
    let mut cells = vec![0usize; anchors];
    let mut out = 0;
    for code in 0..k.pow(anchors as u32) {
        let mut c = code;
        for cell in cells.iter_mut() {
            *cell = c % k;
            c /= k;
        }
        let total: usize = used.iter().map(|s| best[cells[s.a]][cells[s.b]]).sum();
        out = out.max(total);
    }
    out
}

/// MaxCUT on `n` vertices to MaxMULTICUT-k on the copy layout, with
/// `val_β(G)[γ(p)] = 3 cut_G(p) + μ_k |E(G)|` and `|E(β(G))| = (3 + μ_k)|E(G)|`.
/// Only tiny `n` fit: the target enumerates all `k^m` partitions.
pub fn maxcut_to_multicut(n: usize, k: usize) -> Result<GadgetResult> {
    let layout = multicut_layout(n, k)?;
    let p1 = build_maxcut(n, None)?;
    let images: Vec<Graph> = p1.instances().iter().map(|g| multicut_image(&layout, g)).collect();
    let p2 = multicut_problem(layout.vertices, k, images)?;
    let params = SimpleParams {
        alpha: int(multicut_alpha() as i64),
        mu: int(multicut_mu(k) as i64),
        size_ratio: None,
        tau1: One::one(),
        sigma1: One::one(),
    };
    let mut g = simple_gadget(
        "maxcut-to-multicut",
        "copies of an almost complete graph on k + 2 vertices: MaxCUT to MaxMULTICUT-k",
        p1,
        p2,
        |g| multicut_image(&layout, g),
        |p| multicut_partition(&layout, p),
        params,
    )?;
    g.notes.set_count("k", k);
    g.notes.set_count("nominal_shift", nominal_shift(k));
    g.notes.set_count("edges_per_source_edge", edges_per_copy(k) * copies_per_edge(k));
    g.notes.set_count("target_vertices", layout.vertices);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::graph::{all_assignments, all_graphs};
    use crate::catalog::multicut_value;

    #[test]
    fn constants() {
        assert_eq!(nominal_shift(3), 14);
        assert_eq!(edges_per_copy(3), 7);
        assert_eq!(copies_per_edge(3), 3);
        assert_eq!(multicut_mu(3), 18);
        assert_eq!(nominal_shift(4), 60);
    }

    #[test]
    fn k2_image_has_three_copies() {
        let layout = multicut_layout(2, 3).unwrap();
        assert_eq!(layout.vertices, 12);
        let g = Graph::complete(2);
        let b = multicut_image(&layout, &g);
        assert_eq!(b.num_edges(), 21);
        assert_eq!(multicut_image(&layout, &Graph::empty(2)).num_edges(), 0);
    }

    #[test]
    fn pointwise_identity_on_three_vertices() {
        for k in [3, 4] {
            let layout = multicut_layout(3, k).unwrap();
            for g in all_graphs(3) {
                let b = multicut_image(&layout, &g);
                let e = g.num_edges();
                assert_eq!(b.num_edges(), (multicut_alpha() + multicut_mu(k)) * e);
                for p in all_assignments(3) {
                    let v = multicut_value(&b, &multicut_partition(&layout, &p));
                    assert_eq!(v, 3 * g.cut_value(&p) + multicut_mu(k) * e, "k={k} {g:?} {p:?}");
                }
            }
        }
    }

    #[test]
    fn decomposed_max_matches_enumeration_on_k2() {
        let layout = multicut_layout(2, 3).unwrap();
        let b = multicut_image(&layout, &Graph::complete(2));
        let brute = crate::catalog::all_partitions(12, 3)
            .iter()
            .map(|p| multicut_value(&b, p))
            .max()
            .unwrap();
        assert_eq!(brute, 21);
        assert_eq!(max_multicut_decomposed(&layout, &Graph::complete(2)), 21);
    }

    // the maximum equals maxcut + 20|E| on forests (all |E| <= 2 graphs on
    // three vertices), not maxcut + c(3)|E|
    #[test]
    fn maximum_on_small_graphs() {
        let layout = multicut_layout(3, 3).unwrap();
        for g in all_graphs(3).filter(|g| g.num_edges() <= 2) {
            let e = g.num_edges();
            let max = max_multicut_decomposed(&layout, &g);
            assert_eq!(max, g.max_cut() + 20 * e, "{g:?}");
            if e > 0 {
                assert_ne!(max, g.max_cut() + nominal_shift(3) * e);
            }
        }
    }

    #[test]
    fn gadget_certifies_at_two_vertices() {
        let g = maxcut_to_multicut(2, 3).unwrap();
        let r = g.certify().unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.target_solutions, 3usize.pow(12));
    }

    #[test]
    fn too_large_is_a_scale_error() {
        assert!(matches!(maxcut_to_multicut(3, 3), Err(Error::Scale { .. })));
    }
}
