//! MaxCUT into VertexCover / MaxIndep of the conflict graph.

use super::{simple_gadget, GadgetResult};
use crate::catalog::conflict::{compatible_with, image_vertices, incompatible_with};
use crate::catalog::{build_maxcut, conflict_graph, max_indep_problem, vertex_cover_problem, Graph};
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};
use crate::reduce::SimpleParams;
use num_traits::{One, Signed, Zero};

fn check_args(n: usize, delta: usize, eps: &Rational) -> Result<()> {
    if n < 2 || delta == 0 {
        return Err(Error::InvalidProblem("conflict gadgets need n >= 2 and Delta >= 1".into()));
    }
    if !eps.is_positive() || eps >= &rational::rat(1, 2) {
        return Err(Error::InvalidProblem(format!("eps = {} must lie in (0, 1/2)", rational::format(eps))));
    }
    Ok(())
}

/// The conflict graph, after checking `|V(H(K))| = 2|E(K)|` and the degree
/// bound `2Δ - 1` on every image.
fn checked_conflict_graph(n: usize, delta: usize, ks: &[Graph]) -> Result<Graph> {
    let cg = conflict_graph(n);
    for k in ks {
        let h = image_vertices(k);
        if h.len() != 2 * k.num_edges() {
            return Err(Error::InternalConsistency(format!("|V(H(K))| != 2|E(K)| for {k:?}")));
        }
        let d = cg.induced(h).max_degree();
        if d + 1 > 2 * delta {
            return Err(Error::InternalConsistency(format!(
                "H(K) has degree {d} > 2 Delta - 1 for {k:?}"
            )));
        }
    }
    Ok(cg)
}

/// VertexCover of the conflict graph: `β(K) = H(K)`, `γ(s)` = assignments
/// incompatible with `s`, so `val_H(K)[γ(s)] = 2|E(K)| - cut_K(s)`.
/// Guarantees `(1 - ε, 1/2 + ε)` become `(1/2 + ε/2, 3/4 - ε/2)`.
pub fn maxcut_to_vertexcover(n: usize, delta: usize, eps: &Rational) -> Result<GadgetResult> {
    check_args(n, delta, eps)?;
    let p1 = build_maxcut(n, Some(delta))?;
    let ks = p1.instances();
    let cg = checked_conflict_graph(n, delta, ks)?;
    let p2 = vertex_cover_problem(&cg, ks.iter().map(image_vertices).collect())?
        .renamed(format!("VertexCover[{}]", 2 * delta - 1));
    let params = SimpleParams {
        alpha: -Rational::one(),
        mu: int(2),
        size_ratio: Some(int(2)),
        tau1: Rational::one() - eps,
        sigma1: rational::rat(1, 2) + eps,
    };
    let mut g = simple_gadget(
        "maxcut-to-vertexcover",
        "conflict-graph gadget: MaxCUT[Delta] to VertexCover[2 Delta - 1]",
        p1.renamed(format!("MaxCUT[{delta}]")),
        p2,
        image_vertices,
        |s| incompatible_with(n, s),
        params,
    )?;
    g.notes.set("eps", eps);
    Ok(g)
}

/// MaxIndep of the conflict graph: `γ(s)` = assignments compatible with `s`,
/// so `val_H(K)[γ(s)] = cut_K(s)`.
pub fn maxcut_to_maxindep(n: usize, delta: usize, eps: &Rational) -> Result<GadgetResult> {
    check_args(n, delta, eps)?;
    let p1 = build_maxcut(n, Some(delta))?;
    let ks = p1.instances();
    let cg = checked_conflict_graph(n, delta, ks)?;
    let p2 = max_indep_problem(&cg, ks.iter().map(image_vertices).collect())?
        .renamed(format!("MaxIndep[{}]", 2 * delta - 1));
    let params = SimpleParams {
        alpha: Rational::one(),
        mu: Rational::zero(),
        size_ratio: Some(int(2)),
        tau1: Rational::one() - eps,
        sigma1: rational::rat(1, 2) + eps,
    };
    let mut g = simple_gadget(
        "maxcut-to-maxindep",
        "conflict-graph gadget: MaxCUT[Delta] to MaxIndep[2 Delta - 1]",
        p1.renamed(format!("MaxCUT[{delta}]")),
        p2,
        image_vertices,
        |s| compatible_with(n, s),
        params,
    )?;
    g.notes.set("eps", eps);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::graph::{all_assignments, all_graphs};
    use crate::catalog::Assignment;
    use crate::rational::rat;

    #[test]
    fn single_edge_images() {
        let k = Graph::new(3, [(0, 1)]).unwrap();
        let h = image_vertices(&k);
        let s = Assignment::from_bits(&[1, 0, 0]);
        assert_eq!(h.intersect(incompatible_with(3, &s)).len(), 1);
        assert_eq!(h.intersect(compatible_with(3, &s)).len(), 1);
        assert!(image_vertices(&Graph::empty(3)).is_empty());
    }

    #[test]
    fn oracles_at_four_vertices() {
        let cg = conflict_graph(4);
        for k in all_graphs(4) {
            let h = image_vertices(&k);
            let e = k.num_edges();
            assert_eq!(cg.min_vertex_cover(h) + k.max_cut(), 2 * e, "{k:?}");
            assert_eq!(cg.independence_number(h), k.max_cut(), "{k:?}");
            for s in all_assignments(4) {
                assert_eq!(h.intersect(incompatible_with(4, &s)).len(), 2 * e - k.cut_value(&s));
                assert_eq!(h.intersect(compatible_with(4, &s)).len(), k.cut_value(&s));
            }
        }
    }

    #[test]
    fn certified_with_explicit_constants() {
        let g = maxcut_to_vertexcover(3, 2, &rat(1, 5)).unwrap();
        assert_eq!(g.notes.constants["tau2"], "3/5");
        assert_eq!(g.notes.constants["sigma2"], "13/20");
        assert!(g.certify().unwrap().passed);
        let g = maxcut_to_maxindep(3, 2, &rat(1, 5)).unwrap();
        assert_eq!(g.notes.constants["tau2"], "2/5");
        assert_eq!(g.notes.constants["sigma2"], "7/20");
    }

    #[test]
    fn argument_checks() {
        assert!(maxcut_to_vertexcover(3, 2, &rat(1, 2)).is_err());
        assert!(maxcut_to_maxindep(1, 2, &rat(1, 5)).is_err());
    }
}
