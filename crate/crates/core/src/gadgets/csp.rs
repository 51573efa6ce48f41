//! Clause-level gadgets: each source clause is replaced by a fixed pair of
//! target clauses (or by itself), and assignments map to themselves.

use super::{simple_gadget, GadgetResult};
use crate::catalog::csp::{build_csp, csp_problem, min_csp_problem, Clause, ClauseKind, ClauseSet, CspOptions, Literal};
use crate::catalog::{build_maxcut, build_weighted_maxcut, Assignment, Graph, MinCspKind, WeightedGraph};
use crate::error::Result;
use crate::rational::{int, Rational};
use crate::reduce::SimpleParams;
use num_traits::{One, Zero};

/// Clause-subset cap for the XOR-2 sources.
const MAX_CLAUSES: usize = 4;

fn unit_guarantees(alpha: Rational, mu: Rational, ratio: Rational) -> SimpleParams {
    // C1 = S1 = |f1| keeps every source instance sound
    SimpleParams {
        alpha,
        mu,
        size_ratio: Some(ratio),
        tau1: Rational::one(),
        sigma1: Rational::one(),
    }
}

fn xor2_source(n: usize) -> Result<crate::ProblemSpec<ClauseSet, Assignment>> {
    let opts = CspOptions {
        max_clauses: Some(MAX_CLAUSES),
        ..CspOptions::default()
    };
    Ok(build_csp(ClauseKind::Xor(2), n, &opts)?.renamed("MaxXOR-2"))
}

/// Replace every edge `{i, j}` by the clauses `pair(i, j)`, each with the edge weight.
fn expand_edges(n: usize, edges: &[(usize, usize)], weights: &[Rational], pair: impl Fn(usize, usize) -> Vec<Clause>) -> ClauseSet {
    let mut clauses = Vec::new();
    let mut ws = Vec::new();
    for (&(i, j), w) in edges.iter().zip(weights) {
        for c in pair(i, j) {
            clauses.push(c);
            ws.push(w.clone());
        }
    }
    ClauseSet::new(n, clauses, ws).expect("gadget clauses are distinct and in range")
}

fn unit_weights(g: &Graph) -> Vec<Rational> {
    vec![Rational::one(); g.num_edges()]
}

/// MaxCUT to Max-2SAT: `x_i ⊕ x_j = 1` becomes `x_i ∨ x_j`, `¬x_i ∨ ¬x_j`.
/// A cut edge satisfies both, an uncut one exactly one: `α = 1`, `μ = 1`.
pub fn maxcut_to_max2sat(n: usize) -> Result<GadgetResult> {
    let p1 = build_maxcut(n, None)?;
    let pair = |i, j| {
        vec![
            Clause::or(&[Literal::pos(i), Literal::pos(j)]),
            Clause::or(&[Literal::neg(i), Literal::neg(j)]),
        ]
    };
    let beta = |g: &Graph| expand_edges(n, &g.edges, &unit_weights(g), pair);
    let p2 = csp_problem("Max-2SAT", n, p1.instances().iter().map(beta).collect())?;
    simple_gadget(
        "maxcut-to-max2sat",
        "clause-pair gadget: MaxCUT to Max-2SAT",
        p1,
        p2,
        beta,
        Assignment::clone,
        unit_guarantees(Rational::one(), Rational::one(), int(2)),
    )
}

/// MaxCUT to MaxDICUT: `x_i ⊕ x_j = 1` becomes `¬x_i ∧ x_j`, `x_i ∧ ¬x_j`;
/// exactly one holds on a cut edge and none otherwise.
pub fn maxcut_to_dicut(n: usize) -> Result<GadgetResult> {
    let p1 = build_maxcut(n, None)?;
    let pair = |i, j| {
        vec![
            Clause::and(&[Literal::neg(i), Literal::pos(j)]),
            Clause::and(&[Literal::pos(i), Literal::neg(j)]),
        ]
    };
    let beta = |g: &Graph| expand_edges(n, &g.edges, &unit_weights(g), pair);
    let p2 = csp_problem("MaxDICUT", n, p1.instances().iter().map(beta).collect())?;
    simple_gadget(
        "maxcut-to-dicut",
        "directed-cut gadget: MaxCUT to MaxDICUT",
        p1,
        p2,
        beta,
        Assignment::clone,
        unit_guarantees(Rational::one(), Rational::zero(), int(2)),
    )
}

/// The two conjunctions whose disjunction is the parity clause on `i < j`.
fn xor_dnf(i: usize, j: usize, parity: bool) -> [Clause; 2] {
    if parity {
        [
            Clause::and(&[Literal::pos(i), Literal::neg(j)]),
            Clause::and(&[Literal::neg(i), Literal::pos(j)]),
        ]
    } else {
        [
            Clause::and(&[Literal::pos(i), Literal::pos(j)]),
            Clause::and(&[Literal::neg(i), Literal::neg(j)]),
        ]
    }
}

fn xor_parts(c: &Clause) -> (usize, usize, bool) {
    match c {
        Clause::Xor { vars, parity } if vars.len() == 2 => (vars[0], vars[1], *parity),
        other => unreachable!("MaxXOR-2 source holds only two-variable parity clauses, got {other:?}"),
    }
}

/// MaxXOR-2 to MaxConjSAT by DNF expansion: exactly one conjunction of a
/// satisfied parity clause holds. Sizes double, so `σ2 = σ1 / 2`.
pub fn xor2_to_conjsat(n: usize) -> Result<GadgetResult> {
    let p1 = xor2_source(n)?;
    let beta = |l: &ClauseSet| {
        let mut clauses = Vec::new();
        let mut ws = Vec::new();
        for (c, w) in l.clauses.iter().zip(&l.weights) {
            let (i, j, parity) = xor_parts(c);
            for d in xor_dnf(i, j, parity) {
                clauses.push(d);
                ws.push(w.clone());
            }
        }
        ClauseSet::new(n, clauses, ws).expect("DNF terms are distinct")
    };
    let p2 = csp_problem("MaxConjSAT-2", n, p1.instances().iter().map(beta).collect())?;
    simple_gadget(
        "xor2-to-conjsat",
        "DNF expansion: MaxXOR-2 to MaxConjSAT",
        p1,
        p2,
        beta,
        Assignment::clone,
        unit_guarantees(Rational::one(), Rational::zero(), int(2)),
    )
}

/// Truth table of `x_i ⊕ x_j = parity` as a two-variable table clause.
pub fn xor_table(parity: bool) -> u16 {
    if parity {
        0b0110
    } else {
        0b1001
    }
}

/// MaxXOR-2 as a subproblem of Max-2-CSP: each parity clause becomes the
/// table clause with the same truth table.
pub fn maxcsp2_embed_xor2(n: usize) -> Result<GadgetResult> {
    let p1 = xor2_source(n)?;
    let beta = |l: &ClauseSet| {
        let clauses = l
            .clauses
            .iter()
            .map(|c| {
                let (i, j, parity) = xor_parts(c);
                Clause::Table {
                    vars: vec![i, j],
                    table: xor_table(parity),
                }
            })
            .collect();
        ClauseSet::new(n, clauses, l.weights.clone()).expect("tables are distinct")
    };
    let p2 = csp_problem("Max-2-CSP", n, p1.instances().iter().map(beta).collect())?;
    simple_gadget(
        "maxcsp2-embed-xor2",
        "restriction: MaxXOR-2 inside Max-2-CSP",
        p1,
        p2,
        beta,
        Assignment::clone,
        unit_guarantees(Rational::one(), Rational::zero(), Rational::one()),
    )
}

/// Weighted MaxCUT to Min-2CNF. A cut edge `{i, j}` of weight `w` becomes
/// `x_i ∨ x_j` and `¬x_i ∨ ¬x_j`, both of weight `w`: both hold on a cut
/// edge, exactly one on an uncut edge, so the unsatisfied weight is
/// `Σw - cut_w` (`α = -1`, `μ = 1`) and the size doubles.
pub fn maxcut_to_min2cnf(n: usize, palette: &[Rational]) -> Result<GadgetResult> {
    let p1 = build_weighted_maxcut(n, palette)?;
    let pair = |i, j| {
        vec![
            Clause::or(&[Literal::pos(i), Literal::pos(j)]),
            Clause::or(&[Literal::neg(i), Literal::neg(j)]),
        ]
    };
    let beta = |g: &WeightedGraph| expand_edges(n, &g.base.edges, &g.weights, pair);
    let p2 = min_csp_problem(MinCspKind::Min2Cnf, n, p1.instances().iter().map(beta).collect())?;
    simple_gadget(
        "maxcut-to-min2cnf",
        "clause-pair gadget: weighted MaxCUT to Min-2CNF",
        p1,
        p2,
        beta,
        Assignment::clone,
        unit_guarantees(-Rational::one(), Rational::one(), int(2)),
    )
}

/// Weighted MaxCUT to MinUnCUT: every edge is kept as the parity clause
/// `x_i ⊕ x_j = 1`; the violated weight is `Σw - cut_w`.
pub fn maxcut_to_minuncut(n: usize, palette: &[Rational]) -> Result<GadgetResult> {
    let p1 = build_weighted_maxcut(n, palette)?;
    let beta = |g: &WeightedGraph| {
        expand_edges(n, &g.base.edges, &g.weights, |i, j| vec![Clause::xor(&[i, j], true)])
    };
    let p2 = min_csp_problem(MinCspKind::MinUnCut, n, p1.instances().iter().map(beta).collect())?;
    simple_gadget(
        "maxcut-to-minuncut",
        "identity on clauses: weighted MaxCUT to MinUnCUT",
        p1,
        p2,
        beta,
        Assignment::clone,
        unit_guarantees(-Rational::one(), Rational::one(), Rational::one()),
    )
}
