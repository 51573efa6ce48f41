//! Approximate slack matrices and the closed-form families.

use crate::catalog::{
    self, all_perfect_matchings, subsets_of, Junta, PerfectMatching, SubGraph, VertexSet,
};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixDocument};
use crate::problem::{sound_instances, Guarantees, InstanceId, Problem, ProblemSpec, Sense, SolutionId};
use crate::rational::{self, int, rat, Rational};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// The `(C, S)`-slack matrix of a problem: rows are the sound instances,
/// columns all solutions.
#[derive(Debug, Clone)]
pub struct SlackMatrix {
    pub rows: Vec<InstanceId>,
    pub cols: Vec<SolutionId>,
    pub entries: Matrix,
    pub sense: Sense,
    /// `C(f)` for each row.
    pub complete: Vec<Rational>,
    /// `S(f)` for each row.
    pub sound: Vec<Rational>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

/// `C(f) - val_f(s)` (max) or `val_f(s) - C(f)` (min).
pub fn slack_entry(sense: Sense, complete: &Rational, value: &Rational) -> Rational {
    match sense {
        Sense::Maximize => complete - value,
        Sense::Minimize => value - complete,
    }
}

/// Builds the slack matrix over `F^S` and checks every entry is nonnegative.
pub fn build_slack(p: &dyn Problem, g: &Guarantees) -> Result<SlackMatrix> {
    if g.complete.len() != p.num_instances() {
        return Err(Error::Shape("guarantees do not match the instance count".into()));
    }
    let rows = sound_instances(p, g);
    let cols: Vec<SolutionId> = (0..p.num_solutions()).map(SolutionId).collect();
    let sense = p.sense();
    let mut entries = Matrix::zeros(rows.len(), cols.len());
    for (i, f) in rows.iter().enumerate() {
        for s in 0..cols.len() {
            let e = slack_entry(sense, &g.complete[f.0], &p.value(f.0, s));
            if e.is_negative() {
                return Err(Error::GuaranteeInfeasible {
                    instance: f.0,
                    solution: s,
                    value: e,
                });
            }
            entries.set(i, s, e);
        }
    }
    Ok(SlackMatrix {
        complete: rows.iter().map(|f| g.complete[f.0].clone()).collect(),
        sound: rows.iter().map(|f| g.sound[f.0].clone()).collect(),
        row_labels: rows.iter().map(|f| p.instance_label(f.0)).collect(),
        col_labels: (0..cols.len()).map(|s| p.solution_label(s)).collect(),
        rows,
        cols,
        entries,
        sense,
    })
}

impl SlackMatrix {
    /// Rows without a zero entry (their optimum is strictly inside the guarantee).
    pub fn rows_without_zero(&self) -> Vec<usize> {
        (0..self.entries.rows())
            .filter(|&i| self.entries.row(i).iter().all(|x| !x.is_zero()))
            .collect()
    }

    pub fn row_position(&self, f: InstanceId) -> Option<usize> {
        self.rows.iter().position(|&r| r == f)
    }

    pub fn to_document(&self) -> SlackDocument {
        let mut m = self.entries.to_document();
        m.row_labels = self.row_labels.clone();
        m.col_labels = self.col_labels.clone();
        SlackDocument {
            sense: self.sense,
            row_ids: self.rows.iter().map(|f| f.0).collect(),
            complete: self.complete.iter().map(rational::format).collect(),
            sound: self.sound.iter().map(rational::format).collect(),
            matrix: m,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("slack document serializes")
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        self.entries.write_csv(w)
    }
}

/// JSON export of a slack matrix, with row/column metadata.
#[derive(Debug, Clone, Serialize)]
pub struct SlackDocument {
    pub sense: Sense,
    pub row_ids: Vec<usize>,
    pub complete: Vec<String>,
    pub sound: Vec<String>,
    #[serde(flatten)]
    pub matrix: MatrixDocument,
}

fn delta_count(m: &PerfectMatching, u: VertexSet) -> usize {
    m.0.iter().filter(|&&(a, b)| u.contains(a) != u.contains(b)).count()
}

fn inside_count(m: &PerfectMatching, u: VertexSet) -> usize {
    m.0.iter().filter(|&&(a, b)| u.contains(a) && u.contains(b)).count()
}

/// Odd subsets `U ⊆ [n2]` with `|U| >= 3`, in mask order.
pub fn odd_subsets(n2: usize) -> Vec<VertexSet> {
    subsets_of(VertexSet::full(n2))
        .filter(|u| u.len() >= 3 && u.len() % 2 == 1)
        .collect()
}

/// Matching slack restricted to complete subgraphs `K_U`, `|U|` odd:
/// entry `(|M ∩ δ(U)| - 1) / 2`. Cross-checked against the generic slack
/// matrix of the matching problem with `C(K_U) = (|U| - 1) / 2`.
pub fn matching_slack_submatrix(n2: usize) -> Result<SlackMatrix> {
    if n2 < 4 || n2 % 2 == 1 {
        return Err(Error::InvalidProblem("matching slack needs an even n2 >= 4".into()));
    }
    let us = odd_subsets(n2);
    let cliques: Vec<catalog::Graph> = us
        .iter()
        .map(|&u| SubGraph::clique(u).as_graph(n2))
        .collect();
    let p = catalog::matching_problem(n2, cliques.clone())?;
    let half = |u: VertexSet| rat(u.len() as i64 - 1, 2);
    let g = Guarantees::from_fn(
        &p,
        |f| half(VertexSet::from_iter(p.instance(f).edges.iter().flat_map(|&(a, b)| [a, b]))),
        |f| half(VertexSet::from_iter(p.instance(f).edges.iter().flat_map(|&(a, b)| [a, b]))),
    )?;
    let generic = build_slack(&p, &g)?;
    let matchings = all_perfect_matchings(n2);
    let closed = Matrix::from_fn(us.len(), matchings.len(), |i, j| {
        rat(delta_count(&matchings[j], us[i]) as i64 - 1, 2)
    });
    // instance order of `p` is the sorted clique order; map back to `us`
    let mut ordered = Matrix::zeros(us.len(), matchings.len());
    for (i, k) in cliques.iter().enumerate() {
        let f = p.instance_index(k).expect("clique present");
        let row = generic
            .row_position(InstanceId(f))
            .ok_or_else(|| Error::InternalConsistency(format!("K_U row {f} is not sound")))?;
        for j in 0..matchings.len() {
            ordered.set(i, j, generic.entries.get(row, j).clone());
        }
    }
    if ordered != closed {
        return Err(Error::InternalConsistency(
            "matching slack closed form disagrees with the generic construction".into(),
        ));
    }
    Ok(SlackMatrix {
        rows: us.iter().map(|u| InstanceId(u.0 as usize)).collect(),
        cols: (0..matchings.len()).map(SolutionId).collect(),
        complete: us.iter().map(|&u| half(u)).collect(),
        sound: us.iter().map(|&u| half(u)).collect(),
        row_labels: us.iter().map(|u| format!("K{u:?}")).collect(),
        col_labels: matchings.iter().map(|m| format!("{m:?}")).collect(),
        entries: closed,
        sense: Sense::Maximize,
    })
}

/// The matching identities on a single pair: `|U| = 2|M ∩ E(K_U)| + |M ∩ δ(U)|`
/// and `(|U|-1)/2 - |M ∩ E(K_U)| = (|M ∩ δ(U)| - 1)/2`.
pub fn matching_identities_hold(m: &PerfectMatching, u: VertexSet) -> bool {
    let inside = inside_count(m, u) as i64;
    let delta = delta_count(m, u) as i64;
    u.len() as i64 == 2 * inside + delta && rat(u.len() as i64 - 1, 2) - int(inside) == rat(delta - 1, 2)
}

/// `(1 - a·b)^2` for `|a| = k`, `b ∈ {0,1}^n`, cross-checked against the
/// generic slack of the junta family with `C = S = 1`.
pub fn junta_slack(n: usize, k: usize) -> Result<SlackMatrix> {
    let p = catalog::build_junta_family(n, k)?;
    let g = catalog::junta_guarantees(&p)?;
    let generic = build_slack(&p, &g)?;
    let closed = Matrix::from_fn(p.num_instances(), p.num_solutions(), |i, j| {
        let t = int(p.instance(i).a.intersect(*p.solution(j)).len() as i64);
        let d = Rational::one() - t;
        &d * &d
    });
    if generic.entries != closed {
        return Err(Error::InternalConsistency(
            "junta closed form disagrees with the generic construction".into(),
        ));
    }
    Ok(generic)
}

/// Entries equal to one coming from disjoint pairs `a ∩ b = ∅` of the junta
/// slack matrix; equals `binom(n, k) 2^(n-k)`.
pub fn count_disjoint_ones(n: usize, k: usize) -> Result<u64> {
    let p: ProblemSpec<Junta, VertexSet> = catalog::build_junta_family(n, k)?;
    let m = junta_slack(n, k)?;
    let mut count = 0u64;
    for (i, f) in p.instances().iter().enumerate() {
        for (j, b) in p.solutions().iter().enumerate() {
            if f.a.intersect(*b).is_empty() && m.entries.get(i, j).is_one() {
                count += 1;
            }
        }
    }
    let binom = (0..k).fold(1u64, |acc, t| acc * (n - t) as u64 / (t + 1) as u64);
    let expected = binom << (n - k);
    if count != expected {
        return Err(Error::InternalConsistency(format!(
            "disjoint ones: counted {count}, formula gives {expected}"
        )));
    }
    Ok(count)
}

/// Uniform independent-set slack restricted to cliques `K_U` (`U` nonempty),
/// with `C(G) = α(G) / ρ` and `S(G) = α(G)`.
///
/// Every entry equals `(1/ρ - 1) + (1 - t)(2 - t)/2` with `t = |U ∩ S|`; on
/// pairs with `t <= 1` this is the shift `1/ρ - 1` of the unique-disjointness
/// pattern (one if disjoint, zero if they meet once). Checked here.
pub fn indep_clique_slack(n: usize, rho: &Rational) -> Result<SlackMatrix> {
    if !rho.is_positive() || rho > &Rational::one() {
        return Err(Error::InvalidProblem("rho must lie in (0, 1]".into()));
    }
    let cliques: Vec<SubGraph> = subsets_of(VertexSet::full(n))
        .filter(|u| !u.is_empty())
        .map(SubGraph::clique)
        .collect();
    let p = catalog::indep_uniform_problem(n, cliques)?;
    let inv = rho.recip();
    let g = Guarantees::from_fn(&p, |_| inv.clone(), |_| Rational::one())?;
    let m = build_slack(&p, &g)?;
    let shift = &inv - Rational::one();
    for (i, f) in m.rows.iter().enumerate() {
        let u = p.instance(f.0).vertices;
        for (j, s) in p.solutions().iter().enumerate() {
            let t = u.intersect(*s).len() as i64;
            let expected = &shift + rat((1 - t) * (2 - t), 2);
            let udisj_ok = t > 1 || m.entries.get(i, j) == &(&shift + int(1 - t));
            if m.entries.get(i, j) != &expected || !udisj_ok {
                return Err(Error::InternalConsistency(format!(
                    "clique slack mismatch at {:?}, {s:?}",
                    p.instance(f.0)
                )));
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_maxcut, Assignment, Graph};
    use crate::problem::{exact_guarantees, proportional_guarantees};

    #[test]
    fn maxcut_slack_examples() {
        let p = build_maxcut(3, None).unwrap();
        let g = exact_guarantees(&p).unwrap();
        let m = build_slack(&p, &g).unwrap();
        assert_eq!(m.entries.shape(), (8, 8));
        let f = m.row_position(InstanceId(p.instance_index(&Graph::complete(3)).unwrap())).unwrap();
        let s = p.solution_index(&Assignment::from_bits(&[0, 1, 1])).unwrap();
        let s0 = p.solution_index(&Assignment::from_bits(&[0, 0, 0])).unwrap();
        assert_eq!(m.entries.get(f, s), &int(0));
        assert_eq!(m.entries.get(f, s0), &int(2));
        assert!(m.rows_without_zero().is_empty());

        let g = proportional_guarantees(&p, &int(1), &int(1)).unwrap();
        let m = build_slack(&p, &g).unwrap();
        assert_eq!(m.entries.get(f, s), &int(1));
    }

    #[test]
    fn infeasible_guarantee_is_an_error() {
        let p = build_maxcut(3, None).unwrap();
        // bypass the order check: C = 0 below S = 3 keeps every graph sound
        let g = Guarantees {
            complete: vec![int(0); 8],
            sound: vec![int(3); 8],
        };
        assert!(matches!(build_slack(&p, &g), Err(Error::GuaranteeInfeasible { .. })));
    }

    #[test]
    fn matching_submatrix_examples() {
        let m = matching_slack_submatrix(4).unwrap();
        let u = VertexSet::from_iter([0, 1, 2]);
        let i = m.row_labels.iter().position(|l| l == &format!("K{u:?}")).unwrap();
        let col = |edges: &[(usize, usize)]| {
            m.col_labels
                .iter()
                .position(|l| l == &format!("{:?}", PerfectMatching(edges.to_vec())))
                .unwrap()
        };
        assert_eq!(m.entries.get(i, col(&[(0, 1), (2, 3)])), &int(0));
        assert_eq!(m.entries.get(i, col(&[(0, 3), (1, 2)])), &int(0));
        let m6 = matching_slack_submatrix(6).unwrap();
        let i = m6.row_labels.iter().position(|l| l == &format!("K{u:?}")).unwrap();
        let j = m6
            .col_labels
            .iter()
            .position(|l| l == &format!("{:?}", PerfectMatching(vec![(0, 3), (1, 4), (2, 5)])))
            .unwrap();
        assert_eq!(m6.entries.get(i, j), &int(1));
    }

    #[test]
    fn junta_examples() {
        let m = junta_slack(3, 2).unwrap();
        assert_eq!(m.entries.shape(), (3, 8));
        assert_eq!(count_disjoint_ones(3, 2).unwrap(), 6);
        assert_eq!(count_disjoint_ones(5, 2).unwrap(), 80);
        assert_eq!(count_disjoint_ones(4, 4).unwrap(), 1);
    }

    #[test]
    fn clique_slack_is_shifted_udisj() {
        let m = indep_clique_slack(4, &rat(1, 2)).unwrap();
        assert_eq!(m.entries.rows(), 15);
    }

    #[test]
    fn exports() {
        let p = build_maxcut(2, None).unwrap();
        let g = exact_guarantees(&p).unwrap();
        let m = build_slack(&p, &g).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["entries"].as_array().unwrap().len(), 2);
        assert_eq!(v["row_labels"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"], 2);
    }
}
