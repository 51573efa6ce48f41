//! LP formulations and the two constructive directions between formulations
//! and factorizations of slack matrices.

use super::farkas::{farkas_certificate, AffineFunction};
use super::{check_lp_factorization, LPFactorization};
use crate::error::{Error, FormulationCondition, Result};
use crate::lp::{maximize_inequality, minimize_inequality, LpOutcome};
use crate::matrix::{Matrix, MatrixDocument};
use crate::problem::{eval_value, sound_instances, Guarantees, InstanceId, Problem, Sense, SolutionId};
use crate::rational::{self, Rational};
use crate::slack::build_slack;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// A system `A x <= b` over `R^d` with one point per solution and one affine
/// function per sound instance. `funcs[k]` realizes `instances[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPFormulation {
    pub a: Matrix,
    pub b: Vec<Rational>,
    pub points: Vec<Vec<Rational>>,
    pub instances: Vec<InstanceId>,
    pub funcs: Vec<AffineFunction>,
}

impl LPFormulation {
    /// Number of inequalities.
    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn func(&self, f: InstanceId) -> Option<&AffineFunction> {
        self.instances.iter().position(|&g| g == f).map(|k| &self.funcs[k])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&LPFormulationDoc::from(self)).expect("formulation serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: LPFormulationDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LPFormulationDoc {
    pub a: MatrixDocument,
    pub b: Vec<String>,
    pub points: Vec<Vec<String>>,
    pub instances: Vec<usize>,
    pub funcs: Vec<AffineFunction>,
}

impl From<&LPFormulation> for LPFormulationDoc {
    fn from(l: &LPFormulation) -> Self {
        let fmt = |v: &[Rational]| v.iter().map(rational::format).collect::<Vec<_>>();
        LPFormulationDoc {
            a: l.a.to_document(),
            b: fmt(&l.b),
            points: l.points.iter().map(|p| fmt(p)).collect(),
            instances: l.instances.iter().map(|f| f.0).collect(),
            funcs: l.funcs.clone(),
        }
    }
}

impl TryFrom<LPFormulationDoc> for LPFormulation {
    type Error = Error;

    fn try_from(doc: LPFormulationDoc) -> Result<Self> {
        let parse = |v: &[String]| v.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>();
        Ok(LPFormulation {
            a: doc.a.to_matrix()?,
            b: parse(&doc.b)?,
            points: doc.points.iter().map(|p| parse(p)).collect::<Result<_>>()?,
            instances: doc.instances.into_iter().map(InstanceId).collect(),
            funcs: doc.funcs,
        })
    }
}

fn invalid(condition: FormulationCondition, detail: String) -> Error {
    Error::FormulationInvalid { condition, detail }
}

fn check_shapes(p: &dyn Problem, g: &Guarantees, l: &LPFormulation) -> Result<()> {
    let (q, d) = l.a.shape();
    if l.b.len() != q {
        return Err(Error::Shape(format!("A has {q} rows but b has {} entries", l.b.len())));
    }
    if l.points.len() != p.num_solutions() || l.points.iter().any(|x| x.len() != d) {
        return Err(Error::Shape(format!(
            "need {} points in R^{d}, got {}",
            p.num_solutions(),
            l.points.len()
        )));
    }
    if l.funcs.len() != l.instances.len() || l.funcs.iter().any(|w| w.dim() != d) {
        return Err(Error::Shape(format!("need one affine function on R^{d} per listed instance")));
    }
    let sound = sound_instances(p, g);
    if l.instances != sound {
        return Err(Error::Shape(format!(
            "functions are given for instances {:?}, the sound instances are {:?}",
            l.instances.iter().map(|f| f.0).collect::<Vec<_>>(),
            sound.iter().map(|f| f.0).collect::<Vec<_>>()
        )));
    }
    Ok(())
}

/// Checks containment of every point, exactness of every function on every
/// point, and the completeness guarantee by exact LP optimization.
pub fn verify_formulation(p: &dyn Problem, g: &Guarantees, l: &LPFormulation) -> Result<()> {
    check_shapes(p, g, l)?;
    for (s, x) in l.points.iter().enumerate() {
        let ax = l.a.mul_vec(x)?;
        if let Some(j) = (0..ax.len()).find(|&j| ax[j] > l.b[j]) {
            return Err(invalid(
                FormulationCondition::Containment,
                format!(
                    "point of solution {} violates inequality {j}: {} > {}",
                    p.solution_label(s),
                    rational::format(&ax[j]),
                    rational::format(&l.b[j])
                ),
            ));
        }
    }
    for (&f, w) in l.instances.iter().zip(&l.funcs) {
        for (s, x) in l.points.iter().enumerate() {
            let val = eval_value(p, f, SolutionId(s))?;
            let lin = w.eval(x);
            if lin != val {
                return Err(invalid(
                    FormulationCondition::Linearization,
                    format!(
                        "instance {} at solution {}: function gives {}, value is {}",
                        p.instance_label(f.0),
                        p.solution_label(s),
                        rational::format(&lin),
                        rational::format(&val)
                    ),
                ));
            }
        }
    }
    for (&f, w) in l.instances.iter().zip(&l.funcs) {
        let c = &g.complete[f.0];
        let outcome = match p.sense() {
            Sense::Maximize => maximize_inequality(&l.a, &l.b, &w.linear)?,
            Sense::Minimize => minimize_inequality(&l.a, &l.b, &w.linear)?,
        };
        let bad = match outcome {
            LpOutcome::Optimal { value, .. } => {
                let opt = value + &w.constant;
                let ok = match p.sense() {
                    Sense::Maximize => &opt <= c,
                    Sense::Minimize => &opt >= c,
                };
                (!ok).then(|| format!("optimum {}", rational::format(&opt)))
            }
            LpOutcome::Unbounded { .. } => Some("the function is unbounded".to_string()),
            LpOutcome::Infeasible => {
                return Err(Error::InternalConsistency("system with feasible points reported infeasible".into()))
            }
        };
        if let Some(what) = bad {
            return Err(invalid(
                FormulationCondition::Guarantee,
                format!(
                    "instance {}: {what} beyond the completeness guarantee {}",
                    p.instance_label(f.0),
                    rational::format(c)
                ),
            ));
        }
    }
    Ok(())
}

/// Size-`q` factorization of the slack matrix from a verified formulation:
/// `U(j, s) = b_j - A_j x^s`, with `T` and `μ` the Farkas multipliers of
/// `C(f) - w^f` (maximization) or `w^f - C(f)` (minimization).
pub fn factorization_from_formulation(p: &dyn Problem, g: &Guarantees, l: &LPFormulation) -> Result<LPFactorization> {
    verify_formulation(p, g, l)?;
    let q = l.size();
    let n = p.num_solutions();
    let mut u = Matrix::zeros(q, n);
    for (s, x) in l.points.iter().enumerate() {
        let ax = l.a.mul_vec(x)?;
        for j in 0..q {
            u.set(j, s, &l.b[j] - &ax[j]);
        }
    }
    let m = l.instances.len();
    let mut t = Matrix::zeros(m, q);
    let mut mu = Vec::with_capacity(m);
    for (k, (&f, w)) in l.instances.iter().zip(&l.funcs).enumerate() {
        let c = &g.complete[f.0];
        let phi = match p.sense() {
            Sense::Maximize => w.subtract_from(c),
            Sense::Minimize => w.minus(c),
        };
        let cert = farkas_certificate(&l.a, &l.b, &phi).map_err(|e| match e {
            Error::NotNonnegative { .. } => invalid(
                FormulationCondition::Guarantee,
                format!("instance {}: {e}", p.instance_label(f.0)),
            ),
            other => other,
        })?;
        for (j, lam) in cert.lambdas.into_iter().enumerate() {
            t.set(k, j, lam);
        }
        mu.push(cert.lambda0);
    }
    let f = LPFactorization::new(t, u, mu)?;
    let slack = build_slack(p, g)?;
    check_lp_factorization(&slack.entries, &f)
        .map_err(|e| Error::InternalConsistency(format!("extracted factorization does not reproduce the slack matrix: {e}")))?;
    Ok(f)
}

/// The formulation `x >= 0` over `R^r` with `x^s = U_s` and
/// `w^f = C(f) - μ(f) - T_f x` (maximization) or `C(f) + μ(f) + T_f x`
/// (minimization).
pub fn formulation_from_factorization(p: &dyn Problem, g: &Guarantees, f: &LPFactorization) -> Result<LPFormulation> {
    let slack = build_slack(p, g)?;
    check_lp_factorization(&slack.entries, f).map_err(|e| match e {
        Error::Shape(s) => Error::FactorizationInvalid(s),
        other => other,
    })?;
    let r = f.size();
    let a = Matrix::from_fn(r, r, |i, j| if i == j { Rational::from_integer((-1).into()) } else { Rational::zero() });
    let b = vec![Rational::zero(); r];
    let points = (0..f.u.cols()).map(|s| f.u.col(s)).collect();
    let funcs = slack
        .rows
        .iter()
        .enumerate()
        .map(|(i, fid)| {
            let c = &g.complete[fid.0];
            let row = f.t.row(i);
            match p.sense() {
                Sense::Maximize => AffineFunction::new(row.iter().map(|v| -v).collect(), c - &f.mu[i]),
                Sense::Minimize => AffineFunction::new(row.to_vec(), c + &f.mu[i]),
            }
        })
        .collect();
    Ok(LPFormulation {
        a,
        b,
        points,
        instances: slack.rows.clone(),
        funcs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_maxcut, maxcut_problem};
    use crate::catalog::graph::{Assignment, Graph};
    use crate::problem::{exact_guarantees, ProblemSpec};
    use crate::rational::int;

    // MaxCUT on two vertices: the single-edge graph and the empty graph,
    // solutions are the four assignments.
    fn maxcut2() -> (ProblemSpec<Graph, Assignment>, Guarantees) {
        let p = build_maxcut(2, None).unwrap();
        let g = exact_guarantees(&p).unwrap();
        (p, g)
    }

    /// Segment `[0, 1]`, `x^s` = whether the edge is cut, `w^G(x) = |E(G)| x`.
    fn segment_formulation(p: &ProblemSpec<Graph, Assignment>, g: &Guarantees) -> LPFormulation {
        let edge = Graph::complete(2);
        let points = p.solutions().iter().map(|s| vec![int(edge.cut_value(s) as i64)]).collect();
        let instances = sound_instances(p, g);
        let funcs = instances
            .iter()
            .map(|f| AffineFunction::new(vec![int(p.instance(f.0).num_edges() as i64)], int(0)))
            .collect();
        LPFormulation {
            a: Matrix::from_ints(&[[-1], [1]]),
            b: vec![int(0), int(1)],
            points,
            instances,
            funcs,
        }
    }

    #[test]
    fn maxcut2_extraction() {
        let (p, g) = maxcut2();
        let l = segment_formulation(&p, &g);
        verify_formulation(&p, &g, &l).unwrap();
        let f = factorization_from_formulation(&p, &g, &l).unwrap();
        assert_eq!(f.size(), 2);
        let slack = build_slack(&p, &g).unwrap();
        assert!(super::super::verify_lp_factorization(&slack.entries, &f).unwrap());
    }

    #[test]
    fn dropping_an_inequality_breaks_the_guarantee() {
        let (p, g) = maxcut2();
        let mut l = segment_formulation(&p, &g);
        l.a = l.a.select_rows(&[0]);
        l.b.truncate(1);
        match verify_formulation(&p, &g, &l) {
            Err(Error::FormulationInvalid { condition, .. }) => assert_eq!(condition, FormulationCondition::Guarantee),
            other => panic!("{other:?}"),
        }
        assert!(factorization_from_formulation(&p, &g, &l).is_err());
    }

    #[test]
    fn broken_point_and_function() {
        let (p, g) = maxcut2();
        let mut l = segment_formulation(&p, &g);
        l.points[0] = vec![int(2)];
        assert!(matches!(
            verify_formulation(&p, &g, &l),
            Err(Error::FormulationInvalid { condition: FormulationCondition::Containment, .. })
        ));
        let mut l = segment_formulation(&p, &g);
        let last = l.funcs.len() - 1;
        l.funcs[last].constant = int(1);
        assert!(matches!(
            verify_formulation(&p, &g, &l),
            Err(Error::FormulationInvalid { condition: FormulationCondition::Linearization, .. })
        ));
    }

    #[test]
    fn trivial_problem_without_inequalities() {
        let p = maxcut_problem(2, vec![Graph::complete(2)]).unwrap();
        let p = ProblemSpec::new(
            "one",
            Sense::Maximize,
            vec![p.instance(0).clone()],
            vec![p.solution(1).clone()],
            |g: &Graph, s| int(g.cut_value(s) as i64),
            |g| int(g.num_edges() as i64),
        )
        .unwrap();
        let g = Guarantees::new(&p, vec![int(3)], vec![int(1)]).unwrap();
        let l = LPFormulation {
            a: Matrix::zeros(0, 0),
            b: vec![],
            points: vec![vec![]],
            instances: vec![InstanceId(0)],
            funcs: vec![AffineFunction::constant(0, int(1))],
        };
        let f = factorization_from_formulation(&p, &g, &l).unwrap();
        assert_eq!(f.size(), 0);
        assert_eq!(f.mu, vec![int(2)]);
    }

    #[test]
    fn roundtrip_maxcut3() {
        let p = build_maxcut(3, None).unwrap();
        let g = exact_guarantees(&p).unwrap();
        let slack = build_slack(&p, &g).unwrap();
        let f = LPFactorization::trivial(&slack.entries).unwrap();
        let l = formulation_from_factorization(&p, &g, &f).unwrap();
        verify_formulation(&p, &g, &l).unwrap();
        for (&fid, w) in l.instances.iter().zip(&l.funcs) {
            // the maximum over x >= 0 is attained at the origin
            match maximize_inequality(&l.a, &l.b, &w.linear).unwrap() {
                LpOutcome::Optimal { value, .. } => {
                    let i = slack.row_position(fid).unwrap();
                    assert_eq!(value + &w.constant, &g.complete[fid.0] - &f.mu[i]);
                }
                other => panic!("{other:?}"),
            }
        }
        let back = factorization_from_formulation(&p, &g, &l).unwrap();
        assert!(back.size() <= f.size());
        assert!(super::super::verify_lp_factorization(&slack.entries, &back).unwrap());
        assert_eq!(LPFormulation::from_json(&l.to_json()).unwrap(), l);
    }

    #[test]
    fn pure_shift_gives_constant_functions() {
        let p = maxcut_problem(2, vec![Graph::empty(2)]).unwrap();
        let g = Guarantees::new(&p, vec![int(1)], vec![int(0)]).unwrap();
        let slack = build_slack(&p, &g).unwrap();
        let f = LPFactorization::pure_shift(&slack.entries).unwrap();
        let l = formulation_from_factorization(&p, &g, &f).unwrap();
        assert_eq!(l.dim(), 0);
        assert_eq!(l.funcs, vec![AffineFunction::constant(0, int(0))]);
        verify_formulation(&p, &g, &l).unwrap();
    }
}
