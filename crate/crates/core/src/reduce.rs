//! Affine reductions between problems and their action on slack matrices
//! and factorizations.
//!
//! A reduction rewrites every sound source instance as a nonnegative
//! combination of sound target instances plus a shift, and every source
//! solution as a convex combination of target solutions, such that
//!
//! ```text
//! val_f1(s1) = μ(f1) ± Σ b(f1, f) a(s1, s) val_f(s)
//! ```
//!
//! with `+` when both problems have the same sense and `-` otherwise.

use crate::error::{Error, Result};
use crate::factor::{check_lp_factorization, verify_sdp_factorization, LPFactorization, SDPFactorization};
use crate::matrix::Matrix;
use crate::problem::{proportional_guarantees, sound_instances, Guarantees, InstanceId, Problem, Sense};
use crate::rational::{self, serde_str, Rational};
use crate::slack::build_slack;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// One coefficient of a sparse combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub index: usize,
    #[serde(with = "serde_str")]
    pub coeff: Rational,
}

impl Term {
    pub fn new(index: usize, coeff: Rational) -> Self {
        Term { index, coeff }
    }

    pub fn unit(index: usize) -> Self {
        Term::new(index, Rational::one())
    }
}

/// `β(f1) = Σ b f + μ(f1)` (or `μ(f1) - Σ b f` across senses).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceImage {
    pub source: usize,
    pub terms: Vec<Term>,
    #[serde(with = "serde_str")]
    pub shift: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub source_sense: Sense,
    pub target_sense: Sense,
    /// One image per sound source instance, in instance order.
    pub beta: Vec<InstanceImage>,
    /// `gamma[s1]`: convex combination of target solutions.
    pub gamma: Vec<Vec<Term>>,
}

impl Reduction {
    /// Builds a reduction, enforcing nonnegative coefficients, convex
    /// solution images, images keyed by exactly `F1^S1` and targets in `F2^S2`.
    pub fn new(
        p1: &dyn Problem,
        g1: &Guarantees,
        p2: &dyn Problem,
        g2: &Guarantees,
        beta: Vec<InstanceImage>,
        gamma: Vec<Vec<Term>>,
    ) -> Result<Self> {
        let red = Reduction {
            source_sense: p1.sense(),
            target_sense: p2.sense(),
            beta,
            gamma,
        };
        red.check_structure(p1, g1, p2, g2)?;
        Ok(red)
    }

    /// `+1` for same-sense reductions, `-1` across senses.
    pub fn sign(&self) -> Rational {
        if self.source_sense == self.target_sense {
            Rational::one()
        } else {
            -Rational::one()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reduction serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn check_structure(&self, p1: &dyn Problem, g1: &Guarantees, p2: &dyn Problem, g2: &Guarantees) -> Result<()> {
        if self.source_sense != p1.sense() || self.target_sense != p2.sense() {
            return Err(Error::Shape(format!(
                "reduction is {} -> {}, problems are {} -> {}",
                self.source_sense,
                self.target_sense,
                p1.sense(),
                p2.sense()
            )));
        }
        if self.gamma.len() != p1.num_solutions() {
            return Err(Error::Shape(format!(
                "gamma has {} images for {} source solutions",
                self.gamma.len(),
                p1.num_solutions()
            )));
        }
        let sources: Vec<usize> = self.beta.iter().map(|im| im.source).collect();
        let sound1: Vec<usize> = sound_instances(p1, g1).into_iter().map(|f| f.0).collect();
        if sources != sound1 {
            return Err(Error::Shape(format!(
                "beta is given on instances {sources:?}, the sound source instances are {sound1:?}"
            )));
        }
        let sound2: Vec<usize> = sound_instances(p2, g2).into_iter().map(|f| f.0).collect();
        for im in &self.beta {
            for t in &im.terms {
                if t.coeff.is_negative() {
                    return Err(Error::ReductionInvalid(format!(
                        "negative coefficient {} in the image of instance {}",
                        rational::format(&t.coeff),
                        im.source
                    )));
                }
                if sound2.binary_search(&t.index).is_err() {
                    return Err(Error::ReductionInvalid(format!(
                        "image of instance {} uses target instance {} outside the sound target instances",
                        im.source, t.index
                    )));
                }
            }
        }
        for (s1, comb) in self.gamma.iter().enumerate() {
            if let Some(t) = comb.iter().find(|t| t.index >= p2.num_solutions()) {
                return Err(Error::Shape(format!("gamma({s1}) uses target solution {}", t.index)));
            }
            if comb.iter().any(|t| t.coeff.is_negative()) {
                return Err(Error::ReductionInvalid(format!("gamma({s1}) has a negative coefficient")));
            }
            let total: Rational = comb.iter().map(|t| &t.coeff).sum();
            if !total.is_one() {
                return Err(Error::ReductionInvalid(format!(
                    "gamma({s1}) coefficients sum to {}",
                    rational::format(&total)
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactViolation {
    pub instance: usize,
    pub solution: usize,
    /// Left side minus right side of the value identity.
    #[serde(with = "serde_str")]
    pub residual: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuaranteeViolation {
    pub instance: usize,
    /// Amount by which the guarantee inequality fails.
    #[serde(with = "serde_str")]
    pub residual: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub pairs_checked: usize,
    pub exact_violations: Vec<ExactViolation>,
    pub guarantee_violations: Vec<GuaranteeViolation>,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.exact_violations.is_empty() && self.guarantee_violations.is_empty()
    }
}

/// `Σ_f b Σ_s a val_f(s)` for one source pair.
fn combined_value(p2: &dyn Problem, im: &InstanceImage, comb: &[Term]) -> Rational {
    let mut acc = Rational::zero();
    for bt in &im.terms {
        for at in comb {
            acc += &bt.coeff * &at.coeff * p2.value(bt.index, at.index);
        }
    }
    acc
}

fn combined_guarantee(g2: &Guarantees, im: &InstanceImage) -> Rational {
    im.terms.iter().map(|t| &t.coeff * &g2.complete[t.index]).sum()
}

/// Checks the value identity for every sound source instance and every
/// source solution, and the completeness inequality for every image.
pub fn verify_reduction(
    p1: &dyn Problem,
    g1: &Guarantees,
    p2: &dyn Problem,
    g2: &Guarantees,
    red: &Reduction,
) -> Result<ReductionReport> {
    red.check_structure(p1, g1, p2, g2)?;
    let sign = red.sign();
    let mut report = ReductionReport {
        pairs_checked: 0,
        exact_violations: Vec::new(),
        guarantee_violations: Vec::new(),
    };
    for im in &red.beta {
        for (s1, comb) in red.gamma.iter().enumerate() {
            report.pairs_checked += 1;
            let rhs = &im.shift + &sign * combined_value(p2, im, comb);
            let residual = p1.value(im.source, s1) - rhs;
            if !residual.is_zero() {
                report.exact_violations.push(ExactViolation {
                    instance: im.source,
                    solution: s1,
                    residual,
                });
            }
        }
        // max source: C1 >= μ ± Σ b C2; min source: C1 <= μ ± Σ b C2
        let bound = &im.shift + &sign * combined_guarantee(g2, im);
        let c1 = &g1.complete[im.source];
        let gap = match red.source_sense {
            Sense::Maximize => c1 - &bound,
            Sense::Minimize => &bound - c1,
        };
        if gap.is_negative() {
            report.guarantee_violations.push(GuaranteeViolation {
                instance: im.source,
                residual: -gap,
            });
        }
    }
    Ok(report)
}

/// `M1 = R M2 Cm + t 1` between two slack matrices, with both matrices kept
/// so that factorizations can be checked on either side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixReduction {
    pub r: Matrix,
    pub cm: Matrix,
    pub t: Vec<Rational>,
    pub m1: Matrix,
    pub m2: Matrix,
}

impl MatrixReduction {
    /// Validates nonnegativity, `1 Cm = 1` and the identity itself.
    pub fn new(r: Matrix, cm: Matrix, t: Vec<Rational>, m1: Matrix, m2: Matrix) -> Result<Self> {
        let mr = MatrixReduction { r, cm, t, m1, m2 };
        mr.check()?;
        Ok(mr)
    }

    pub fn identity(m: &Matrix) -> Self {
        MatrixReduction {
            r: Matrix::identity(m.rows()),
            cm: Matrix::identity(m.cols()),
            t: vec![Rational::zero(); m.rows()],
            m1: m.clone(),
            m2: m.clone(),
        }
    }

    /// `R M2 Cm + t 1`.
    pub fn apply(&self, m2: &Matrix) -> Result<Matrix> {
        self.r.mul(&m2.mul(&self.cm)?)?.add_row_shift(&self.t)
    }

    fn check(&self) -> Result<()> {
        if !self.r.is_nonnegative() || !self.cm.is_nonnegative() || self.t.iter().any(|x| x.is_negative()) {
            return Err(Error::ReductionInvalid("R, Cm and t must be nonnegative".into()));
        }
        if let Some(j) = (0..self.cm.cols()).find(|&j| !self.cm.col(j).iter().sum::<Rational>().is_one()) {
            return Err(Error::ReductionInvalid(format!("column {j} of Cm does not sum to one")));
        }
        let got = self.apply(&self.m2)?;
        if got != self.m1 {
            let (i, j) = (0..got.rows())
                .flat_map(|i| (0..got.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| got.get(i, j) != self.m1.get(i, j))
                .unwrap_or((0, 0));
            return Err(Error::InternalConsistency(format!(
                "R M2 Cm + t 1 differs from M1 at ({i}, {j})"
            )));
        }
        Ok(())
    }

    /// `self` maps `M2` to `M1`, `next` maps `M3` to `M2`; the product maps
    /// `M3` to `M1` with `R = R1 R2`, `Cm = Cm2 Cm1`, `t = R1 t2 + t1`.
    pub fn then(&self, next: &MatrixReduction) -> Result<MatrixReduction> {
        let r = self.r.mul(&next.r)?;
        let cm = next.cm.mul(&self.cm)?;
        let r1t2 = self.r.mul_vec(&next.t)?;
        let t = r1t2.iter().zip(&self.t).map(|(a, b)| a + b).collect();
        MatrixReduction::new(r, cm, t, self.m1.clone(), next.m2.clone())
    }
}

/// The matrix form of a verified reduction between the two slack matrices:
/// `R(f1, f) = b`, `Cm(s, s1) = a`, and `t(f1)` the completeness gap
/// `C1 - μ ∓ Σ b C2` (signed so that it is nonnegative exactly when the
/// guarantee inequality holds).
pub fn matrix_reduction(
    p1: &dyn Problem,
    g1: &Guarantees,
    p2: &dyn Problem,
    g2: &Guarantees,
    red: &Reduction,
) -> Result<MatrixReduction> {
    red.check_structure(p1, g1, p2, g2)?;
    let m1 = build_slack(p1, g1)?;
    let m2 = build_slack(p2, g2)?;
    let sign = red.sign();
    let mut r = Matrix::zeros(m1.rows.len(), m2.rows.len());
    let mut t = Vec::with_capacity(m1.rows.len());
    for (i, im) in red.beta.iter().enumerate() {
        for term in &im.terms {
            let k = m2
                .row_position(InstanceId(term.index))
                .ok_or_else(|| Error::ReductionInvalid(format!("target instance {} is not sound", term.index)))?;
            *r.get_mut(i, k) += &term.coeff;
        }
        let gap = &g1.complete[im.source] - &im.shift - &sign * combined_guarantee(g2, im);
        t.push(match red.source_sense {
            Sense::Maximize => gap,
            Sense::Minimize => -gap,
        });
    }
    let mut cm = Matrix::zeros(p2.num_solutions(), p1.num_solutions());
    for (s1, comb) in red.gamma.iter().enumerate() {
        for term in comb {
            *cm.get_mut(term.index, s1) += &term.coeff;
        }
    }
    MatrixReduction::new(r, cm, t, m1.entries, m2.entries).map_err(|e| match e {
        Error::ReductionInvalid(s) | Error::InternalConsistency(s) => {
            Error::InternalConsistency(format!("matrix form of the reduction fails: {s}"))
        }
        other => other,
    })
}

/// `M1 = Σ (R u_i)(v_i Cm) + (R μ + t) 1`: same size as the input.
pub fn compose_lp(mr: &MatrixReduction, f2: &LPFactorization) -> Result<LPFactorization> {
    check_lp_factorization(&mr.m2, f2)?;
    let mu = mr
        .r
        .mul_vec(&f2.mu)?
        .into_iter()
        .zip(&mr.t)
        .map(|(a, b)| a + b)
        .collect();
    let f1 = LPFactorization::new(mr.r.mul(&f2.t)?, f2.u.mul(&mr.cm)?, mu)?;
    check_lp_factorization(&mr.m1, &f1)?;
    Ok(f1)
}

/// `T̂_f = Σ R(f, i) T_i`, `Û_s = Σ U_j Cm(j, s)`, `μ̂ = R μ + t`.
pub fn compose_sdp(mr: &MatrixReduction, f2: &SDPFactorization) -> Result<SDPFactorization> {
    if !verify_sdp_factorization(&mr.m2, f2)? {
        return Err(Error::FactorizationInvalid("SDP factorization does not reproduce M2".into()));
    }
    let r = f2.size();
    let combine = |weights: Vec<Rational>, mats: &[Matrix]| {
        let mut acc = Matrix::zeros(r, r);
        for (w, m) in weights.iter().zip(mats) {
            if !w.is_zero() {
                acc = acc.add(&m.scale(w)).expect("equal sizes");
            }
        }
        acc
    };
    let ts = (0..mr.r.rows()).map(|f| combine(mr.r.row(f).to_vec(), &f2.ts)).collect();
    let us = (0..mr.cm.cols()).map(|s| combine(mr.cm.col(s), &f2.us)).collect();
    let mu = mr
        .r
        .mul_vec(&f2.mu)?
        .into_iter()
        .zip(&mr.t)
        .map(|(a, b)| a + b)
        .collect();
    let f1 = SDPFactorization { ts, us, mu };
    if !verify_sdp_factorization(&mr.m1, &f1)? {
        return Err(Error::InternalConsistency("composed SDP factorization does not reproduce M1".into()));
    }
    Ok(f1)
}

/// Parameters of a point-to-point reduction with
/// `val_β(f1)[γ(s1)] = α val_f1(s1) + μ |f1|` and `|β(f1)| = λ |f1|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimpleParams {
    #[serde(with = "serde_str")]
    pub alpha: Rational,
    #[serde(with = "serde_str")]
    pub mu: Rational,
    /// Size ratio `λ`; `None` means `|α| + μ`.
    #[serde(skip)]
    pub size_ratio: Option<Rational>,
    /// Source guarantees `C1 = τ1 |f|`, `S1 = σ1 |f|`.
    #[serde(with = "serde_str")]
    pub tau1: Rational,
    #[serde(with = "serde_str")]
    pub sigma1: Rational,
}

impl SimpleParams {
    pub fn ratio(&self) -> Rational {
        self.size_ratio.clone().unwrap_or_else(|| self.alpha.abs() + &self.mu)
    }
}

#[derive(Debug, Clone)]
pub struct SimpleReduction {
    pub reduction: Reduction,
    pub source_guarantees: Guarantees,
    pub target_guarantees: Guarantees,
    /// `C2 = tau2 |f|`.
    pub tau2: Rational,
    /// `S2 = sigma2 |f|`.
    pub sigma2: Rational,
}

/// Wraps point maps into a [`Reduction`] after exhaustively checking both
/// identities. Target guarantees are `C2 = (α τ1 + μ)/λ |f|` and
/// `S2 = (α σ1 + μ)/λ |f|`; every image must be sound for `S2`, which is
/// checked by brute force.
pub fn simple_reduction(
    p1: &dyn Problem,
    p2: &dyn Problem,
    beta: impl Fn(InstanceId) -> InstanceId,
    gamma: impl Fn(usize) -> usize,
    params: &SimpleParams,
) -> Result<SimpleReduction> {
    let alpha = &params.alpha;
    let same = p1.sense() == p2.sense();
    if alpha.is_zero() || alpha.is_positive() != same {
        return Err(Error::ReductionInvalid(format!(
            "alpha = {} does not fit a {} -> {} reduction",
            rational::format(alpha),
            p1.sense(),
            p2.sense()
        )));
    }
    let lambda = params.ratio();
    if !lambda.is_positive() {
        return Err(Error::ReductionInvalid("size ratio must be positive".into()));
    }
    let g1 = proportional_guarantees(p1, &params.tau1, &params.sigma1)?;
    let tau2 = (alpha * &params.tau1 + &params.mu) / &lambda;
    let sigma2 = (alpha * &params.sigma1 + &params.mu) / &lambda;
    let g2 = proportional_guarantees(p2, &tau2, &sigma2)?;
    let sound1 = sound_instances(p1, &g1);
    let gammas: Vec<usize> = (0..p1.num_solutions()).map(&gamma).collect();
    if let Some((s1, s2)) = gammas.iter().enumerate().find(|(_, &s)| s >= p2.num_solutions()) {
        return Err(Error::Shape(format!("gamma({s1}) = {s2} is not a target solution")));
    }
    let sound2: Vec<InstanceId> = sound_instances(p2, &g2);
    let mut images = Vec::with_capacity(sound1.len());
    for &f1 in &sound1 {
        let f2 = beta(f1);
        if f2.0 >= p2.num_instances() {
            return Err(Error::Shape(format!("beta({}) = {} is not a target instance", f1.0, f2.0)));
        }
        let size1 = p1.size(f1.0);
        let size2 = p2.size(f2.0);
        if size2 != &lambda * &size1 {
            return Err(Error::SimpleReductionInvalid {
                instance: f1.0,
                solution: None,
                detail: format!(
                    "|beta(f1)| = {} but lambda |f1| = {}",
                    rational::format(&size2),
                    rational::format(&(&lambda * &size1))
                ),
            });
        }
        for (s1, &s2) in gammas.iter().enumerate() {
            let lhs = p2.value(f2.0, s2);
            let rhs = alpha * p1.value(f1.0, s1) + &params.mu * &size1;
            if lhs != rhs {
                return Err(Error::SimpleReductionInvalid {
                    instance: f1.0,
                    solution: Some(s1),
                    detail: format!(
                        "val_beta[gamma] = {}, alpha val + mu |f1| = {}",
                        rational::format(&lhs),
                        rational::format(&rhs)
                    ),
                });
            }
        }
        if sound2.binary_search(&f2).is_err() {
            return Err(Error::SimpleReductionInvalid {
                instance: f1.0,
                solution: None,
                detail: format!(
                    "optimum of beta(f1) violates the soundness bound sigma2 = {}",
                    rational::format(&sigma2)
                ),
            });
        }
        // val_f1 = (1/α) val_β − μ|f1|/α, stored with b = 1/|α| and the sign
        // carried by the sense pair
        images.push(InstanceImage {
            source: f1.0,
            terms: vec![Term::new(f2.0, Rational::one() / alpha.abs())],
            shift: -(&params.mu * &size1) / alpha,
        });
    }
    let gamma_terms = gammas.iter().map(|&s| vec![Term::unit(s)]).collect();
    let reduction = Reduction::new(p1, &g1, p2, &g2, images, gamma_terms)?;
    let report = verify_reduction(p1, &g1, p2, &g2, &reduction)?;
    if !report.passed() {
        return Err(Error::InternalConsistency(format!(
            "simple reduction fails the general check: {} value and {} guarantee violations",
            report.exact_violations.len(),
            report.guarantee_violations.len()
        )));
    }
    Ok(SimpleReduction {
        reduction,
        source_guarantees: g1,
        target_guarantees: g2,
        tau2,
        sigma2,
    })
}

/// The identity reduction of a problem onto itself.
pub fn identity_reduction(p: &dyn Problem, g: &Guarantees) -> Result<Reduction> {
    let beta = sound_instances(p, g)
        .into_iter()
        .map(|f| InstanceImage {
            source: f.0,
            terms: vec![Term::unit(f.0)],
            shift: Rational::zero(),
        })
        .collect();
    let gamma = (0..p.num_solutions()).map(|s| vec![Term::unit(s)]).collect();
    Reduction::new(p, g, p, g, beta, gamma)
}
