//! Affine Farkas certificates: `φ(x) ≡ λ0 + Σ λj (bj - Aj x)` with `λ >= 0`.

use crate::error::{Error, Result};
use crate::lp::{minimize_inequality, solve_standard, LpOutcome};
use crate::matrix::{dot, Matrix};
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// `x ↦ linear·x + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineFunction {
    #[serde(with = "crate::rational::serde_str::vec")]
    pub linear: Vec<Rational>,
    #[serde(with = "crate::rational::serde_str")]
    pub constant: Rational,
}

impl AffineFunction {
    pub fn new(linear: Vec<Rational>, constant: Rational) -> Self {
        AffineFunction { linear, constant }
    }

    pub fn constant(d: usize, c: Rational) -> Self {
        AffineFunction {
            linear: vec![Rational::zero(); d],
            constant: c,
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.linear, x) + &self.constant
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    /// `c - self`.
    pub fn subtract_from(&self, c: &Rational) -> AffineFunction {
        AffineFunction {
            linear: self.linear.iter().map(|v| -v).collect(),
            constant: c - &self.constant,
        }
    }

    /// `self - c`.
    pub fn minus(&self, c: &Rational) -> AffineFunction {
        AffineFunction {
            linear: self.linear.clone(),
            constant: &self.constant - c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub lambda0: Rational,
    pub lambdas: Vec<Rational>,
}

impl FarkasCertificate {
    /// Coefficientwise check of `φ ≡ λ0 + Σ λj (bj - Aj x)` and `λ >= 0`.
    pub fn verifies(&self, a: &Matrix, b: &[Rational], phi: &AffineFunction) -> bool {
        if self.lambda0.is_negative() || self.lambdas.iter().any(|l| l.is_negative()) {
            return false;
        }
        if self.lambdas.len() != a.rows() {
            return false;
        }
        let constant = &self.lambda0 + dot(&self.lambdas, b);
        let linear_ok = (0..a.cols()).all(|k| {
            let coeff: Rational = -(0..a.rows()).map(|j| &self.lambdas[j] * a.get(j, k)).sum::<Rational>();
            coeff == phi.linear[k]
        });
        constant == phi.constant && linear_ok
    }
}

/// Multipliers certifying `φ >= 0` on the nonempty polyhedron `{A x <= b}`.
///
/// Errors with [`Error::EmptyPolyhedron`] if the system is infeasible and with
/// [`Error::NotNonnegative`] (carrying a witness point) if `φ` dips below zero.
pub fn farkas_certificate(a: &Matrix, b: &[Rational], phi: &AffineFunction) -> Result<FarkasCertificate> {
    let (q, d) = a.shape();
    if b.len() != q || phi.dim() != d {
        return Err(Error::Shape(format!(
            "system {q}x{d} with {} right-hand sides and a function on R^{}",
            b.len(),
            phi.dim()
        )));
    }
    let zeros = vec![Rational::zero(); d];
    if minimize_inequality(a, b, &zeros)? == LpOutcome::Infeasible {
        return Err(Error::EmptyPolyhedron);
    }
    match minimize_inequality(a, b, &phi.linear)? {
        LpOutcome::Infeasible => return Err(Error::EmptyPolyhedron),
        LpOutcome::Unbounded { x, ray } => {
            // walk along the ray until φ = -1
            let at = phi.eval(&x);
            let slope = dot(&phi.linear, &ray);
            let t = (at + Rational::from_integer(1.into())) / -slope;
            let t = if t.is_negative() { Rational::zero() } else { t };
            let witness: Vec<Rational> = x.iter().zip(&ray).map(|(xi, ri)| xi + &t * ri).collect();
            let value = phi.eval(&witness);
            return Err(Error::NotNonnegative { witness, value });
        }
        LpOutcome::Optimal { x, value } => {
            let min = value + &phi.constant;
            if min.is_negative() {
                return Err(Error::NotNonnegative { witness: x, value: min });
            }
        }
    }
    // dual: minimize b·λ subject to A^T λ = -c, λ >= 0
    let neg_c: Vec<Rational> = phi.linear.iter().map(|v| -v).collect();
    let lambdas = match solve_standard(&a.transpose(), &neg_c, b)? {
        LpOutcome::Optimal { x, .. } => x,
        other => {
            return Err(Error::InternalConsistency(format!(
                "dual of a bounded feasible LP is not optimal: {other:?}"
            )))
        }
    };
    let lambda0 = &phi.constant - dot(b, &lambdas);
    let cert = FarkasCertificate { lambda0, lambdas };
    if !cert.verifies(a, b, phi) {
        return Err(Error::InternalConsistency("Farkas identity does not hold coefficientwise".into()));
    }
    Ok(cert)
}
