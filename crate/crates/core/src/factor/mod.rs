//! LP and SDP factorizations of nonnegative matrices.

pub mod farkas;
pub mod formulation;
pub mod rank;

pub use farkas::{farkas_certificate, AffineFunction, FarkasCertificate};
pub use formulation::{
    factorization_from_formulation, formulation_from_factorization, verify_formulation, LPFormulation,
};
pub use rank::{lp_rank_bounds, nonneg_rank_bounds, Budget, LowerWitness, RankInterval};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixDocument};
use crate::psd::is_psd;
use crate::rational::{self, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// `M = T U + μ 1` with `T`, `U`, `μ` nonnegative. The size is the inner
/// dimension `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPFactorization {
    pub t: Matrix,
    pub u: Matrix,
    pub mu: Vec<Rational>,
}

impl LPFactorization {
    pub fn new(t: Matrix, u: Matrix, mu: Vec<Rational>) -> Result<Self> {
        if t.cols() != u.rows() || t.rows() != mu.len() {
            return Err(Error::Shape(format!(
                "T is {}x{}, U is {}x{}, mu has {} entries",
                t.rows(),
                t.cols(),
                u.rows(),
                u.cols(),
                mu.len()
            )));
        }
        Ok(LPFactorization { t, u, mu })
    }

    pub fn size(&self) -> usize {
        self.t.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.t.rows(), self.u.cols())
    }

    /// `T U + μ 1`.
    pub fn product(&self) -> Matrix {
        self.t
            .mul(&self.u)
            .and_then(|p| p.add_row_shift(&self.mu))
            .expect("shapes checked at construction")
    }

    pub fn is_nonnegative(&self) -> bool {
        self.t.is_nonnegative() && self.u.is_nonnegative() && self.mu.iter().all(|x| !x.is_negative())
    }

    /// Pure shift `M = μ 1` with `r = 0`; requires constant nonnegative rows.
    pub fn pure_shift(m: &Matrix) -> Option<Self> {
        let mu: Vec<Rational> = (0..m.rows())
            .map(|i| m.row_min(i).unwrap_or_else(Rational::zero))
            .collect();
        let ok = (0..m.rows()).all(|i| m.row(i).iter().all(|x| x == &mu[i])) && mu.iter().all(|x| !x.is_negative());
        ok.then(|| LPFactorization {
            t: Matrix::zeros(m.rows(), 0),
            u: Matrix::zeros(0, m.cols()),
            mu,
        })
    }

    /// A certified factorization of size `min(#rows, #cols)`:
    /// `T = I, U = M - μ1` (rows shifted by their minima) or `T = M, U = I`.
    pub fn trivial(m: &Matrix) -> Result<Self> {
        if !m.is_nonnegative() {
            return Err(Error::FactorizationInvalid("matrix has a negative entry".into()));
        }
        if let Some(f) = Self::pure_shift(m) {
            return Ok(f);
        }
        let f = if m.rows() <= m.cols() {
            let mu: Vec<Rational> = (0..m.rows()).map(|i| m.row_min(i).expect("nonempty row")).collect();
            let neg: Vec<Rational> = mu.iter().map(|x| -x).collect();
            LPFactorization {
                t: Matrix::identity(m.rows()),
                u: m.add_row_shift(&neg)?,
                mu,
            }
        } else {
            LPFactorization {
                t: m.clone(),
                u: Matrix::identity(m.cols()),
                mu: vec![Rational::zero(); m.rows()],
            }
        };
        Ok(f)
    }

    /// `T_i = diag(T[i, :])`, `U_j = diag(U[:, j])`: the same size as an SDP factorization.
    pub fn diagonal_embedding(&self) -> SDPFactorization {
        let r = self.size();
        let diag = |v: Vec<Rational>| Matrix::from_fn(r, r, |a, b| if a == b { v[a].clone() } else { Rational::zero() });
        SDPFactorization {
            ts: (0..self.t.rows()).map(|i| diag(self.t.row(i).to_vec())).collect(),
            us: (0..self.u.cols()).map(|j| diag(self.u.col(j))).collect(),
            mu: self.mu.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&LPFactorizationDoc::from(self)).expect("factorization serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: LPFactorizationDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

/// Checks equality and nonnegativity, describing the first failure.
pub fn check_lp_factorization(m: &Matrix, f: &LPFactorization) -> Result<()> {
    if f.shape() != m.shape() {
        return Err(Error::Shape(format!(
            "factorization of shape {:?} for a {:?} matrix",
            f.shape(),
            m.shape()
        )));
    }
    if !f.is_nonnegative() {
        return Err(Error::FactorizationInvalid("negative entry in T, U or mu".into()));
    }
    let p = f.product();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if p.get(i, j) != m.get(i, j) {
                return Err(Error::FactorizationInvalid(format!(
                    "entry ({i}, {j}): TU + mu gives {}, matrix has {}",
                    rational::format(p.get(i, j)),
                    rational::format(m.get(i, j))
                )));
            }
        }
    }
    Ok(())
}

/// Whether `M = T U + μ 1` exactly with nonnegative data. Shape mismatch is an error.
pub fn verify_lp_factorization(m: &Matrix, f: &LPFactorization) -> Result<bool> {
    match check_lp_factorization(m, f) {
        Ok(()) => Ok(true),
        Err(Error::FactorizationInvalid(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LPFactorizationDoc {
    pub t: MatrixDocument,
    pub u: MatrixDocument,
    pub mu: Vec<String>,
}

impl From<&LPFactorization> for LPFactorizationDoc {
    fn from(f: &LPFactorization) -> Self {
        LPFactorizationDoc {
            t: f.t.to_document(),
            u: f.u.to_document(),
            mu: f.mu.iter().map(rational::format).collect(),
        }
    }
}

impl TryFrom<LPFactorizationDoc> for LPFactorization {
    type Error = Error;

    fn try_from(doc: LPFactorizationDoc) -> Result<Self> {
        let mu = doc.mu.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>()?;
        LPFactorization::new(doc.t.to_matrix()?, doc.u.to_matrix()?, mu)
    }
}

/// `M(i, j) = tr[T_i U_j] + μ(i)` with every `T_i`, `U_j` positive semidefinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SDPFactorization {
    pub ts: Vec<Matrix>,
    pub us: Vec<Matrix>,
    pub mu: Vec<Rational>,
}

/// `tr[A B]` for square matrices of equal size.
pub fn trace_product(a: &Matrix, b: &Matrix) -> Rational {
    let r = a.rows();
    let mut acc = Rational::zero();
    for i in 0..r {
        for k in 0..r {
            let x = a.get(i, k);
            let y = b.get(k, i);
            if !x.is_zero() && !y.is_zero() {
                acc += x * y;
            }
        }
    }
    acc
}

impl SDPFactorization {
    pub fn size(&self) -> usize {
        self.ts.first().or(self.us.first()).map_or(0, Matrix::rows)
    }

    pub fn product(&self) -> Matrix {
        // the nonzeros of each T_i, so diagonal factors cost O(r) per entry
        let support: Vec<Vec<(usize, usize, &Rational)>> = self
            .ts
            .iter()
            .map(|t| {
                (0..t.rows())
                    .flat_map(|a| (0..t.cols()).map(move |b| (a, b)))
                    .map(|(a, b)| (a, b, t.get(a, b)))
                    .filter(|(_, _, x)| !x.is_zero())
                    .collect()
            })
            .collect();
        Matrix::from_fn(self.ts.len(), self.us.len(), |i, j| {
            let u = &self.us[j];
            support[i].iter().map(|&(a, b, x)| x * u.get(b, a)).sum::<Rational>() + &self.mu[i]
        })
    }

    /// Certifies every factor psd; the error names the first offender.
    pub fn check_psd(&self) -> Result<()> {
        for (which, list) in [("T", &self.ts), ("U", &self.us)] {
            for (index, f) in list.iter().enumerate() {
                if f.rows() != f.cols() || !is_psd(f)? {
                    return Err(Error::NotPsd { which, index });
                }
            }
        }
        Ok(())
    }
}

/// Whether `M(i, j) = tr[T_i U_j] + μ(i)` exactly. Non-psd factors yield
/// [`Error::NotPsd`]; shape mismatches yield [`Error::Shape`].
pub fn verify_sdp_factorization(m: &Matrix, f: &SDPFactorization) -> Result<bool> {
    if f.ts.len() != m.rows() || f.us.len() != m.cols() || f.mu.len() != m.rows() {
        return Err(Error::Shape(format!(
            "{} T factors, {} U factors, {} shifts for a {:?} matrix",
            f.ts.len(),
            f.us.len(),
            f.mu.len(),
            m.shape()
        )));
    }
    let r = f.size();
    if f.ts.iter().chain(&f.us).any(|x| x.rows() != r || x.cols() != r) {
        return Err(Error::Shape(format!("all factors must be {r}x{r}")));
    }
    f.check_psd()?;
    if f.mu.iter().any(|x| x.is_negative()) {
        return Ok(false);
    }
    Ok(&f.product() == m)
}

/// Splits solutions by their columns `U_s`: coordinatewise-minimal columns
/// go to the first list, dominated ones to the second. Among equal columns
/// only the earliest counts as minimal.
pub fn solution_partition(f: &LPFactorization) -> (Vec<usize>, Vec<usize>) {
    let n = f.u.cols();
    let cols: Vec<Vec<Rational>> = (0..n).map(|j| f.u.col(j)).collect();
    let dominated = |s: usize| {
        (0..n).any(|o| {
            o != s
                && cols[o].iter().zip(&cols[s]).all(|(a, b)| a <= b)
                && (cols[o] != cols[s] || o < s)
        })
    };
    (0..n).partition(|&s| !dominated(s))
}
