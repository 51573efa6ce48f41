//! Rounding a nearby nonnegative matrix back to a slack matrix.
//!
//! [`bounded_factorization`] writes a rank-`r` matrix as `Σ a_i b_i` with the
//! `b_i` taken from its rows and `‖a_i‖∞ ≤ 1`, by picking a row basis of
//! locally maximal volume. [`round_to_problem`] uses it on `M̃ - M` to turn
//! a factorization of `M̃` into one of `N = M + Σ|a_i| b`, the slack matrix
//! for slightly weaker completeness guarantees up to a nonnegative shift.

use crate::error::{Error, Result};
use crate::factor::{verify_lp_factorization, verify_sdp_factorization, LPFactorization, LPFactorizationDoc, SDPFactorization};
use crate::matrix::{Matrix, MatrixDocument};
use crate::problem::{Guarantees, Problem, Sense};
use crate::rational::{self, int, Rational};
use crate::slack::build_slack;
use num_traits::{Signed, Zero};
use serde::Serialize;

/// Exhaustive basis search up to this many rows.
pub const EXHAUSTIVE_ROWS: usize = 12;

/// One rank-one term `a b` (column times row).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneTerm {
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
}

/// `M = Σ a_i b_i` with `‖a_i‖∞ ≤ 1` and `‖b_i‖∞ ≤ ‖M‖∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedRankFactorization {
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<RankOneTerm>,
    pub target_norm: Rational,
    /// Rows of `M` used as the `b_i`.
    pub basis_rows: Vec<usize>,
}

impl BoundedRankFactorization {
    pub fn product(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for t in &self.terms {
            for (i, ai) in t.a.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                for (j, bj) in t.b.iter().enumerate() {
                    *m.get_mut(i, j) += ai * bj;
                }
            }
        }
        m
    }

    /// Checks all three invariants against `m`.
    pub fn check(&self, m: &Matrix) -> Result<()> {
        if (self.rows, self.cols) != m.shape() {
            return Err(Error::Shape(format!("factorization of a {:?} matrix, got {:?}", (self.rows, self.cols), m.shape())));
        }
        if &self.product() != m {
            return Err(Error::InternalConsistency("Σ a_i b_i differs from M".into()));
        }
        if self.terms.len() != m.rank() {
            return Err(Error::InternalConsistency(format!(
                "{} terms for a rank {} matrix",
                self.terms.len(),
                m.rank()
            )));
        }
        let one = rational::one();
        for (i, t) in self.terms.iter().enumerate() {
            if rational::max_abs(&t.a) > one {
                return Err(Error::InternalConsistency(format!("‖a_{i}‖∞ > 1")));
            }
            if rational::max_abs(&t.b) > self.target_norm {
                return Err(Error::InternalConsistency(format!("‖b_{i}‖∞ > ‖M‖∞")));
            }
        }
        Ok(())
    }
}

/// `(a⁺, a⁻)` with `a = a⁺ - a⁻` and disjoint supports.
pub fn split_signs(a: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    a.iter()
        .map(|x| {
            if x.is_positive() {
                (x.clone(), Rational::zero())
            } else {
                (Rational::zero(), -x)
            }
        })
        .unzip()
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    crate::catalog::csp::combinations(n, r)
}

/// Coefficients of every row of `sub` in the basis rows `basis`: `A B = sub`.
fn coefficients(sub: &Matrix, basis: &[usize]) -> Result<Matrix> {
    if basis.is_empty() {
        return Ok(Matrix::zeros(sub.rows(), 0));
    }
    let bt = sub.select_rows(basis).transpose();
    let rows = (0..sub.rows())
        .map(|k| bt.solve(sub.row(k)))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

/// Row basis whose coefficient matrix is bounded by 1: the exact argmax of
/// `|det|` over all row subsets when there are few rows, otherwise the
/// local optimum of single-row exchanges started from the echelon pivots.
/// Either way no exchange increases `|det|`, which is exactly `|a| ≤ 1`.
fn max_volume_rows(sub: &Matrix) -> Result<Vec<usize>> {
    let (m, r) = sub.shape();
    if m <= EXHAUSTIVE_ROWS {
        let mut best: Option<(Rational, Vec<usize>)> = None;
        for rows in subsets(m, r) {
            let d = sub.select_rows(&rows).determinant()?.abs();
            if best.as_ref().is_none_or(|(b, _)| &d > b) {
                best = Some((d, rows));
            }
        }
        return Ok(best.map(|(_, rows)| rows).unwrap_or_default());
    }
    let mut basis = sub.transpose().pivot_columns();
    loop {
        let a = coefficients(sub, &basis)?;
        let mut swap: Option<(Rational, usize, usize)> = None;
        for k in 0..m {
            for j in 0..r {
                let v = a.get(k, j).abs();
                if v > rational::one() && swap.as_ref().is_none_or(|(b, _, _)| &v > b) {
                    swap = Some((v, k, j));
                }
            }
        }
        match swap {
            // replacing basis row j by row k scales |det| by |a_kj| > 1
            Some((_, k, j)) => basis[j] = k,
            None => return Ok(basis),
        }
    }
}

/// Bounded-coefficient rank factorization; the zero matrix gets no terms.
pub fn bounded_factorization(m: &Matrix) -> Result<BoundedRankFactorization> {
    let cols = m.pivot_columns();
    let sub = m.select_cols(&cols);
    let basis = max_volume_rows(&sub)?;
    let a = coefficients(&sub, &basis)?;
    let terms = basis
        .iter()
        .enumerate()
        .map(|(j, &row)| RankOneTerm {
            a: a.col(j),
            b: m.row(row).to_vec(),
        })
        .collect();
    let f = BoundedRankFactorization {
        rows: m.rows(),
        cols: m.cols(),
        terms,
        target_norm: m.max_abs(),
        basis_rows: basis,
    };
    f.check(m)?;
    Ok(f)
}

/// Output of [`round_to_problem`].
#[derive(Debug, Clone)]
pub struct RoundingResult {
    pub n: Matrix,
    /// `C'(f) = C(f) ± (rank M + rank M̃) ‖M̃ - M‖∞`.
    pub c_prime: Vec<Rational>,
    /// `‖M̃ - M‖∞`.
    pub perturbation: Rational,
    pub rank_m: usize,
    pub rank_mtilde: usize,
    pub difference: BoundedRankFactorization,
    /// `slack_{C'} - N`, nonnegative rowwise.
    pub row_shift: Vec<Rational>,
    /// `size(F̃) + 2k` when a factorization of `M̃` was supplied.
    pub size_bound: Option<usize>,
    /// Factorization of the `C'`-slack matrix `M + (rank M + rank M̃) δ 1`.
    pub certificate: Option<LPFactorization>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundingReport {
    pub n: MatrixDocument,
    pub c_prime: Vec<String>,
    pub perturbation: String,
    pub rank_m: usize,
    pub rank_mtilde: usize,
    pub terms: usize,
    pub row_shift: Vec<String>,
    pub size_bound: Option<usize>,
    pub certificate: Option<LPFactorizationDoc>,
}

impl RoundingResult {
    pub fn k(&self) -> usize {
        self.difference.terms.len()
    }

    pub fn report(&self) -> RoundingReport {
        RoundingReport {
            n: self.n.to_document(),
            c_prime: self.c_prime.iter().map(rational::format).collect(),
            perturbation: rational::format(&self.perturbation),
            rank_m: self.rank_m,
            rank_mtilde: self.rank_mtilde,
            terms: self.k(),
            row_shift: self.row_shift.iter().map(rational::format).collect(),
            size_bound: self.size_bound,
            certificate: self.certificate.as_ref().map(LPFactorizationDoc::from),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.report()).expect("report serializes")
    }

    /// The nonnegative rank-one pieces `a⁺ (b - b_i)` and `a⁻ (b + b_i)`.
    pub fn added_terms(&self) -> Vec<RankOneTerm> {
        let b = vec![self.perturbation.clone(); self.n.cols()];
        let mut out = Vec::new();
        for t in &self.difference.terms {
            let (pos, neg) = split_signs(&t.a);
            out.push(RankOneTerm {
                a: pos,
                b: b.iter().zip(&t.b).map(|(x, y)| x - y).collect(),
            });
            out.push(RankOneTerm {
                a: neg,
                b: b.iter().zip(&t.b).map(|(x, y)| x + y).collect(),
            });
        }
        out
    }

    /// The slack matrix for `C'`: `N` plus [`RoundingResult::row_shift`].
    pub fn c_prime_slack(&self) -> Matrix {
        self.n.add_row_shift(&self.row_shift).expect("one shift per row")
    }

    /// SDP certificate for the `C'`-slack matrix from one of `M̃`: the `2k` added terms become
    /// extra `1 x 1` diagonal blocks.
    pub fn sdp_certificate(&self, ftilde: &SDPFactorization) -> Result<SDPFactorization> {
        let added = self.added_terms();
        let r = ftilde.size();
        let size = r + added.len();
        let extend = |base: &Matrix, extra: Vec<Rational>| {
            Matrix::from_fn(size, size, |x, y| match (x < r, y < r) {
                (true, true) => base.get(x, y).clone(),
                (false, false) if x == y => extra[x - r].clone(),
                _ => Rational::zero(),
            })
        };
        let f = SDPFactorization {
            ts: ftilde
                .ts
                .iter()
                .enumerate()
                .map(|(i, t)| extend(t, added.iter().map(|p| p.a[i].clone()).collect()))
                .collect(),
            us: ftilde
                .us
                .iter()
                .enumerate()
                .map(|(j, u)| extend(u, added.iter().map(|p| p.b[j].clone()).collect()))
                .collect(),
            mu: ftilde.mu.iter().zip(&self.row_shift).map(|(a, b)| a + b).collect(),
        };
        if !verify_sdp_factorization(&self.c_prime_slack(), &f)? {
            return Err(Error::InternalConsistency("extended SDP factorization does not reproduce the C' slack".into()));
        }
        Ok(f)
    }
}

/// Rounds `M̃` (close to the slack matrix `M` of `(p, g)`) to `N` and the
/// weakened guarantees `C'`. With `ftilde`, also returns a factorization of
/// `N` of size at most `size(F̃) + 2k`, `k = rank(M̃ - M)`.
pub fn round_to_problem(
    p: &dyn Problem,
    g: &Guarantees,
    mtilde: &Matrix,
    ftilde: Option<&LPFactorization>,
) -> Result<RoundingResult> {
    let slack = build_slack(p, g)?;
    let complete: Vec<Rational> = slack.rows.iter().map(|f| g.complete[f.0].clone()).collect();
    round_matrix(&slack.entries, &complete, p.sense(), mtilde, ftilde)
}

/// [`round_to_problem`] on an explicit slack matrix `m` whose row `i` has
/// completeness guarantee `complete[i]`.
pub fn round_matrix(
    m: &Matrix,
    complete: &[Rational],
    sense: Sense,
    mtilde: &Matrix,
    ftilde: Option<&LPFactorization>,
) -> Result<RoundingResult> {
    if mtilde.shape() != m.shape() || complete.len() != m.rows() {
        return Err(Error::Shape(format!(
            "M is {:?} with {} guarantees, M~ is {:?}",
            m.shape(),
            complete.len(),
            mtilde.shape()
        )));
    }
    for i in 0..mtilde.rows() {
        for j in 0..mtilde.cols() {
            if mtilde.get(i, j).is_negative() {
                // witness is the (row, column) position
                return Err(Error::NotNonnegative {
                    witness: vec![int(i as i64), int(j as i64)],
                    value: mtilde.get(i, j).clone(),
                });
            }
        }
    }
    let diff = mtilde.sub(m)?;
    let difference = bounded_factorization(&diff)?;
    let delta = diff.max_abs();
    let (rank_m, rank_mtilde) = (m.rank(), mtilde.rank());
    let k = difference.terms.len();
    if k > rank_m + rank_mtilde {
        return Err(Error::InternalConsistency("rank(M~ - M) exceeds rank M + rank M~".into()));
    }

    // N = M + Σ |a_i| b, with b = δ 1
    let weights: Vec<Rational> = (0..m.rows())
        .map(|i| difference.terms.iter().map(|t| t.a[i].abs()).sum::<Rational>() * &delta)
        .collect();
    let n = m.add_row_shift(&weights)?;
    let mut result = RoundingResult {
        n,
        c_prime: Vec::new(),
        perturbation: delta.clone(),
        rank_m,
        rank_mtilde,
        difference,
        row_shift: Vec::new(),
        size_bound: None,
        certificate: None,
    };

    // the same N from M~ plus the 2k nonnegative rank-one terms
    let added = result.added_terms();
    let mut other = mtilde.clone();
    for t in &added {
        if t.a.iter().chain(&t.b).any(|x| x.is_negative()) {
            return Err(Error::InternalConsistency("b ± b_i has a negative entry".into()));
        }
        for (i, ai) in t.a.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, bj) in t.b.iter().enumerate() {
                *other.get_mut(i, j) += ai * bj;
            }
        }
    }
    if other != result.n {
        return Err(Error::InternalConsistency("the two expressions for N differ".into()));
    }

    let budget = int((rank_m + rank_mtilde) as i64) * &delta;
    result.c_prime = complete
        .iter()
        .map(|c| match sense {
            Sense::Maximize => c + &budget,
            Sense::Minimize => c - &budget,
        })
        .collect();
    result.row_shift = weights.iter().map(|w| &budget - w).collect();
    if result.row_shift.iter().any(|s| s.is_negative()) {
        return Err(Error::InternalConsistency("C' does not absorb the rounding shift".into()));
    }

    if let Some(ft) = ftilde {
        if ft.shape() != mtilde.shape() {
            return Err(Error::Shape(format!(
                "factorization of shape {:?} for M~ of shape {:?}",
                ft.shape(),
                mtilde.shape()
            )));
        }
        if !verify_lp_factorization(mtilde, ft)? {
            return Err(Error::FactorizationInvalid("supplied factorization does not reproduce M~".into()));
        }
        let r = ft.size();
        let size = r + added.len();
        let t = Matrix::from_fn(m.rows(), size, |i, c| {
            if c < r {
                ft.t.get(i, c).clone()
            } else {
                added[c - r].a[i].clone()
            }
        });
        let u = Matrix::from_fn(size, m.cols(), |c, j| {
            if c < r {
                ft.u.get(c, j).clone()
            } else {
                added[c - r].b[j].clone()
            }
        });
        let for_n = LPFactorization::new(t, u, ft.mu.clone())?;
        if !verify_lp_factorization(&result.n, &for_n)? {
            return Err(Error::InternalConsistency("assembled factorization does not reproduce N".into()));
        }
        // absorb the row shift into μ: a factorization of the C' slack
        let mu = for_n.mu.iter().zip(&result.row_shift).map(|(a, b)| a + b).collect();
        let cert = LPFactorization::new(for_n.t, for_n.u, mu)?;
        if !verify_lp_factorization(&result.c_prime_slack(), &cert)? {
            return Err(Error::InternalConsistency("certificate does not reproduce the C' slack".into()));
        }
        result.size_bound = Some(r + 2 * k);
        result.certificate = Some(cert);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_maxcut;
    use crate::problem::exact_guarantees;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn rank_one_and_identity() {
        let m = Matrix::from_ints(&[[2, 4, 6], [1, 2, 3], [-2, -4, -6]]);
        let f = bounded_factorization(&m).unwrap();
        assert_eq!(f.terms.len(), 1);
        assert_eq!(f.terms[0].b, m.row(0).to_vec());
        assert_eq!(f.terms[0].a, vec![int(1), rat(1, 2), int(-1)]);

        let f = bounded_factorization(&Matrix::identity(2)).unwrap();
        assert_eq!(f.terms.len(), 2);
        assert!(f.terms.iter().flat_map(|t| &t.a).all(|x| x.is_zero() || x == &int(1)));

        let f = bounded_factorization(&Matrix::zeros(2, 3)).unwrap();
        assert!(f.terms.is_empty());
    }

    #[test]
    fn rank_three_four_by_five() {
        // rows 3, 4 are combinations of rows 0..3
        let m = Matrix::from_ints(&[
            [1, 2, 0, -1, 3],
            [0, 1, 5, 2, -2],
            [4, 0, 1, 1, 1],
            [5, 3, 6, 2, 2],
        ]);
        assert_eq!(m.rank(), 3);
        let f = bounded_factorization(&m).unwrap();
        assert_eq!(f.terms.len(), 3);
        f.check(&m).unwrap();
    }

    #[test]
    fn greedy_exchange_on_tall_matrices() {
        // 16 rows: forces the exchange search
        let m = Matrix::from_fn(16, 3, |i, j| int(((i * 7 + j * 3) % 5) as i64 - 2 + (i * j) as i64 % 3));
        let f = bounded_factorization(&m).unwrap();
        f.check(&m).unwrap();
    }

    fn maxcut3() -> (crate::ProblemSpec<crate::catalog::Graph, crate::catalog::Assignment>, Guarantees, Matrix) {
        let p = build_maxcut(3, None).unwrap();
        let g = exact_guarantees(&p).unwrap();
        let m = build_slack(&p, &g).unwrap().entries;
        (p, g, m)
    }

    #[test]
    fn zero_perturbation() {
        let (p, g, m) = maxcut3();
        let f = LPFactorization::trivial(&m).unwrap();
        let r = round_to_problem(&p, &g, &m, Some(&f)).unwrap();
        assert_eq!(r.n, m);
        assert_eq!(r.k(), 0);
        assert_eq!(r.size_bound, Some(f.size()));
        assert!(r.c_prime.iter().zip(&g.complete).all(|(a, b)| a == b));
    }

    #[test]
    fn uniform_shift_is_rank_one() {
        let (p, g, m) = maxcut3();
        let mt = m.add_row_shift(&vec![rat(1, 10); m.rows()]).unwrap();
        let ft = LPFactorization::trivial(&mt).unwrap();
        let r = round_to_problem(&p, &g, &mt, Some(&ft)).unwrap();
        assert_eq!(r.k(), 1);
        assert_eq!(r.size_bound, Some(ft.size() + 2));
        assert!(r.certificate.as_ref().unwrap().size() <= ft.size() + 2);
        assert!(r.n.is_nonnegative());
        let sdp = r.sdp_certificate(&ft.diagonal_embedding()).unwrap();
        assert_eq!(sdp.size(), ft.size() + 2);
    }

    #[test]
    fn single_entry_change() {
        let (p, g, m) = maxcut3();
        let mut mt = m.clone();
        let v = mt.get(1, 2) + rat(1, 5);
        mt.set(1, 2, v);
        let ft = LPFactorization::trivial(&mt).unwrap();
        let r = round_to_problem(&p, &g, &mt, Some(&ft)).unwrap();
        assert!(r.k() <= r.rank_m + r.rank_mtilde);
        assert!(r.n.is_nonnegative());
        assert!(r.row_shift.iter().all(|s| !s.is_negative()));
        // N + shift is the slack matrix for C'
        let shifted = r.n.add_row_shift(&r.row_shift).unwrap();
        let budget = int((r.rank_m + r.rank_mtilde) as i64) * rat(1, 5);
        assert_eq!(shifted, m.add_row_shift(&vec![budget; m.rows()]).unwrap());
    }

    #[test]
    fn errors() {
        let (p, g, m) = maxcut3();
        assert!(matches!(round_to_problem(&p, &g, &Matrix::zeros(1, 1), None), Err(Error::Shape(_))));
        let mut neg = m.clone();
        neg.set(0, 0, int(-1));
        assert!(matches!(round_to_problem(&p, &g, &neg, None), Err(Error::NotNonnegative { .. })));
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..6, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c)
                .prop_map(move |v| Matrix::from_fn(r, c, |i, j| int(v[i * c + j])))
        })
    }

    proptest! {
        #[test]
        fn bounded_factorization_invariants(m in small_matrix()) {
            let f = bounded_factorization(&m).unwrap();
            prop_assert!(f.check(&m).is_ok());
        }

        // Σ|a|b - Σ a b_i = Σ a⁺(b - b_i) + Σ a⁻(b + b_i), entrywise
        #[test]
        fn sign_split_identity(a in proptest::collection::vec(-4i64..5, 1..5), bi in proptest::collection::vec(-3i64..4, 1..5)) {
            let a: Vec<Rational> = a.into_iter().map(int).collect();
            let bi: Vec<Rational> = bi.into_iter().map(int).collect();
            let delta = rational::max_abs(&bi);
            let (pos, neg) = split_signs(&a);
            for (x, (p, q)) in a.iter().zip(pos.iter().zip(&neg)) {
                prop_assert_eq!(&(p - q), x);
                prop_assert!((p * q).is_zero());
                prop_assert_eq!(&(p + q), &x.abs());
            }
            for (i, x) in a.iter().enumerate() {
                for y in &bi {
                    prop_assert!(!(&delta - y).is_negative() && !(&delta + y).is_negative());
                    let lhs = x.abs() * &delta - x * y;
                    let rhs = &pos[i] * (&delta - y) + &neg[i] * (&delta + y);
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
