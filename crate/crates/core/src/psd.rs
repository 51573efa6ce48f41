//! Positive semidefiniteness by exact `L D L^T` elimination.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

/// `M = L D L^T` with `L` unit lower triangular and `D >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ldl {
    pub l: Matrix,
    pub d: Vec<Rational>,
}

impl Ldl {
    pub fn reconstruct(&self) -> Matrix {
        let n = self.d.len();
        Matrix::from_fn(n, n, |i, j| {
            (0..n)
                .filter(|&k| k <= i.min(j))
                .map(|k| self.l.get(i, k) * &self.d[k] * self.l.get(j, k))
                .sum()
        })
    }
}

pub fn is_symmetric(m: &Matrix) -> bool {
    m.rows() == m.cols() && (0..m.rows()).all(|i| (0..i).all(|j| m.get(i, j) == m.get(j, i)))
}

/// Returns an `L D L^T` certificate if `m` is symmetric positive semidefinite,
/// `None` otherwise.
///
/// A negative pivot refutes semidefiniteness; a zero pivot is only allowed
/// when the rest of its row in the Schur complement is zero as well.
pub fn ldlt(m: &Matrix) -> Result<Option<Ldl>> {
    if m.rows() != m.cols() {
        return Err(Error::Shape(format!("psd check on a {}x{} matrix", m.rows(), m.cols())));
    }
    if !is_symmetric(m) {
        return Ok(None);
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut l = Matrix::identity(n);
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        let p = a.get(k, k).clone();
        if p.is_negative() {
            return Ok(None);
        }
        if p.is_zero() {
            if (k + 1..n).any(|j| !a.get(k, j).is_zero()) {
                return Ok(None);
            }
            d.push(p);
            continue;
        }
        for i in k + 1..n {
            let lik = a.get(i, k) / &p;
            if lik.is_zero() {
                continue;
            }
            for j in k + 1..=i {
                let delta = &lik * a.get(k, j);
                *a.get_mut(i, j) -= &delta;
                if i != j {
                    *a.get_mut(j, i) -= delta;
                }
            }
            l.set(i, k, lik);
        }
        d.push(p);
    }
    debug_assert!(n == 0 || l.get(0, 0).is_one());
    Ok(Some(Ldl { l, d }))
}

pub fn is_psd(m: &Matrix) -> Result<bool> {
    let n = m.rows();
    let diagonal = m.cols() == n && (0..n).all(|i| (0..n).all(|j| i == j || m.get(i, j).is_zero()));
    if diagonal {
        return Ok((0..n).all(|i| !m.get(i, i).is_negative()));
    }
    Ok(ldlt(m)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert!(!is_psd(&Matrix::from_ints(&[[0, 1], [1, 0]])).unwrap());
        assert!(is_psd(&Matrix::from_ints(&[[0]])).unwrap());
        assert!(is_psd(&Matrix::from_ints(&[[2, 0], [0, 0]])).unwrap());
        assert!(!is_psd(&Matrix::from_ints(&[[2, 0], [0, -1]])).unwrap());
        assert!(is_psd(&Matrix::from_ints(&[[2, 1], [1, 1]])).unwrap());
        assert!(!is_psd(&Matrix::from_ints(&[[1, 2], [2, 1]])).unwrap());
        assert!(is_psd(&Matrix::from_ints(&[[1, 1, 0], [1, 1, 0], [0, 0, 0]])).unwrap());
        assert!(!is_psd(&Matrix::from_ints(&[[1, 0], [1, 1]])).unwrap());
        assert!(ldlt(&Matrix::zeros(2, 3)).is_err());
    }

    proptest! {
        // Gram matrices are psd and the certificate reconstructs them
        #[test]
        fn gram_is_psd(entries in proptest::collection::vec(-4i64..5, 12)) {
            let b = Matrix::from_fn(4, 3, |i, j| int(entries[i * 3 + j]));
            let g = b.mul(&b.transpose()).unwrap();
            let cert = ldlt(&g).unwrap().expect("gram matrix is psd");
            prop_assert_eq!(cert.reconstruct(), g.clone());
            prop_assert!(cert.d.iter().all(|x| !x.is_negative()));
            // subtracting a large multiple of the identity breaks it
            let shifted = g.sub(&Matrix::identity(4).scale(&int(1000))).unwrap();
            prop_assert!(!is_psd(&shifted).unwrap());
        }
    }
}
