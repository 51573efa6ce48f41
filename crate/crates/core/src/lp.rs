//! Exact two-phase tableau simplex with Bland's rule.
//!
//! No tolerances: every pivot is exact, so optimality, infeasibility and
//! unboundedness verdicts are certificates in their own right.

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::rational::Rational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
    },
    /// `x` is feasible and `x + t ray` stays feasible for all `t >= 0`
    /// while the objective decreases without bound.
    Unbounded {
        x: Vec<Rational>,
        ray: Vec<Rational>,
    },
    Infeasible,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry is minus the objective value.
    z: Vec<Rational>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !self.z[c].is_zero() {
            let f = self.z[c].clone();
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over the columns allowed by `allowed`.
    /// Returns `Some(col)` if column `col` proves unboundedness.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> Option<usize> {
        loop {
            let Some(c) = (0..self.width).find(|&j| allowed(j) && self.z[j].is_negative()) else {
                return None;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Some(c),
            }
        }
    }

    fn point(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(i).clone();
            }
        }
        x
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x >= 0`.
pub fn solve_standard(a: &Matrix, b: &[Rational], c: &[Rational]) -> Result<LpOutcome> {
    let (m, n) = a.shape();
    if b.len() != m || c.len() != n {
        return Err(Error::Shape(format!(
            "LP with {m}x{n} constraints, {} right-hand sides, {} costs",
            b.len(),
            c.len()
        )));
    }
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row: Vec<Rational> = a.row(i).iter().map(|v| if neg { -v } else { v.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
        row.push(if neg { -&b[i] } else { b[i].clone() });
        rows.push(row);
    }
    // phase one: minimize the sum of artificials
    let mut z = vec![Rational::zero(); width + 1];
    for row in &rows {
        for j in 0..n {
            z[j] -= &row[j];
        }
        z[width] -= &row[width];
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        z,
        width,
    };
    let unbounded = t.run(&|_| true);
    debug_assert!(unbounded.is_none(), "phase one is bounded below by zero");
    if !t.z[width].is_zero() {
        return Ok(LpOutcome::Infeasible);
    }
    // drive remaining artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    // phase two
    let mut z = vec![Rational::zero(); width + 1];
    z[..n].clone_from_slice(c);
    for (i, &bj) in t.basis.iter().enumerate() {
        let cb = c[bj].clone();
        if cb.is_zero() {
            continue;
        }
        for (zj, v) in z.iter_mut().zip(&t.rows[i]) {
            *zj -= &cb * v;
        }
    }
    t.z = z;
    match t.run(&|j| j < n) {
        None => {
            let x = t.point(n);
            let value = dot(c, &x);
            Ok(LpOutcome::Optimal { x, value })
        }
        Some(col) => {
            let x = t.point(n);
            let mut ray = vec![Rational::zero(); n];
            ray[col] = Rational::from_integer(1.into());
            for (i, &bj) in t.basis.iter().enumerate() {
                if bj < n {
                    ray[bj] = -&t.rows[i][col];
                }
            }
            Ok(LpOutcome::Unbounded { x, ray })
        }
    }
}

/// Minimizes `c·x` over `{x ∈ R^d : A x <= b}` with free variables.
pub fn minimize_inequality(a: &Matrix, b: &[Rational], c: &[Rational]) -> Result<LpOutcome> {
    let (q, d) = a.shape();
    if b.len() != q || c.len() != d {
        return Err(Error::Shape(format!(
            "inequality LP with {q}x{d} constraints, {} right-hand sides, {} costs",
            b.len(),
            c.len()
        )));
    }
    // x = x+ - x-, slack s: [A, -A, I] (x+, x-, s) = b
    let std = Matrix::from_fn(q, 2 * d + q, |i, j| {
        if j < d {
            a.get(i, j).clone()
        } else if j < 2 * d {
            -a.get(i, j - d)
        } else if j - 2 * d == i {
            Rational::from_integer(1.into())
        } else {
            Rational::zero()
        }
    });
    let mut cost: Vec<Rational> = c.to_vec();
    cost.extend(c.iter().map(|v| -v));
    cost.extend((0..q).map(|_| Rational::zero()));
    let fold = |v: &[Rational]| -> Vec<Rational> { (0..d).map(|j| &v[j] - &v[d + j]).collect() };
    Ok(match solve_standard(&std, b, &cost)? {
        LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x: fold(&x), value },
        LpOutcome::Unbounded { x, ray } => LpOutcome::Unbounded {
            x: fold(&x),
            ray: fold(&ray),
        },
        LpOutcome::Infeasible => LpOutcome::Infeasible,
    })
}

/// Maximizes `c·x` over `{A x <= b}`; `value` in the result is the maximum.
pub fn maximize_inequality(a: &Matrix, b: &[Rational], c: &[Rational]) -> Result<LpOutcome> {
    let neg: Vec<Rational> = c.iter().map(|v| -v).collect();
    Ok(match minimize_inequality(a, b, &neg)? {
        LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x, value: -value },
        other => other,
    })
}

/// Some point of `{A x = b, x >= 0}`, if any.
pub fn feasible_standard(a: &Matrix, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    let zeros = vec![Rational::zero(); a.cols()];
    Ok(match solve_standard(a, b, &zeros)? {
        LpOutcome::Optimal { x, .. } => Some(x),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded { .. } => unreachable!("zero objective is bounded"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_optimum() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0 -> (8/5, 6/5)
        let a = Matrix::from_ints(&[[1, 2], [3, 1], [-1, 0], [0, -1]]);
        match maximize_inequality(&a, &v(&[4, 6, 0, 0]), &v(&[1, 1])).unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![rat(8, 5), rat(6, 5)]);
                assert_eq!(value, rat(14, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = Matrix::from_ints(&[[1], [-1]]);
        assert_eq!(minimize_inequality(&a, &v(&[0, -1]), &v(&[0])).unwrap(), LpOutcome::Infeasible);
        let a = Matrix::from_ints(&[[-1]]);
        match minimize_inequality(&a, &v(&[0]), &v(&[-1])).unwrap() {
            LpOutcome::Unbounded { x, ray } => {
                assert!(x[0] >= int(0));
                assert!(ray[0] > int(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_constraints() {
        let a = Matrix::zeros(0, 2);
        assert!(matches!(minimize_inequality(&a, &[], &v(&[0, 0])).unwrap(), LpOutcome::Optimal { .. }));
        assert!(matches!(minimize_inequality(&a, &[], &v(&[1, 0])).unwrap(), LpOutcome::Unbounded { .. }));
    }

    #[test]
    fn degenerate_redundant_rows() {
        // duplicated equality rows exercise the redundant-row removal
        let a = Matrix::from_ints(&[[1, 1], [1, 1], [2, 2]]);
        match solve_standard(&a, &v(&[1, 1, 2]), &v(&[1, 2])).unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, int(1));
                assert_eq!(x, v(&[1, 0]));
            }
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        // the optimum of a bounded random LP is feasible and no vertex of a
        // coarse grid beats it
        #[test]
        fn optimum_beats_grid(entries in proptest::collection::vec(-3i64..4, 6), costs in proptest::collection::vec(-3i64..4, 2)) {
            // box 0 <= x <= 3 plus two random rows with rhs 4
            let mut rows: Vec<Vec<i64>> = vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]];
            rows.push(entries[0..2].to_vec());
            rows.push(entries[2..4].to_vec());
            let a = Matrix::from_ints(&rows);
            let b = v(&[3, 3, 0, 0, 4 + entries[4].abs(), 4 + entries[5].abs()]);
            let c = v(&costs);
            match minimize_inequality(&a, &b, &c).unwrap() {
                LpOutcome::Optimal { x, value } => {
                    let ax = a.mul_vec(&x).unwrap();
                    prop_assert!(ax.iter().zip(&b).all(|(l, r)| l <= r));
                    for i in 0..=6 {
                        for j in 0..=6 {
                            let p = vec![rat(i, 2), rat(j, 2)];
                            let ap = a.mul_vec(&p).unwrap();
                            if ap.iter().zip(&b).all(|(l, r)| l <= r) {
                                prop_assert!(dot(&c, &p) >= value.clone());
                            }
                        }
                    }
                }
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        }
    }
}
