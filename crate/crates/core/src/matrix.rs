//! Dense matrices over [`Rational`] with exact elimination.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors. A zero-row input yields a `0 x 0` matrix.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Shape(format!(
                "row {i} has {} entries, expected {cols}",
                r.len()
            )));
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer convenience constructor, mostly for tests and docs.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| rational::int(x)).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.get_mut(i, j) += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    fn zip_with(&self, other: &Matrix, op: impl Fn(&Rational, &Rational) -> Rational) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// `self + shift * 1`, adding `shift[i]` to every entry of row `i`.
    pub fn add_row_shift(&self, shift: &[Rational]) -> Result<Matrix> {
        if shift.len() != self.rows {
            return Err(Error::Shape(format!(
                "shift of length {} for {} rows",
                shift.len(),
                self.rows
            )));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + &shift[i]))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Largest absolute entry (the entrywise sup-norm).
    pub fn max_abs(&self) -> Rational {
        rational::max_abs(&self.data)
    }

    pub fn row_min(&self, i: usize) -> Option<Rational> {
        self.row(i).iter().min().cloned()
    }

    /// Exact rank by Gaussian elimination over the rationals.
    pub fn rank(&self) -> usize {
        self.pivot_columns().len()
    }

    /// Columns holding the pivots of the row echelon form: a column basis.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        m.row_echelon()
    }

    /// Reduces `self` in place to row echelon form and returns the pivot columns.
    fn row_echelon(&mut self) -> Vec<usize> {
        let mut rank = 0;
        let mut pivots = Vec::new();
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| !self.get(r, c).is_zero()) else {
                continue;
            };
            self.swap_rows(p, rank);
            let pivot = self.get(rank, c).clone();
            for r in rank + 1..self.rows {
                if self.get(r, c).is_zero() {
                    continue;
                }
                let factor = self.get(r, c) / &pivot;
                for k in c..self.cols {
                    let d = &factor * self.get(rank, k);
                    *self.get_mut(r, k) -= d;
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.cols {
                self.data.swap(a * self.cols + k, b * self.cols + k);
            }
        }
    }

    /// Exact determinant of a square matrix.
    pub fn determinant(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "determinant of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det *= &pivot;
            for r in c + 1..m.rows {
                if m.get(r, c).is_zero() {
                    continue;
                }
                let factor = m.get(r, c) / &pivot;
                for k in c..m.cols {
                    let d = &factor * m.get(c, k);
                    *m.get_mut(r, k) -= d;
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * x = rhs` for square nonsingular `self`.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.rows;
        if self.cols != n || rhs.len() != n {
            return Err(Error::Shape("solve needs a square system".into()));
        }
        let mut aug = Matrix::from_fn(n, n + 1, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                rhs[i].clone()
            }
        });
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !aug.get(r, c).is_zero())
                .ok_or_else(|| Error::Shape("singular system".into()))?;
            aug.swap_rows(p, c);
            let pivot = aug.get(c, c).clone();
            for k in c..=n {
                let v = aug.get(c, k) / &pivot;
                aug.set(c, k, v);
            }
            for r in 0..n {
                if r == c || aug.get(r, c).is_zero() {
                    continue;
                }
                let factor = aug.get(r, c).clone();
                for k in c..=n {
                    let d = &factor * aug.get(c, k);
                    *aug.get_mut(r, k) -= d;
                }
            }
        }
        Ok((0..n).map(|i| aug.get(i, n).clone()).collect())
    }

    pub fn to_document(&self) -> MatrixDocument {
        MatrixDocument {
            rows: self.rows,
            cols: self.cols,
            row_labels: Vec::new(),
            col_labels: Vec::new(),
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(rational::format).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("matrix serializes")
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for i in 0..self.rows {
            out.write_record(self.row(i).iter().map(rational::format))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Matrix> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            rows.push(rec.iter().map(rational::parse).collect::<Result<Vec<_>>>()?);
        }
        Matrix::from_rows(rows)
    }

    /// Loads a matrix from a `.json` document or a `.csv` file.
    pub fn load(path: impl AsRef<Path>) -> Result<Matrix> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            Matrix::read_csv(text.as_bytes())
        } else {
            let doc: MatrixDocument = serde_json::from_str(&text)?;
            doc.to_matrix()
        }
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// JSON form of a matrix: dimensions, `"p/q"` cells and optional labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub row_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub col_labels: Vec<String>,
}

impl MatrixDocument {
    pub fn to_matrix(&self) -> Result<Matrix> {
        let m = if self.entries.is_empty() {
            Matrix::zeros(0, self.cols)
        } else {
            Matrix::from_rows(
                self.entries
                    .iter()
                    .map(|r| r.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            )?
        };
        if m.rows() != self.rows || (m.rows() > 0 && m.cols() != self.cols) {
            return Err(Error::Shape(format!(
                "document declares {}x{} but has {}x{} entries",
                self.rows,
                self.cols,
                m.rows(),
                m.cols()
            )));
        }
        let m = if m.rows() > 0 { m } else { Matrix::zeros(0, self.cols) };
        if !self.row_labels.is_empty() && self.row_labels.len() != m.rows() {
            return Err(Error::Shape("row label count differs from entries".into()));
        }
        if !self.col_labels.is_empty() && self.col_labels.len() != m.cols() {
            return Err(Error::Shape("column label count differs from entries".into()));
        }
        Ok(m)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(rational::format).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}
