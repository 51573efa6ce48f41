//! Certified intervals for the LP rank and the nonnegative rank.
//!
//! Lower bounds come from linear algebra (rank, and whether a shift can
//! lower it) and from rectangle covers of supports; upper bounds are
//! explicit factorizations found by a separable generator search or by
//! greedy residual peeling. Every reported number is backed by a certificate.

use super::{check_lp_factorization, LPFactorization};
use crate::error::{Error, Result};
use crate::lp::{feasible_standard, minimize_inequality, LpOutcome};
use crate::matrix::Matrix;
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub const BUDGET_ENV: &str = "FORMCX_RANK_BUDGET";

/// Search limits. The generator search only runs on matrices with at most
/// `max_entries` entries and for candidate sizes up to `max_rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub max_entries: usize,
    pub max_rank: usize,
    /// Total number of LP solves the upper-bound search may spend.
    pub max_lps: usize,
    /// Support patterns with more cells than this skip the exact cover.
    pub max_cover_cells: usize,
}

impl Default for Budget {
    fn default() -> Self {
        let max_lps = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(200_000);
        Budget {
            max_entries: 25,
            max_rank: 4,
            max_lps,
            max_cover_cells: 128,
        }
    }
}

/// Why the lower bound holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LowerWitness {
    /// Nothing beyond `0`.
    Trivial,
    /// `rank M`, minus one when some admissible shift `μ` lowers the rank.
    LinearRank { rank: usize, shift_lowers_rank: bool },
    /// Every admissible shift leaves a support needing this many rectangles;
    /// `shifted_rows` is a support pattern attaining the minimum.
    RectangleCover { cover_number: usize, shifted_rows: Vec<usize> },
    /// Rectangle cover number of `supp M`, minus one for the shift term.
    SupportCover { cover_number: usize, minus_shift: bool },
    /// Pairwise fooling entries of the support.
    FoolingSet { entries: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankInterval {
    pub lower: usize,
    pub upper: usize,
    pub certificate_upper: LPFactorization,
    pub certificate_lower: LowerWitness,
    /// Whether the search exhausted its budget before closing the interval.
    pub budget_exhausted: bool,
}

impl RankInterval {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Bounds on `rank_LP M` (shift allowed).
pub fn lp_rank_bounds(m: &Matrix, budget: &Budget) -> Result<RankInterval> {
    rank_bounds(m, budget, true)
}

/// Bounds on the nonnegative rank (same engine with `μ = 0`).
pub fn nonneg_rank_bounds(m: &Matrix, budget: &Budget) -> Result<RankInterval> {
    rank_bounds(m, budget, false)
}

fn rank_bounds(m: &Matrix, budget: &Budget, shift: bool) -> Result<RankInterval> {
    if !m.is_nonnegative() {
        return Err(Error::FactorizationInvalid("rank bounds need a nonnegative matrix".into()));
    }
    let (lower, witness) = lower_bound(m, budget, shift)?;
    let mut best = initial_upper(m, shift)?;
    if let Some(peeled) = peel(m, shift) {
        if peeled.size() < best.size() {
            best = peeled;
        }
    }
    let mut exhausted = false;
    if best.size() > lower {
        let mut search = Search {
            m,
            shift,
            lps_left: budget.max_lps,
        };
        let small = m.rows() * m.cols() <= budget.max_entries;
        if small {
            for r in lower.max(1)..best.size().min(budget.max_rank + 1) {
                match search.find(r) {
                    Some(f) => {
                        best = f;
                        break;
                    }
                    None if search.lps_left == 0 => {
                        exhausted = true;
                        break;
                    }
                    None => {}
                }
            }
        }
        if best.size() > lower && (!small || best.size() > budget.max_rank + 1) {
            exhausted = true;
        }
    }
    check_lp_factorization(m, &best)
        .map_err(|e| Error::InternalConsistency(format!("rank certificate does not verify: {e}")))?;
    if best.size() < lower {
        return Err(Error::InternalConsistency(format!(
            "upper certificate of size {} below the lower bound {lower}",
            best.size()
        )));
    }
    let upper = best.size();
    Ok(RankInterval {
        lower,
        upper,
        certificate_upper: best,
        certificate_lower: witness,
        budget_exhausted: exhausted && lower < upper,
    })
}

fn row_minima(m: &Matrix) -> Vec<Rational> {
    (0..m.rows()).map(|i| m.row_min(i).unwrap_or_else(Rational::zero)).collect()
}

fn initial_upper(m: &Matrix, shift: bool) -> Result<LPFactorization> {
    if shift {
        return LPFactorization::trivial(m);
    }
    let zero_mu = vec![Rational::zero(); m.rows()];
    if m.is_zero() {
        return LPFactorization::new(Matrix::zeros(m.rows(), 0), Matrix::zeros(0, m.cols()), zero_mu);
    }
    if m.rows() <= m.cols() {
        LPFactorization::new(Matrix::identity(m.rows()), m.clone(), zero_mu)
    } else {
        LPFactorization::new(m.clone(), Matrix::identity(m.cols()), zero_mu)
    }
}

// ---------------------------------------------------------------- lower bounds

fn lower_bound(m: &Matrix, budget: &Budget, shift: bool) -> Result<(usize, LowerWitness)> {
    let mut best = (0, LowerWitness::Trivial);
    let mut offer = |b: usize, w: LowerWitness| {
        if b > best.0 {
            best = (b, w);
        }
    };
    let rank = m.rank();
    let drop = shift && rank > 0 && shift_lowers_rank(m, rank)?;
    offer(
        rank - usize::from(drop),
        LowerWitness::LinearRank {
            rank,
            shift_lowers_rank: drop,
        },
    );
    let cells = m.rows() * m.cols();
    if cells <= budget.max_cover_cells.min(128) && m.cols() <= 64 {
        let support = Support::of(m, &vec![false; m.rows()]);
        let plain = support.cover_number();
        offer(
            plain.saturating_sub(usize::from(shift)),
            LowerWitness::SupportCover {
                cover_number: plain,
                minus_shift: shift,
            },
        );
        if shift {
            if let Some((cover, rows)) = min_cover_over_shifts(m) {
                offer(
                    cover,
                    LowerWitness::RectangleCover {
                        cover_number: cover,
                        shifted_rows: rows,
                    },
                );
            }
        } else {
            offer(
                plain,
                LowerWitness::RectangleCover {
                    cover_number: plain,
                    shifted_rows: vec![],
                },
            );
        }
    } else if cells <= 4 * budget.max_cover_cells {
        let fool = fooling_set(m);
        let b = fool.len().saturating_sub(usize::from(shift));
        offer(b, LowerWitness::FoolingSet { entries: fool });
    }
    Ok(best)
}

/// Whether some `0 <= μ <= rowmin` gives `rank(M - μ1) = rank M - 1`.
///
/// That happens exactly when `1` lies in the row space of `M` and some `z`
/// with `1·z = 1` has `0 <= M z <= rowmin`.
fn shift_lowers_rank(m: &Matrix, rank: usize) -> Result<bool> {
    let (rows, n) = m.shape();
    let mut with_ones = m.to_rows();
    with_ones.push(vec![Rational::one(); n]);
    if Matrix::from_rows(with_ones)?.rank() != rank {
        return Ok(false);
    }
    let mins = row_minima(m);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..rows {
        a.push(m.row(i).iter().map(|v| -v).collect::<Vec<_>>());
        b.push(Rational::zero());
        a.push(m.row(i).to_vec());
        b.push(mins[i].clone());
    }
    a.push(vec![Rational::one(); n]);
    b.push(Rational::one());
    a.push(vec![-Rational::one(); n]);
    b.push(-Rational::one());
    let a = Matrix::from_rows(a)?;
    Ok(minimize_inequality(&a, &b, &vec![Rational::zero(); n])? != LpOutcome::Infeasible)
}

/// Minimum rectangle cover number of `supp(M - μ1)` over admissible shifts.
/// Row `i` with positive minimum is either fully positive (`μ_i` below the
/// minimum) or loses its minimal entries (`μ_i` at the minimum).
fn min_cover_over_shifts(m: &Matrix) -> Option<(usize, Vec<usize>)> {
    let mins = row_minima(m);
    let shiftable: Vec<usize> = (0..m.rows()).filter(|&i| mins[i].is_positive()).collect();
    if shiftable.len() > 12 {
        return None;
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for mask in 0u32..(1 << shiftable.len()) {
        let mut shifted = vec![false; m.rows()];
        let rows: Vec<usize> = shiftable
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        for &i in &rows {
            shifted[i] = true;
        }
        let c = Support::of(m, &shifted).cover_number();
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, rows));
        }
    }
    best
}

/// Support as a set of cells, at most 128 of them.
struct Support {
    rows: usize,
    cols: usize,
    cells: u128,
}

impl Support {
    /// Cells of `M`, with rows flagged in `shifted` losing their minimal entries.
    fn of(m: &Matrix, shifted: &[bool]) -> Support {
        let (rows, cols) = m.shape();
        let mins = row_minima(m);
        let mut cells = 0u128;
        for i in 0..rows {
            for j in 0..cols {
                let v = m.get(i, j);
                let on = if shifted[i] { v > &mins[i] } else { v.is_positive() };
                if on {
                    cells |= 1 << (i * cols + j);
                }
            }
        }
        Support { rows, cols, cells }
    }

    fn has(&self, i: usize, j: usize) -> bool {
        self.cells >> (i * self.cols + j) & 1 == 1
    }

    fn row_mask(&self, i: usize) -> u64 {
        (0..self.cols).filter(|&j| self.has(i, j)).fold(0, |a, j| a | 1 << j)
    }

    /// Inclusion-maximal all-ones rectangles, as cell masks.
    fn maximal_rectangles(&self) -> Vec<u128> {
        let row_masks: Vec<u64> = (0..self.rows).map(|i| self.row_mask(i)).collect();
        let mut seen = std::collections::BTreeSet::new();
        // every maximal rectangle is determined by its column set, which is an
        // intersection of row supports
        let mut col_sets = std::collections::BTreeSet::new();
        let mut frontier: Vec<u64> = row_masks.iter().copied().filter(|&c| c != 0).collect();
        while let Some(c) = frontier.pop() {
            if !col_sets.insert(c) {
                continue;
            }
            for &r in &row_masks {
                let x = c & r;
                if x != 0 && !col_sets.contains(&x) {
                    frontier.push(x);
                }
            }
        }
        for c in col_sets {
            let rows: Vec<usize> = (0..self.rows).filter(|&i| row_masks[i] & c == c).collect();
            let mut mask = 0u128;
            for &i in &rows {
                for j in 0..self.cols {
                    if c >> j & 1 == 1 {
                        mask |= 1 << (i * self.cols + j);
                    }
                }
            }
            seen.insert(mask);
        }
        // drop rectangles contained in others
        let all: Vec<u128> = seen.into_iter().collect();
        all.iter()
            .copied()
            .filter(|&r| !all.iter().any(|&o| o != r && o & r == r))
            .collect()
    }

    /// Exact rectangle cover number by branch and bound.
    fn cover_number(&self) -> usize {
        if self.cells == 0 {
            return 0;
        }
        let rects = self.maximal_rectangles();
        let mut best = rects.len();
        cover_search(self.cells, &rects, 0, &mut best);
        best
    }
}

/// A large fooling set of `supp M` by bounded clique search on the
/// compatibility graph: entries `(i, j)`, `(k, l)` fool each other when
/// `M(i, l)` or `M(k, j)` vanishes.
fn fooling_set(m: &Matrix) -> Vec<(usize, usize)> {
    let has = |i: usize, j: usize| m.get(i, j).is_positive();
    let cells: Vec<(usize, usize)> = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| has(i, j))
        .collect();
    let fools = |a: (usize, usize), b: (usize, usize)| !has(a.0, b.1) || !has(b.0, a.1);
    let mut best: Vec<(usize, usize)> = Vec::new();
    let mut current = Vec::new();
    clique_search(&cells, 0, &mut current, &mut best, &fools, 20_000);
    best
}

fn cover_search(uncovered: u128, rects: &[u128], used: usize, best: &mut usize) {
    if uncovered == 0 {
        *best = (*best).min(used);
        return;
    }
    if used + 1 >= *best {
        return;
    }
    // branch on the uncovered cell with the fewest covering rectangles
    let mut pick: Option<Vec<u128>> = None;
    let mut bits = uncovered;
    while bits != 0 {
        let cell = bits & bits.wrapping_neg();
        bits ^= cell;
        let covering: Vec<u128> = rects.iter().copied().filter(|r| r & cell != 0).collect();
        if pick.as_ref().is_none_or(|p| covering.len() < p.len()) {
            pick = Some(covering);
        }
    }
    for r in pick.expect("some uncovered cell") {
        cover_search(uncovered & !r, rects, used + 1, best);
    }
}

fn clique_search(
    cells: &[(usize, usize)],
    start: usize,
    current: &mut Vec<(usize, usize)>,
    best: &mut Vec<(usize, usize)>,
    fools: &dyn Fn((usize, usize), (usize, usize)) -> bool,
    mut steps: usize,
) -> usize {
    if current.len() > best.len() {
        *best = current.clone();
    }
    for k in start..cells.len() {
        if steps == 0 || current.len() + (cells.len() - k) <= best.len() {
            break;
        }
        steps -= 1;
        let c = cells[k];
        if current.iter().all(|&o| fools(o, c)) {
            current.push(c);
            steps = clique_search(cells, k + 1, current, best, fools, steps);
            current.pop();
        }
    }
    steps
}

// ---------------------------------------------------------------- upper bounds

/// Distinct nonzero nonnegative vectors, each scaled to maximum entry 1.
fn normalized(vs: impl IntoIterator<Item = Vec<Rational>>) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for v in vs {
        let Some(top) = v.iter().max().filter(|t| t.is_positive()).cloned() else {
            continue;
        };
        let v: Vec<Rational> = v.iter().map(|x| x / &top).collect();
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

struct Search<'a> {
    m: &'a Matrix,
    shift: bool,
    lps_left: usize,
}

impl Search<'_> {
    fn spend(&mut self) -> bool {
        if self.lps_left == 0 {
            return false;
        }
        self.lps_left -= 1;
        true
    }

    /// A size-`r` factorization whose `U` rows or `T` columns are drawn from
    /// (shifted) rows or columns of `M`.
    fn find(&mut self, r: usize) -> Option<LPFactorization> {
        let m = self.m;
        let mins = row_minima(m);
        let shifted = m
            .add_row_shift(&mins.iter().map(|x| -x).collect::<Vec<_>>())
            .expect("row count matches");
        let mut row_gens: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        let mut col_gens: Vec<Vec<Rational>> = (0..m.cols()).map(|j| m.col(j)).collect();
        if self.shift {
            row_gens.extend((0..m.rows()).map(|i| shifted.row(i).to_vec()));
            col_gens.extend((0..m.cols()).map(|j| shifted.col(j)));
        }
        let row_gens = normalized(row_gens);
        let col_gens = normalized(col_gens);
        for subset in Subsets::new(row_gens.len(), r) {
            if let Some(f) = self.fit_rows(&subset.iter().map(|&k| row_gens[k].clone()).collect::<Vec<_>>()) {
                return Some(f);
            }
            if self.lps_left == 0 {
                return None;
            }
        }
        for subset in Subsets::new(col_gens.len(), r) {
            if let Some(f) = self.fit_cols(&subset.iter().map(|&k| col_gens[k].clone()).collect::<Vec<_>>()) {
                return Some(f);
            }
            if self.lps_left == 0 {
                return None;
            }
        }
        None
    }

    /// Fixed `U` (rows `gens`): each row of `M` separately as `t U + μ_i 1`.
    fn fit_rows(&mut self, gens: &[Vec<Rational>]) -> Option<LPFactorization> {
        let m = self.m;
        let (rows, n) = m.shape();
        let r = gens.len();
        let width = r + usize::from(self.shift);
        let a = Matrix::from_fn(n, width, |j, k| if k < r { gens[k][j].clone() } else { Rational::one() });
        let mut t = Matrix::zeros(rows, r);
        let mut mu = vec![Rational::zero(); rows];
        for i in 0..rows {
            if !self.spend() {
                return None;
            }
            let x = feasible_standard(&a, m.row(i)).ok()??;
            for k in 0..r {
                t.set(i, k, x[k].clone());
            }
            if self.shift {
                mu[i] = x[r].clone();
            }
        }
        let u = Matrix::from_rows(gens.to_vec()).ok()?;
        LPFactorization::new(t, u, mu).ok()
    }

    /// Fixed `T` (columns `gens`): solve for `U` and, with shifts, `μ` jointly.
    fn fit_cols(&mut self, gens: &[Vec<Rational>]) -> Option<LPFactorization> {
        let m = self.m;
        let (rows, n) = m.shape();
        let r = gens.len();
        let t = Matrix::from_fn(rows, r, |i, k| gens[k][i].clone());
        let mut u = Matrix::zeros(r, n);
        let mut mu = vec![Rational::zero(); rows];
        if !self.shift {
            for j in 0..n {
                if !self.spend() {
                    return None;
                }
                let x = feasible_standard(&t, &m.col(j)).ok()??;
                for k in 0..r {
                    u.set(k, j, x[k].clone());
                }
            }
        } else {
            if !self.spend() {
                return None;
            }
            // variables: U column-major (r * n), then μ (rows)
            let a = Matrix::from_fn(rows * n, r * n + rows, |row, var| {
                let (i, j) = (row / n, row % n);
                if var < r * n {
                    let (jj, k) = (var / r, var % r);
                    if jj == j {
                        t.get(i, k).clone()
                    } else {
                        Rational::zero()
                    }
                } else if var - r * n == i {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            });
            let b: Vec<Rational> = (0..rows * n).map(|row| m.get(row / n, row % n).clone()).collect();
            let x = feasible_standard(&a, &b).ok()??;
            for j in 0..n {
                for k in 0..r {
                    u.set(k, j, x[j * r + k].clone());
                }
            }
            mu = x[r * n..].to_vec();
        }
        LPFactorization::new(t, u, mu).ok()
    }
}

/// `r`-subsets of `0..n` in lexicographic order.
struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Subsets {
    fn new(n: usize, r: usize) -> Subsets {
        Subsets {
            n,
            current: (r <= n).then(|| (0..r).collect()),
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let r = out.len();
        let mut next = out.clone();
        let mut i = r;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - r + i {
                next[i] += 1;
                for k in i + 1..r {
                    next[k] = next[k - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Greedy peeling of rank-one terms `R_j c` (or `c R_i` on rows) from the
/// residual, each step zeroing at least one whole column or row.
fn peel(m: &Matrix, shift: bool) -> Option<LPFactorization> {
    let (rows, cols) = m.shape();
    let mu = if shift { row_minima(m) } else { vec![Rational::zero(); rows] };
    let mut res = m.add_row_shift(&mu.iter().map(|x| -x).collect::<Vec<_>>()).ok()?;
    let mut us: Vec<Vec<Rational>> = Vec::new();
    let mut vs: Vec<Vec<Rational>> = Vec::new();
    while !res.is_zero() {
        let mut best: Option<(usize, Vec<Rational>, Vec<Rational>)> = None;
        let mut consider = |u: Vec<Rational>, v: Vec<Rational>, res: &Matrix| {
            let zeroed = (0..rows)
                .flat_map(|i| (0..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| res.get(i, j).is_positive() && *res.get(i, j) == &u[i] * &v[j])
                .count();
            if best.as_ref().is_none_or(|(z, _, _)| zeroed > *z) {
                best = Some((zeroed, u, v));
            }
        };
        for j in 0..cols {
            let col = res.col(j);
            if col.iter().all(Zero::is_zero) {
                continue;
            }
            let c: Vec<Rational> = (0..cols)
                .map(|k| {
                    (0..rows)
                        .filter(|&i| col[i].is_positive())
                        .map(|i| res.get(i, k) / &col[i])
                        .min()
                        .expect("column has a positive entry")
                })
                .collect();
            consider(col, c, &res);
        }
        for i in 0..rows {
            let row = res.row(i).to_vec();
            if row.iter().all(Zero::is_zero) {
                continue;
            }
            let c: Vec<Rational> = (0..rows)
                .map(|k| {
                    (0..cols)
                        .filter(|&j| row[j].is_positive())
                        .map(|j| res.get(k, j) / &row[j])
                        .min()
                        .expect("row has a positive entry")
                })
                .collect();
            consider(c, row, &res);
        }
        let (_, u, v) = best?;
        res = Matrix::from_fn(rows, cols, |i, j| res.get(i, j) - &u[i] * &v[j]);
        us.push(u);
        vs.push(v);
    }
    let r = us.len();
    let t = Matrix::from_fn(rows, r, |i, k| us[k][i].clone());
    let u = Matrix::from_fn(r, cols, |k, j| vs[k][j].clone());
    LPFactorization::new(t, u, mu).ok()
}
