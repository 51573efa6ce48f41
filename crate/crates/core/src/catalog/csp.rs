//! Boolean constraints, clause families and the CSP problem builders.

use super::graph::{all_assignments, Assignment};
use super::Limits;
use crate::error::{Error, Result};
use crate::problem::{ProblemSpec, Sense};
use crate::rational::{self, Rational};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Literal {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Literal {
        Literal { var, negated: true }
    }

    pub fn eval(self, s: &[bool]) -> bool {
        s[self.var] != self.negated
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", if self.negated { "!" } else { "" }, self.var)
    }
}

/// A constraint on a few variables.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Clause {
    /// `x_{v1} + ... + x_{vk} = parity (mod 2)`.
    Xor { vars: Vec<usize>, parity: bool },
    Or { lits: Vec<Literal> },
    And { lits: Vec<Literal> },
    /// Arbitrary function of `vars`; bit `t` of `table` is the value at the
    /// point whose coordinate `q` is bit `len - 1 - q` of `t`.
    Table { vars: Vec<usize>, table: u16 },
}

impl Clause {
    pub fn xor(vars: &[usize], parity: bool) -> Clause {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        Clause::Xor { vars, parity }
    }

    pub fn or(lits: &[Literal]) -> Clause {
        let mut lits = lits.to_vec();
        lits.sort_unstable();
        Clause::Or { lits }
    }

    pub fn and(lits: &[Literal]) -> Clause {
        let mut lits = lits.to_vec();
        lits.sort_unstable();
        Clause::And { lits }
    }

    pub fn vars(&self) -> Vec<usize> {
        match self {
            Clause::Xor { vars, .. } | Clause::Table { vars, .. } => vars.clone(),
            Clause::Or { lits } | Clause::And { lits } => lits.iter().map(|l| l.var).collect(),
        }
    }

    pub fn eval(&self, s: &[bool]) -> bool {
        match self {
            Clause::Xor { vars, parity } => (vars.iter().filter(|&&v| s[v]).count() % 2 == 1) == *parity,
            Clause::Or { lits } => lits.iter().any(|l| l.eval(s)),
            Clause::And { lits } => lits.iter().all(|l| l.eval(s)),
            Clause::Table { vars, table } => {
                let t = vars.iter().fold(0usize, |t, &v| t << 1 | s[v] as usize);
                table >> t & 1 == 1
            }
        }
    }

    fn order_key(&self) -> (Vec<usize>, u8, u32) {
        let bits = |lits: &[Literal]| lits.iter().fold(0u32, |m, l| m << 1 | l.negated as u32);
        match self {
            Clause::Xor { vars, parity } => (vars.clone(), 0, *parity as u32),
            Clause::Or { lits } => (self.vars(), 1, bits(lits)),
            Clause::And { lits } => (self.vars(), 2, bits(lits)),
            Clause::Table { vars, table } => (vars.clone(), 3, *table as u32),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let vars = self.vars();
        if vars.iter().any(|&v| v >= n) {
            return Err(Error::InvalidProblem(format!("{self:?} uses a variable outside 0..{n}")));
        }
        if vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidProblem(format!("{self:?}: variables must be distinct")));
        }
        if let Clause::Table { vars, table } = self {
            if vars.len() > 3 || (*table as u32) >> (1u32 << vars.len()) != 0 {
                return Err(Error::InvalidProblem(format!("{self:?}: bad truth table")));
            }
        }
        Ok(())
    }
}

/// Clauses sort by their variable tuple first, then by payload.
impl Ord for Clause {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |lits: &[Literal], sep: &str| {
            lits.iter().map(|l| format!("{l:?}")).collect::<Vec<_>>().join(sep)
        };
        match self {
            Clause::Xor { vars, parity } => {
                let vs: Vec<String> = vars.iter().map(|v| format!("x{v}")).collect();
                write!(f, "({}={})", vs.join("^"), *parity as u8)
            }
            Clause::Or { lits } => write!(f, "({})", join(lits, "|")),
            Clause::And { lits } => write!(f, "({})", join(lits, "&")),
            Clause::Table { vars, table } => {
                let vs: Vec<String> = vars.iter().map(|v| format!("x{v}")).collect();
                write!(f, "T{table:#x}({})", vs.join(","))
            }
        }
    }
}

/// Clause families named by the CSP builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClauseKind {
    /// Parity equations on exactly `k` variables.
    Xor(usize),
    /// Disjunctions of at most `k` literals on distinct variables (unit clauses included).
    Sat(usize),
    /// Disjunctions of exactly two literals.
    TwoCnf,
    /// Directed-cut constraints `!x_i & x_j`, `i != j`.
    Dicut,
    /// Conjunctions of exactly two literals.
    Conj2,
    /// All functions of at most two variables, each listed once.
    Csp2,
}

impl ClauseKind {
    /// The whole clause family over `n` variables, in canonical order.
    pub fn family(self, n: usize) -> Vec<Clause> {
        let mut out = Vec::new();
        match self {
            ClauseKind::Xor(k) => {
                for vars in combinations(n, k) {
                    out.push(Clause::xor(&vars, false));
                    out.push(Clause::xor(&vars, true));
                }
            }
            ClauseKind::Sat(k) => {
                for size in 1..=k {
                    for vars in combinations(n, size) {
                        for signs in 0..1u32 << size {
                            out.push(Clause::or(&signed(&vars, signs)));
                        }
                    }
                }
            }
            ClauseKind::TwoCnf | ClauseKind::Conj2 => {
                for vars in combinations(n, 2) {
                    for signs in 0..4 {
                        let lits = signed(&vars, signs);
                        out.push(if self == ClauseKind::TwoCnf {
                            Clause::or(&lits)
                        } else {
                            Clause::and(&lits)
                        });
                    }
                }
            }
            ClauseKind::Dicut => {
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            out.push(Clause::and(&[Literal::neg(i), Literal::pos(j)]));
                        }
                    }
                }
            }
            ClauseKind::Csp2 => {
                out.push(Clause::Table { vars: vec![], table: 0 });
                out.push(Clause::Table { vars: vec![], table: 1 });
                for v in 0..n {
                    // x and !x; the two constants are listed once above
                    out.push(Clause::Table { vars: vec![v], table: 0b01 });
                    out.push(Clause::Table { vars: vec![v], table: 0b10 });
                }
                for vars in combinations(n, 2) {
                    for table in 0..16u16 {
                        if depends_on_both(table) {
                            out.push(Clause::Table { vars: vars.clone(), table });
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }
}

fn signed(vars: &[usize], signs: u32) -> Vec<Literal> {
    vars.iter()
        .enumerate()
        .map(|(t, &v)| Literal { var: v, negated: signs >> t & 1 == 1 })
        .collect()
}

/// Whether a two-variable truth table depends on both arguments.
fn depends_on_both(table: u16) -> bool {
    let at = |a: usize, b: usize| table >> (a << 1 | b) & 1;
    let on_first = (0..2).any(|b| at(0, b) != at(1, b));
    let on_second = (0..2).any(|a| at(a, 0) != at(a, 1));
    on_first && on_second
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A weighted list of clauses over `n` variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseSet {
    pub n: usize,
    pub clauses: Vec<Clause>,
    pub weights: Vec<Rational>,
}

impl ClauseSet {
    /// Sorts clauses canonically; rejects negative weights and malformed clauses.
    pub fn new(n: usize, clauses: Vec<Clause>, weights: Vec<Rational>) -> Result<ClauseSet> {
        if clauses.len() != weights.len() {
            return Err(Error::InvalidProblem("one weight per clause required".into()));
        }
        if weights.iter().any(|w| w < &rational::zero()) {
            return Err(Error::InvalidProblem("negative clause weight".into()));
        }
        for c in &clauses {
            c.validate(n)?;
        }
        let mut pairs: Vec<_> = clauses.into_iter().zip(weights).collect();
        pairs.sort();
        let (clauses, weights) = pairs.into_iter().unzip();
        Ok(ClauseSet { n, clauses, weights })
    }

    pub fn unweighted(n: usize, clauses: Vec<Clause>) -> Result<ClauseSet> {
        let w = vec![rational::one(); clauses.len()];
        ClauseSet::new(n, clauses, w)
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().sum()
    }

    /// Weight of satisfied clauses.
    pub fn satisfied(&self, s: &Assignment) -> Rational {
        self.clauses
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| c.eval(&s.0))
            .map(|(_, w)| w)
            .sum()
    }

    /// Weight of unsatisfied clauses.
    pub fn unsatisfied(&self, s: &Assignment) -> Rational {
        self.total_weight() - self.satisfied(s)
    }

    /// Largest number of clauses any variable occurs in.
    pub fn max_occurrence(&self) -> usize {
        let mut occ = vec![0usize; self.n];
        for c in &self.clauses {
            for v in c.vars() {
                occ[v] += 1;
            }
        }
        occ.into_iter().max().unwrap_or(0)
    }
}

impl fmt::Debug for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (t, (c, w)) in self.clauses.iter().zip(&self.weights).enumerate() {
            if t > 0 {
                f.write_str(" ")?;
            }
            if w == &rational::one() {
                write!(f, "{c:?}")?;
            } else {
                write!(f, "{}*{c:?}", rational::format(w))?;
            }
        }
        f.write_str("}")
    }
}

/// Options for the clause-subset enumeration.
#[derive(Debug, Clone, Default)]
pub struct CspOptions {
    /// Drop instances in which a variable occurs in more than this many clauses.
    pub degree_bound: Option<usize>,
    /// Only subsets with at most this many clauses.
    pub max_clauses: Option<usize>,
    pub limits: Option<Limits>,
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, t| acc * (n - t) as u128 / (t + 1) as u128)
}

/// All sub-multisets-free clause subsets of `family`, each clause weighted from `palette`.
fn clause_subsets(
    n: usize,
    family: &[Clause],
    palette: &[Rational],
    opts: &CspOptions,
    what: &str,
) -> Result<Vec<ClauseSet>> {
    let cap = opts.max_clauses.unwrap_or(family.len()).min(family.len());
    let limits = opts.limits.clone().unwrap_or_default();
    let needed: u128 = (0..=cap)
        .map(|j| binom(family.len(), j).saturating_mul((palette.len() as u128).saturating_pow(j as u32)))
        .fold(0u128, u128::saturating_add);
    limits.check_instances(what, needed)?;

    let mut out = Vec::new();
    let mut chosen: Vec<(Clause, Rational)> = Vec::new();
    fn go(
        start: usize,
        n: usize,
        family: &[Clause],
        palette: &[Rational],
        cap: usize,
        degree_bound: Option<usize>,
        chosen: &mut Vec<(Clause, Rational)>,
        out: &mut Vec<ClauseSet>,
    ) {
        let (cs, ws): (Vec<_>, Vec<_>) = chosen.iter().cloned().unzip();
        let set = ClauseSet::new(n, cs, ws).expect("family clauses are valid");
        if degree_bound.is_some_and(|d| set.max_occurrence() > d) {
            // occurrences only grow along this branch
            return;
        }
        out.push(set);
        if chosen.len() == cap {
            return;
        }
        for t in start..family.len() {
            for w in palette {
                chosen.push((family[t].clone(), w.clone()));
                go(t + 1, n, family, palette, cap, degree_bound, chosen, out);
                chosen.pop();
            }
        }
    }
    go(0, n, family, palette, cap, opts.degree_bound, &mut chosen, &mut out);
    Ok(out)
}

fn check_vars(n: usize, what: &str, limits: &Limits) -> Result<Vec<Assignment>> {
    if n < 2 {
        return Err(Error::InvalidProblem(format!("{what} needs n >= 2")));
    }
    limits.check_solutions(what, 1u128 << n.min(127))?;
    Ok(all_assignments(n).collect())
}

/// Max-CSP over the clause family `kind` with 0/1 weights; value = satisfied clauses.
pub fn build_csp(kind: ClauseKind, n: usize, opts: &CspOptions) -> Result<ProblemSpec<ClauseSet, Assignment>> {
    match kind {
        ClauseKind::Xor(k) | ClauseKind::Sat(k) if k == 0 || k > n => {
            return Err(Error::InvalidProblem(format!("{kind:?} needs 1 <= k <= n")))
        }
        _ => {}
    }
    let what = format!("Max-{kind:?}");
    let limits = opts.limits.clone().unwrap_or_default();
    let solutions = check_vars(n, &what, &limits)?;
    let instances = clause_subsets(n, &kind.family(n), &[rational::one()], opts, &what)?;
    ProblemSpec::new(
        what,
        Sense::Maximize,
        instances,
        solutions,
        |l: &ClauseSet, s: &Assignment| l.satisfied(s),
        ClauseSet::total_weight,
    )
}

/// Minimization CSPs: value = weight of unsatisfied clauses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinCspKind {
    /// Parity equations on two variables.
    MinUnCut,
    /// Two-literal disjunctions.
    Min2Cnf,
}

impl MinCspKind {
    pub fn clause_kind(self) -> ClauseKind {
        match self {
            MinCspKind::MinUnCut => ClauseKind::Xor(2),
            MinCspKind::Min2Cnf => ClauseKind::TwoCnf,
        }
    }
}

/// The problem object for a min-CSP over explicitly given instances.
pub fn min_csp_problem(
    kind: MinCspKind,
    n: usize,
    instances: Vec<ClauseSet>,
) -> Result<ProblemSpec<ClauseSet, Assignment>> {
    let solutions = check_vars(n, &format!("{kind:?}"), &Limits::default())?;
    ProblemSpec::new(
        format!("{kind:?}"),
        Sense::Minimize,
        instances,
        solutions,
        |l: &ClauseSet, s: &Assignment| l.unsatisfied(s),
        ClauseSet::total_weight,
    )
}

/// Min-CSP with clause weights drawn from `palette` (`[1]` gives 0/1 weights).
pub fn build_min_csp(
    kind: MinCspKind,
    n: usize,
    palette: &[Rational],
    opts: &CspOptions,
) -> Result<ProblemSpec<ClauseSet, Assignment>> {
    if palette.is_empty() || palette.iter().any(|w| w <= &rational::zero()) {
        return Err(Error::InvalidProblem("weight palette must be positive and non-empty".into()));
    }
    let what = format!("{kind:?}");
    let instances = clause_subsets(n, &kind.clause_kind().family(n), palette, opts, &what)?;
    min_csp_problem(kind, n, instances)
}

/// The general CSP problem (max sense) over explicitly given instances.
pub fn csp_problem(
    name: &str,
    n: usize,
    instances: Vec<ClauseSet>,
) -> Result<ProblemSpec<ClauseSet, Assignment>> {
    let solutions = check_vars(n, name, &Limits::default())?;
    ProblemSpec::new(
        name,
        Sense::Maximize,
        instances,
        solutions,
        |l: &ClauseSet, s: &Assignment| l.satisfied(s),
        ClauseSet::total_weight,
    )
}
