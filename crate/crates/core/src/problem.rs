//! Finite optimization problems, guarantee pairs and brute-force optima.

use crate::error::{Error, Result};
use crate::rational::Rational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// Whether `a` is at least as good as `b` under this sense.
    pub fn better_or_equal(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Sense::Maximize => a >= b,
            Sense::Minimize => a <= b,
        }
    }

    pub fn flip(self) -> Sense {
        match self {
            Sense::Maximize => Sense::Minimize,
            Sense::Minimize => Sense::Maximize,
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Maximize => "max",
            Sense::Minimize => "min",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InstanceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SolutionId(pub usize);

/// Object-safe view of a finite optimization problem.
///
/// Instances and solutions are addressed by their position in a fixed order.
/// `value` and `size` may assume in-range indices; the checked entry points
/// are [`eval_value`] and friends.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;
    fn sense(&self) -> Sense;
    fn num_instances(&self) -> usize;
    fn num_solutions(&self) -> usize;
    fn value(&self, f: usize, s: usize) -> Rational;
    fn size(&self, f: usize) -> Rational;
    fn instance_label(&self, f: usize) -> String;
    fn solution_label(&self, s: usize) -> String;
}

type ValueFn<I, S> = Arc<dyn Fn(&I, &S) -> Rational + Send + Sync>;
type SizeFn<I> = Arc<dyn Fn(&I) -> Rational + Send + Sync>;

/// A concrete problem with typed instance and solution payloads.
///
/// Both lists are sorted by the payload order at construction, which fixes the
/// row/column order of every matrix derived from the problem.
#[derive(Clone)]
pub struct ProblemSpec<I, S> {
    name: String,
    sense: Sense,
    instances: Vec<I>,
    solutions: Vec<S>,
    value: ValueFn<I, S>,
    size: SizeFn<I>,
}

impl<I, S> ProblemSpec<I, S>
where
    I: Ord + Clone + fmt::Debug + Send + Sync + 'static,
    S: Ord + Clone + fmt::Debug + Send + Sync + 'static,
{
    pub fn new(
        name: impl Into<String>,
        sense: Sense,
        mut instances: Vec<I>,
        mut solutions: Vec<S>,
        value: impl Fn(&I, &S) -> Rational + Send + Sync + 'static,
        size: impl Fn(&I) -> Rational + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        for (kind, empty) in [("instance", instances.is_empty()), ("solution", solutions.is_empty())] {
            if empty {
                return Err(Error::InvalidProblem(format!("{name}: empty {kind} list")));
            }
        }
        instances.sort();
        solutions.sort();
        if let Some(w) = instances.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidProblem(format!("{name}: duplicate instance {:?}", w[0])));
        }
        if let Some(w) = solutions.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidProblem(format!("{name}: duplicate solution {:?}", w[0])));
        }
        if let Some(f) = instances.iter().find(|f| size(f).is_negative()) {
            return Err(Error::InvalidProblem(format!("{name}: negative size for {f:?}")));
        }
        Ok(ProblemSpec {
            name,
            sense,
            instances,
            solutions,
            value: Arc::new(value),
            size: Arc::new(size),
        })
    }

    pub fn instances(&self) -> &[I] {
        &self.instances
    }

    pub fn solutions(&self) -> &[S] {
        &self.solutions
    }

    pub fn instance(&self, f: usize) -> &I {
        &self.instances[f]
    }

    pub fn solution(&self, s: usize) -> &S {
        &self.solutions[s]
    }

    pub fn instance_index(&self, f: &I) -> Option<usize> {
        self.instances.binary_search(f).ok()
    }

    pub fn solution_index(&self, s: &S) -> Option<usize> {
        self.solutions.binary_search(s).ok()
    }

    pub fn value_of(&self, f: &I, s: &S) -> Rational {
        (self.value)(f, s)
    }

    pub fn size_of(&self, f: &I) -> Rational {
        (self.size)(f)
    }

    /// The same problem with only the instances accepted by `keep`.
    pub fn restrict_instances(&self, keep: impl Fn(&I) -> bool) -> Result<Self> {
        let instances: Vec<I> = self.instances.iter().filter(|f| keep(f)).cloned().collect();
        if instances.is_empty() {
            return Err(Error::InvalidProblem(format!("{}: restriction keeps no instance", self.name)));
        }
        Ok(ProblemSpec {
            instances,
            ..self.clone()
        })
    }

    /// The same objective over an explicit instance list (sorted, deduplicated).
    pub fn with_instances(&self, mut instances: Vec<I>) -> Result<Self> {
        instances.sort();
        instances.dedup();
        if instances.is_empty() {
            return Err(Error::InvalidProblem(format!("{}: no instances", self.name)));
        }
        Ok(ProblemSpec {
            instances,
            ..self.clone()
        })
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl<I, S> Problem for ProblemSpec<I, S>
where
    I: fmt::Debug + Send + Sync,
    S: fmt::Debug + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn sense(&self) -> Sense {
        self.sense
    }

    fn num_instances(&self) -> usize {
        self.instances.len()
    }

    fn num_solutions(&self) -> usize {
        self.solutions.len()
    }

    fn value(&self, f: usize, s: usize) -> Rational {
        (self.value)(&self.instances[f], &self.solutions[s])
    }

    fn size(&self, f: usize) -> Rational {
        (self.size)(&self.instances[f])
    }

    fn instance_label(&self, f: usize) -> String {
        format!("{:?}", self.instances[f])
    }

    fn solution_label(&self, s: usize) -> String {
        format!("{:?}", self.solutions[s])
    }
}

impl<I, S> fmt::Debug for ProblemSpec<I, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("sense", &self.sense)
            .field("instances", &self.instances.len())
            .field("solutions", &self.solutions.len())
            .finish()
    }
}

fn check_instance(p: &dyn Problem, f: InstanceId) -> Result<()> {
    if f.0 >= p.num_instances() {
        return Err(Error::Identifier {
            kind: "instance",
            id: f.0,
            len: p.num_instances(),
        });
    }
    Ok(())
}

fn check_solution(p: &dyn Problem, s: SolutionId) -> Result<()> {
    if s.0 >= p.num_solutions() {
        return Err(Error::Identifier {
            kind: "solution",
            id: s.0,
            len: p.num_solutions(),
        });
    }
    Ok(())
}

pub fn eval_value(p: &dyn Problem, f: InstanceId, s: SolutionId) -> Result<Rational> {
    check_instance(p, f)?;
    check_solution(p, s)?;
    Ok(p.value(f.0, s.0))
}

/// Optimum of `val_f` by exhaustive enumeration, with the first optimal solution.
pub fn brute_force_optimum(p: &dyn Problem, f: InstanceId) -> Result<(Rational, SolutionId)> {
    check_instance(p, f)?;
    let sense = p.sense();
    let mut best = p.value(f.0, 0);
    let mut arg = 0;
    for s in 1..p.num_solutions() {
        let v = p.value(f.0, s);
        if sense.better_or_equal(&v, &best) && v != best {
            best = v;
            arg = s;
        }
    }
    Ok((best, SolutionId(arg)))
}

/// Completeness and soundness guarantees, one pair per instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guarantees {
    #[serde(with = "crate::rational::serde_str::vec")]
    pub complete: Vec<Rational>,
    #[serde(with = "crate::rational::serde_str::vec")]
    pub sound: Vec<Rational>,
}

impl Guarantees {
    /// Checks the length and the order `C >= S` (max) resp. `C <= S` (min).
    pub fn new(p: &dyn Problem, complete: Vec<Rational>, sound: Vec<Rational>) -> Result<Self> {
        let m = p.num_instances();
        if complete.len() != m || sound.len() != m {
            return Err(Error::Shape(format!(
                "guarantees of length {}/{} for {m} instances",
                complete.len(),
                sound.len()
            )));
        }
        for (f, (c, s)) in complete.iter().zip(&sound).enumerate() {
            if !p.sense().better_or_equal(c, s) {
                return Err(Error::GuaranteeOrder {
                    instance: f,
                    complete: c.clone(),
                    sound: s.clone(),
                });
            }
        }
        Ok(Guarantees { complete, sound })
    }

    pub fn from_fn(
        p: &dyn Problem,
        mut c: impl FnMut(usize) -> Rational,
        mut s: impl FnMut(usize) -> Rational,
    ) -> Result<Self> {
        let n = p.num_instances();
        Self::new(p, (0..n).map(&mut c).collect(), (0..n).map(&mut s).collect())
    }
}

/// `C(f) = tau |f|`, `S(f) = sigma |f|`.
pub fn proportional_guarantees(p: &dyn Problem, tau: &Rational, sigma: &Rational) -> Result<Guarantees> {
    Guarantees::from_fn(p, |f| tau * p.size(f), |f| sigma * p.size(f))
}

/// `C(f) = S(f) = ` the true optimum of `f`.
pub fn exact_guarantees(p: &dyn Problem) -> Result<Guarantees> {
    let opt = (0..p.num_instances())
        .map(|f| brute_force_optimum(p, InstanceId(f)).map(|(v, _)| v))
        .collect::<Result<Vec<_>>>()?;
    Guarantees::new(p, opt.clone(), opt)
}

/// Whether the optimum of `f` respects the soundness guarantee.
pub fn is_sound(p: &dyn Problem, g: &Guarantees, f: usize) -> bool {
    let (opt, _) = brute_force_optimum(p, InstanceId(f)).expect("index in range");
    p.sense().better_or_equal(&g.sound[f], &opt)
}

/// The sound instances `F^S`, in instance order.
pub fn sound_instances(p: &dyn Problem, g: &Guarantees) -> Vec<InstanceId> {
    (0..p.num_instances())
        .filter(|&f| is_sound(p, g, f))
        .map(InstanceId)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn toy() -> ProblemSpec<u8, u8> {
        // instances: thresholds, solutions: points; value = min(f, s)
        ProblemSpec::new(
            "toy",
            Sense::Maximize,
            vec![3, 1, 2],
            vec![0, 2, 1, 4],
            |f: &u8, s: &u8| int((*f).min(*s) as i64),
            |f: &u8| int(*f as i64),
        )
        .unwrap()
    }

    #[test]
    fn lists_are_sorted() {
        let p = toy();
        assert_eq!(p.instances(), &[1, 2, 3]);
        assert_eq!(p.solutions(), &[0, 1, 2, 4]);
        assert_eq!(p.instance_index(&2), Some(1));
    }

    #[test]
    fn duplicates_and_empties_rejected() {
        let dup = ProblemSpec::new("d", Sense::Maximize, vec![1u8, 1], vec![0u8], |_: &u8, _: &u8| int(0), |_: &u8| int(0));
        assert!(matches!(dup, Err(Error::InvalidProblem(_))));
        let empty = ProblemSpec::new("e", Sense::Maximize, Vec::<u8>::new(), vec![0u8], |_: &u8, _: &u8| int(0), |_: &u8| int(0));
        assert!(empty.is_err());
    }

    #[test]
    fn checked_ids() {
        let p = toy();
        assert!(matches!(
            eval_value(&p, InstanceId(3), SolutionId(0)),
            Err(Error::Identifier { kind: "instance", .. })
        ));
        assert_eq!(eval_value(&p, InstanceId(2), SolutionId(2)).unwrap(), int(2));
    }

    #[test]
    fn optimum_has_witness() {
        let p = toy();
        let (v, s) = brute_force_optimum(&p, InstanceId(1)).unwrap();
        assert_eq!(v, int(2));
        assert_eq!(p.value(1, s.0), v);
        assert_eq!(s, SolutionId(2));
    }

    #[test]
    fn guarantee_order_enforced() {
        let p = toy();
        assert!(matches!(
            proportional_guarantees(&p, &rat(1, 2), &int(1)),
            Err(Error::GuaranteeOrder { .. })
        ));
        let g = proportional_guarantees(&p, &int(1), &rat(1, 2)).unwrap();
        // optimum equals the threshold, which exceeds half of it
        assert!(sound_instances(&p, &g).is_empty());
    }
}
