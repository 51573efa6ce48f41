//! The concrete reductions: conflict graphs, clause gadgets, multicut copies
//! and the matching-to-tour construction. Every builder certifies its output
//! before returning it.

mod conflict;
mod csp;
mod hamiltonian;
mod multicut;

pub use conflict::{maxcut_to_maxindep, maxcut_to_vertexcover};
pub use csp::{
    maxcsp2_embed_xor2, maxcut_to_dicut, maxcut_to_max2sat, maxcut_to_min2cnf, maxcut_to_minuncut, xor2_to_conjsat,
    xor_table,
};
pub use hamiltonian::{
    completion_cycle, cycle_bounds, matching_to_hamiltonian, tilde_graph, tilde_vertex, CycleBounds,
};
pub use multicut::{
    max_multicut_decomposed, maxcut_to_multicut, multicut_alpha, multicut_image, multicut_layout, multicut_mu,
    multicut_partition, nominal_shift, MulticutLayout, Slot,
};

use crate::error::{Error, Result};
use crate::problem::{Guarantees, InstanceId, Problem, ProblemSpec};
use crate::rational::{self, Rational};
use crate::reduce::{
    matrix_reduction, verify_reduction, ExactViolation, GuaranteeViolation, MatrixReduction, Reduction, SimpleParams, SimpleReduction};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Above this many `Cm` entries the matrix identity is not materialized.
pub const MATRIX_CHECK_LIMIT: usize = 1 << 20;

/// A certified reduction together with both problems and their guarantees.
#[derive(Clone)]
pub struct GadgetResult {
    pub name: String,
    pub source: Arc<dyn Problem>,
    pub source_guarantees: Guarantees,
    pub target: Arc<dyn Problem>,
    pub target_guarantees: Guarantees,
    pub reduction: Reduction,
    pub notes: GadgetNotes,
}

/// What the gadget is and the constants it was built with.
#[derive(Debug, Clone, Default, Serialize)]
pub struct GadgetNotes {
    pub provenance: String,
    /// Exact rationals as `p/q` strings, keyed by name (`alpha`, `mu`, `tau1`, ...).
    pub constants: BTreeMap<String, String>,
}

impl GadgetNotes {
    fn new(provenance: impl Into<String>) -> Self {
        GadgetNotes {
            provenance: provenance.into(),
            constants: BTreeMap::new(),
        }
    }

    fn set(&mut self, key: &str, v: &Rational) {
        self.constants.insert(key.to_string(), rational::format(v));
    }

    fn set_count(&mut self, key: &str, v: usize) {
        self.constants.insert(key.to_string(), v.to_string());
    }

    fn simple(provenance: &str, params: &SimpleParams, sr: &SimpleReduction) -> Self {
        let mut notes = GadgetNotes::new(provenance);
        notes.set("alpha", &params.alpha);
        notes.set("mu", &params.mu);
        notes.set("size_ratio", &params.ratio());
        notes.set("tau1", &params.tau1);
        notes.set("sigma1", &params.sigma1);
        notes.set("tau2", &sr.tau2);
        notes.set("sigma2", &sr.sigma2);
        notes
    }
}

impl fmt::Debug for GadgetResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GadgetResult")
            .field("name", &self.name)
            .field("source", &self.source.name())
            .field("target", &self.target.name())
            .field("images", &self.reduction.beta.len())
            .field("notes", &self.notes)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MatrixCheck {
    Verified { rows: usize, cols: usize },
    Skipped { reason: String },
    Failed { detail: String },
}

/// JSON-ready outcome of re-running both checks on a gadget.
#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub gadget: String,
    pub provenance: String,
    pub source: String,
    pub target: String,
    pub source_instances: usize,
    pub source_sound_instances: usize,
    pub source_solutions: usize,
    pub target_instances: usize,
    pub target_solutions: usize,
    pub pairs_checked: usize,
    pub exact_violations: usize,
    pub guarantee_violations: usize,
    /// The first failing `(f1, s1)` pair, if any.
    pub first_exact_violation: Option<ExactViolation>,
    pub first_guarantee_violation: Option<GuaranteeViolation>,
    pub matrix_identity: MatrixCheck,
    pub constants: BTreeMap<String, String>,
    pub passed: bool,
}

impl GadgetResult {
    pub fn verify(&self) -> Result<crate::reduce::ReductionReport> {
        verify_reduction(
            self.source.as_ref(),
            &self.source_guarantees,
            self.target.as_ref(),
            &self.target_guarantees,
            &self.reduction,
        )
    }

    pub fn matrix_reduction(&self) -> Result<MatrixReduction> {
        matrix_reduction(
            self.source.as_ref(),
            &self.source_guarantees,
            self.target.as_ref(),
            &self.target_guarantees,
            &self.reduction,
        )
    }

    fn matrix_is_small(&self) -> bool {
        self.source.num_solutions().saturating_mul(self.target.num_solutions()) <= MATRIX_CHECK_LIMIT
    }

    /// Runs [`verify_reduction`] and, when `Cm` is small enough, the matrix identity.
    pub fn certify(&self) -> Result<CertificationReport> {
        let report = self.verify()?;
        let matrix_identity = if !self.matrix_is_small() {
            MatrixCheck::Skipped {
                reason: format!(
                    "Cm would have {} x {} entries",
                    self.target.num_solutions(),
                    self.source.num_solutions()
                ),
            }
        } else {
            match self.matrix_reduction() {
                Ok(mr) => MatrixCheck::Verified {
                    rows: mr.m1.rows(),
                    cols: mr.m1.cols(),
                },
                Err(Error::InternalConsistency(detail)) => MatrixCheck::Failed { detail },
                Err(e) => return Err(e),
            }
        };
        let passed = report.passed() && !matches!(matrix_identity, MatrixCheck::Failed { .. });
        Ok(CertificationReport {
            gadget: self.name.clone(),
            provenance: self.notes.provenance.clone(),
            source: self.source.name().to_string(),
            target: self.target.name().to_string(),
            source_instances: self.source.num_instances(),
            source_sound_instances: self.reduction.beta.len(),
            source_solutions: self.source.num_solutions(),
            target_instances: self.target.num_instances(),
            target_solutions: self.target.num_solutions(),
            pairs_checked: report.pairs_checked,
            exact_violations: report.exact_violations.len(),
            guarantee_violations: report.guarantee_violations.len(),
            first_exact_violation: report.exact_violations.first().cloned(),
            first_guarantee_violation: report.guarantee_violations.first().cloned(),
            matrix_identity,
            constants: self.notes.constants.clone(),
            passed,
        })
    }

    /// Fail-fast wrapper used by every builder.
    fn certified(self) -> Result<Self> {
        let report = self.certify()?;
        if !report.passed {
            return Err(Error::InternalConsistency(format!(
                "gadget {} fails certification: {} value, {} guarantee violations, matrix {:?}",
                self.name, report.exact_violations, report.guarantee_violations, report.matrix_identity
            )));
        }
        Ok(self)
    }
}

/// Index maps for typed point maps `β` and `γ`.
pub(crate) fn index_maps<I1, S1, I2, S2>(
    p1: &ProblemSpec<I1, S1>,
    p2: &ProblemSpec<I2, S2>,
    beta: impl Fn(&I1) -> I2,
    gamma: impl Fn(&S1) -> S2,
) -> Result<(Vec<usize>, Vec<usize>)>
where
    I1: Ord + Clone + fmt::Debug + Send + Sync + 'static,
    S1: Ord + Clone + fmt::Debug + Send + Sync + 'static,
    I2: Ord + Clone + fmt::Debug + Send + Sync + 'static,
    S2: Ord + Clone + fmt::Debug + Send + Sync + 'static,
{
    let bi = p1
        .instances()
        .iter()
        .map(|f| {
            let img = beta(f);
            p2.instance_index(&img)
                .ok_or_else(|| Error::Shape(format!("image {img:?} of {f:?} is not a target instance")))
        })
        .collect::<Result<Vec<_>>>()?;
    let gi = p1
        .solutions()
        .iter()
        .map(|s| {
            let img = gamma(s);
            p2.solution_index(&img)
                .ok_or_else(|| Error::Shape(format!("image {img:?} of {s:?} is not a target solution")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((bi, gi))
}

/// Builds, wraps and certifies a point-to-point gadget.
pub(crate) fn simple_gadget<I1, S1, I2, S2>(
    name: &str,
    provenance: &str,
    p1: ProblemSpec<I1, S1>,
    p2: ProblemSpec<I2, S2>,
    beta: impl Fn(&I1) -> I2,
    gamma: impl Fn(&S1) -> S2,
    params: SimpleParams,
) -> Result<GadgetResult>
where
    I1: Ord + Clone + fmt::Debug + Send + Sync + 'static,
    S1: Ord + Clone + fmt::Debug + Send + Sync + 'static,
    I2: Ord + Clone + fmt::Debug + Send + Sync + 'static,
    S2: Ord + Clone + fmt::Debug + Send + Sync + 'static,
{
    let (bi, gi) = index_maps(&p1, &p2, beta, gamma)?;
    let sr = crate::reduce::simple_reduction(&p1, &p2, |f: InstanceId| InstanceId(bi[f.0]), |s| gi[s], &params)?;
    let notes = GadgetNotes::simple(provenance, &params, &sr);
    GadgetResult {
        name: name.to_string(),
        source: Arc::new(p1),
        source_guarantees: sr.source_guarantees,
        target: Arc::new(p2),
        target_guarantees: sr.target_guarantees,
        reduction: sr.reduction,
        notes,
    }
    .certified()
}

/// Names accepted by [`by_name`].
pub const GADGET_NAMES: &[&str] = &[
    "maxcut-to-vertexcover",
    "maxcut-to-maxindep",
    "maxcut-to-multicut",
    "maxcut-to-max2sat",
    "maxcut-to-dicut",
    "xor2-to-conjsat",
    "maxcsp2-embed-xor2",
    "maxcut-to-min2cnf",
    "maxcut-to-minuncut",
    "matching-to-hamiltonian",
];

/// Size parameters for [`by_name`]; unused fields are ignored.
#[derive(Debug, Clone)]
pub struct GadgetArgs {
    pub n: usize,
    pub n2: usize,
    pub k: usize,
    pub delta: Option<usize>,
    pub eps: Rational,
    pub palette: Vec<Rational>,
}

impl Default for GadgetArgs {
    fn default() -> Self {
        GadgetArgs {
            n: 3,
            n2: 4,
            k: 3,
            delta: None,
            eps: rational::rat(1, 5),
            palette: vec![rational::int(1), rational::int(2)],
        }
    }
}

/// Dispatch by kebab-case name.
pub fn by_name(name: &str, args: &GadgetArgs) -> Result<GadgetResult> {
    let delta = args.delta.unwrap_or(args.n.saturating_sub(1).max(1));
    match name {
        "maxcut-to-vertexcover" => maxcut_to_vertexcover(args.n, delta, &args.eps),
        "maxcut-to-maxindep" => maxcut_to_maxindep(args.n, delta, &args.eps),
        "maxcut-to-multicut" => maxcut_to_multicut(args.n, args.k),
        "maxcut-to-max2sat" => maxcut_to_max2sat(args.n),
        "maxcut-to-dicut" => maxcut_to_dicut(args.n),
        "xor2-to-conjsat" => xor2_to_conjsat(args.n),
        "maxcsp2-embed-xor2" => maxcsp2_embed_xor2(args.n),
        "maxcut-to-min2cnf" => maxcut_to_min2cnf(args.n, &args.palette),
        "maxcut-to-minuncut" => maxcut_to_minuncut(args.n, &args.palette),
        "matching-to-hamiltonian" => matching_to_hamiltonian(args.n2),
        other => Err(Error::InvalidProblem(format!(
            "unknown gadget {other:?}; expected one of {}",
            GADGET_NAMES.join(", ")
        ))),
    }
}
