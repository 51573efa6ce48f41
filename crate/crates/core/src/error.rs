use crate::rational::Rational;
use thiserror::Error;

/// Which condition of an LP formulation failed verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FormulationCondition {
    /// `A x^s <= b` for every solution point.
    Containment,
    /// `w^f(x^s) = val_f(s)` for every instance and solution.
    Linearization,
    /// The optimum of `w^f` over the polyhedron respects the completeness guarantee.
    Guarantee,
}

impl std::fmt::Display for FormulationCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FormulationCondition::Containment => "containment (A x^s <= b)",
            FormulationCondition::Linearization => "linearization (w^f(x^s) = val_f(s))",
            FormulationCondition::Guarantee => "guarantee (optimum of w^f bounded by C(f))",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} id {id} (have {len})")]
    Identifier {
        kind: &'static str,
        id: usize,
        len: usize,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("guarantee order violated at instance {instance}: C = {complete}, S = {sound}")]
    GuaranteeOrder {
        instance: usize,
        complete: Rational,
        sound: Rational,
    },

    #[error("guarantee infeasible: slack entry ({instance}, {solution}) is negative ({value})")]
    GuaranteeInfeasible {
        instance: usize,
        solution: usize,
        value: Rational,
    },

    #[error("enumeration limit exceeded: {what} needs {needed} items, limit is {limit}")]
    Scale {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{which} factor {index} is not positive semidefinite")]
    NotPsd { which: &'static str, index: usize },

    #[error("polyhedron is empty")]
    EmptyPolyhedron,

    #[error("function is negative on the polyhedron: value {value} at {witness:?}")]
    NotNonnegative {
        witness: Vec<Rational>,
        value: Rational,
    },

    #[error("formulation violates {condition}: {detail}")]
    FormulationInvalid {
        condition: FormulationCondition,
        detail: String,
    },

    #[error("invalid factorization: {0}")]
    FactorizationInvalid(String),

    #[error("invalid reduction: {0}")]
    ReductionInvalid(String),

    #[error("simple reduction identity fails at instance {instance}, solution {solution:?}: {detail}")]
    SimpleReductionInvalid {
        instance: usize,
        solution: Option<usize>,
        detail: String,
    },

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
