//! Named problems for `--problem`.

use anyhow::{bail, Result};
use clap::Args;
use formcx::catalog::{
    self, build_csp, build_min_csp, ClauseKind, CspOptions, Graph, MinCspKind,
};
use formcx::problem::{exact_guarantees, proportional_guarantees};
use formcx::{Guarantees, Problem, Rational};
use std::sync::Arc;

pub const PROBLEM_NAMES: &[&str] = &[
    "maxcut",
    "maxcut-weighted",
    "multicut",
    "vertex-cover",
    "max-indep",
    "indep-uniform",
    "matching",
    "hamiltonian",
    "junta",
    "max-xor",
    "max-sat",
    "max-2cnf",
    "dicut",
    "conj2",
    "csp2",
    "min-uncut",
    "min-2cnf",
];

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    formcx::rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// One of: maxcut, maxcut-weighted, multicut, vertex-cover, max-indep,
    /// indep-uniform, matching, hamiltonian, junta, max-xor, max-sat,
    /// max-2cnf, dicut, conj2, csp2, min-uncut, min-2cnf.
    #[arg(long)]
    pub problem: String,
    /// Vertices or variables.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Cells (multicut), junta size, or clause arity (max-xor, max-sat).
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// `C(f) = tau |f|`; exact guarantees when omitted.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub tau: Option<Rational>,
    /// `S(f) = sigma |f|`; defaults to `tau`.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, requires = "tau")]
    pub sigma: Option<Rational>,
    #[arg(long)]
    pub degree_bound: Option<usize>,
    /// Largest clause subset enumerated by the CSP problems.
    #[arg(long)]
    pub max_clauses: Option<usize>,
    /// Comma-separated positive weights (weighted problems).
    #[arg(long, value_parser = parse_rational, value_delimiter = ',', default_value = "1")]
    pub palette: Vec<Rational>,
}

pub struct Built {
    pub problem: Arc<dyn Problem>,
    pub guarantees: Guarantees,
}

fn csp_opts(a: &ProblemArgs) -> CspOptions {
    CspOptions {
        degree_bound: a.degree_bound,
        max_clauses: a.max_clauses,
        limits: None,
    }
}

pub fn build(a: &ProblemArgs) -> Result<Built> {
    let n = a.n;
    let p: Arc<dyn Problem> = match a.problem.as_str() {
        "maxcut" => Arc::new(catalog::build_maxcut(n, a.degree_bound)?),
        "maxcut-weighted" => Arc::new(catalog::build_weighted_maxcut(n, &a.palette)?),
        "multicut" => Arc::new(catalog::build_multicut(n, a.k)?),
        "vertex-cover" => Arc::new(catalog::build_vertex_cover(&Graph::complete(n), a.degree_bound)?),
        "max-indep" => Arc::new(catalog::build_max_indep(&Graph::complete(n), a.degree_bound)?),
        "indep-uniform" => Arc::new(catalog::build_indep_uniform(n)?),
        "matching" => Arc::new(catalog::build_matching(n)?),
        "hamiltonian" => Arc::new(catalog::build_hamiltonian(n, false)?),
        "junta" => {
            let p = catalog::build_junta_family(n, a.k)?;
            if a.tau.is_some() {
                bail!("junta guarantees are fixed at C = S = 1");
            }
            let guarantees = catalog::junta_guarantees(&p)?;
            return Ok(Built {
                problem: Arc::new(p),
                guarantees,
            });
        }
        "max-xor" => Arc::new(build_csp(ClauseKind::Xor(a.k), n, &csp_opts(a))?),
        "max-sat" => Arc::new(build_csp(ClauseKind::Sat(a.k), n, &csp_opts(a))?),
        "max-2cnf" => Arc::new(build_csp(ClauseKind::TwoCnf, n, &csp_opts(a))?),
        "dicut" => Arc::new(build_csp(ClauseKind::Dicut, n, &csp_opts(a))?),
        "conj2" => Arc::new(build_csp(ClauseKind::Conj2, n, &csp_opts(a))?),
        "csp2" => Arc::new(build_csp(ClauseKind::Csp2, n, &csp_opts(a))?),
        "min-uncut" => Arc::new(build_min_csp(MinCspKind::MinUnCut, n, &a.palette, &csp_opts(a))?),
        "min-2cnf" => Arc::new(build_min_csp(MinCspKind::Min2Cnf, n, &a.palette, &csp_opts(a))?),
        other => bail!("unknown problem {other:?}; expected one of {}", PROBLEM_NAMES.join(", ")),
    };
    let guarantees = match (&a.tau, &a.sigma) {
        (Some(t), s) => proportional_guarantees(p.as_ref(), t, s.as_ref().unwrap_or(t))?,
        (None, _) => exact_guarantees(p.as_ref())?,
    };
    Ok(Built { problem: p, guarantees })
}
