use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use formcx::factor::{
    check_lp_factorization, factorization_from_formulation, formulation_from_factorization, lp_rank_bounds,
    nonneg_rank_bounds, verify_formulation, Budget, LPFactorization, LPFactorizationDoc, LowerWitness, RankInterval,
};
use formcx::gadgets::{self, GadgetArgs, GadgetResult};
use formcx::reduce::Reduction;
use formcx::rounding::round_to_problem;
use formcx::slack::{build_slack, count_disjoint_ones, SlackMatrix};
use formcx::{Matrix, Rational};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod problems;

use problems::{parse_rational, ProblemArgs};

/// Exact slack matrices, factorizations and reduction certificates.
#[derive(Debug, Parser)]
#[command(name = "formcx", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a problem's slack matrix and write it as JSON or CSV.
    Slack(SlackArgs),
    /// Re-verify a named gadget, or a reduction file over its problems.
    Certify(CertifyArgs),
    /// Certified bounds on the LP rank and the nonnegative rank of a matrix.
    Rank(RankArgs),
    /// Factorization -> formulation -> factorization on a named problem.
    Roundtrip(RoundtripArgs),
    /// Round an approximate slack matrix to a formulation of the exact problem.
    Round(RoundArgs),
    /// Write reductions, slack matrices, formulations or factorizations.
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Debug, Args)]
struct SlackArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// `.csv` writes bare entries, anything else JSON with labels.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct GadgetOpts {
    /// One of the names listed by `formcx certify --help`.
    #[arg(long)]
    gadget: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Vertices of the matching instance (matching-to-hamiltonian).
    #[arg(long, default_value_t = 4)]
    n2: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Degree bound of the source graphs; defaults to `n - 1`.
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long, value_parser = parse_rational, default_value = "1/5")]
    eps: Rational,
    #[arg(long, value_parser = parse_rational, value_delimiter = ',', default_value = "1,2")]
    palette: Vec<Rational>,
}

impl GadgetOpts {
    fn build(&self) -> Result<GadgetResult> {
        let args = GadgetArgs {
            n: self.n,
            n2: self.n2,
            k: self.k,
            delta: self.delta,
            eps: self.eps.clone(),
            palette: self.palette.clone(),
        };
        gadgets::by_name(&self.gadget, &args).with_context(|| format!("building gadget {}", self.gadget))
    }
}

#[derive(Debug, Args)]
#[command(after_help = gadget_help())]
struct CertifyArgs {
    #[command(flatten)]
    gadget: GadgetOpts,
    /// Check this reduction (JSON) over the gadget's problems instead of the built one.
    #[arg(long)]
    reduction: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn gadget_help() -> String {
    format!("Gadgets: {}", gadgets::GADGET_NAMES.join(", "))
}

#[derive(Debug, Args)]
struct RankArgs {
    /// Matrix file: JSON {rows, cols, entries} or CSV of "p/q" cells.
    #[arg(long)]
    matrix: PathBuf,
    /// Total LP solves for the upper-bound search.
    #[arg(long, env = formcx::factor::rank::BUDGET_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    max_lps: Option<u64>,
    /// Largest candidate size tried by the search.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_rank: Option<u64>,
    /// Largest matrix (in entries) the search runs on.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_entries: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RoundtripArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Start from this LP factorization (JSON) instead of the trivial one.
    #[arg(long)]
    factorization: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RoundArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// The approximate slack matrix.
    #[arg(long)]
    mtilde: PathBuf,
    /// An LP factorization of `mtilde` (JSON); enables the certificate.
    #[arg(long)]
    ftilde: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ExportCommand {
    /// The reduction of a gadget, as accepted by `certify --reduction`.
    Reduction {
        #[command(flatten)]
        gadget: GadgetOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Same file as `slack --out`.
    Slack {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// The formulation `x >= 0` built from the trivial factorization.
    Formulation {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// The trivial LP factorization of the slack matrix.
    Factorization {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Serializes `report`, writes it to `out` if given and prints it.
fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    println!("{text}");
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn write_slack(slack: &SlackMatrix, path: &Path) -> Result<()> {
    if is_csv(path) {
        let mut buf = Vec::new();
        slack.write_csv(&mut buf)?;
        write_file(path, std::str::from_utf8(&buf)?)
    } else {
        write_file(path, &slack.to_json())
    }
}

#[derive(Serialize)]
struct SlackSummary {
    problem: String,
    sense: formcx::Sense,
    rows: usize,
    cols: usize,
    /// Rows containing at least one zero entry.
    rows_with_zero: usize,
    rows_without_zero: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disjoint_ones: Option<u64>,
}

fn cmd_slack(a: &SlackArgs) -> Result<bool> {
    let built = problems::build(&a.problem)?;
    let slack = build_slack(built.problem.as_ref(), &built.guarantees)?;
    let without = slack.rows_without_zero();
    let disjoint_ones = match a.problem.problem.as_str() {
        "junta" => Some(count_disjoint_ones(a.problem.n, a.problem.k)?),
        _ => None,
    };
    if let Some(path) = &a.out {
        write_slack(&slack, path)?;
    }
    emit(
        &SlackSummary {
            problem: built.problem.name().to_string(),
            sense: slack.sense,
            rows: slack.entries.rows(),
            cols: slack.entries.cols(),
            rows_with_zero: slack.entries.rows() - without.len(),
            rows_without_zero: without,
            disjoint_ones,
        },
        None,
    )?;
    Ok(true)
}

fn cmd_certify(a: &CertifyArgs) -> Result<bool> {
    let mut g = a.gadget.build()?;
    if let Some(path) = &a.reduction {
        g.reduction = Reduction::from_json(&read_file(path)?).with_context(|| format!("parsing {}", path.display()))?;
    }
    let report = g.certify()?;
    emit(&report, a.out.as_deref())?;
    if !report.passed {
        if let Some(v) = &report.first_exact_violation {
            eprintln!(
                "value identity fails at (f1, s1) = ({}, {}): residual {}",
                v.instance,
                v.solution,
                formcx::rational::format(&v.residual)
            );
        }
        if let Some(v) = &report.first_guarantee_violation {
            eprintln!(
                "completeness guarantee fails at f1 = {}: short by {}",
                v.instance,
                formcx::rational::format(&v.residual)
            );
        }
    }
    Ok(report.passed)
}

#[derive(Serialize)]
struct IntervalReport {
    interval: String,
    lower: usize,
    upper: usize,
    exact: bool,
    budget_exhausted: bool,
    certificate_verified: bool,
    lower_witness: LowerWitness,
    upper_certificate: LPFactorizationDoc,
}

impl IntervalReport {
    fn new(m: &Matrix, r: &RankInterval) -> Self {
        IntervalReport {
            interval: format!("[{}, {}]", r.lower, r.upper),
            lower: r.lower,
            upper: r.upper,
            exact: r.is_exact(),
            budget_exhausted: r.budget_exhausted,
            certificate_verified: check_lp_factorization(m, &r.certificate_upper).is_ok(),
            lower_witness: r.certificate_lower.clone(),
            upper_certificate: LPFactorizationDoc::from(&r.certificate_upper),
        }
    }
}

#[derive(Serialize)]
struct RankReport {
    rows: usize,
    cols: usize,
    lp_rank: IntervalReport,
    nonnegative_rank: IntervalReport,
}

fn cmd_rank(a: &RankArgs) -> Result<bool> {
    let m = Matrix::load(&a.matrix).with_context(|| format!("loading {}", a.matrix.display()))?;
    let mut budget = Budget::default();
    if let Some(v) = a.max_lps {
        budget.max_lps = v as usize;
    }
    if let Some(v) = a.max_rank {
        budget.max_rank = v as usize;
    }
    if let Some(v) = a.max_entries {
        budget.max_entries = v as usize;
    }
    let lp = lp_rank_bounds(&m, &budget)?;
    let nn = nonneg_rank_bounds(&m, &budget)?;
    let report = RankReport {
        rows: m.rows(),
        cols: m.cols(),
        lp_rank: IntervalReport::new(&m, &lp),
        nonnegative_rank: IntervalReport::new(&m, &nn),
    };
    emit(&report, a.out.as_deref())?;
    Ok(report.lp_rank.certificate_verified && report.nonnegative_rank.certificate_verified)
}

#[derive(Serialize)]
struct RoundtripReport {
    problem: String,
    rows: usize,
    cols: usize,
    factorization_size: usize,
    inequalities: usize,
    dimension: usize,
    extracted_size: usize,
    reproduces_slack: bool,
    passed: bool,
}

fn cmd_roundtrip(a: &RoundtripArgs) -> Result<bool> {
    let built = problems::build(&a.problem)?;
    let (p, g) = (built.problem.as_ref(), &built.guarantees);
    let slack = build_slack(p, g)?;
    let start = match &a.factorization {
        Some(path) => LPFactorization::from_json(&read_file(path)?)?,
        None => LPFactorization::trivial(&slack.entries)?,
    };
    let formulation = formulation_from_factorization(p, g, &start)?;
    verify_formulation(p, g, &formulation)?;
    let back = factorization_from_formulation(p, g, &formulation)?;
    let reproduces_slack = check_lp_factorization(&slack.entries, &back).is_ok();
    let report = RoundtripReport {
        problem: p.name().to_string(),
        rows: slack.entries.rows(),
        cols: slack.entries.cols(),
        factorization_size: start.size(),
        inequalities: formulation.size(),
        dimension: formulation.dim(),
        extracted_size: back.size(),
        reproduces_slack,
        passed: reproduces_slack && back.size() <= formulation.size(),
    };
    emit(&report, a.out.as_deref())?;
    Ok(report.passed)
}

fn cmd_round(a: &RoundArgs) -> Result<bool> {
    let built = problems::build(&a.problem)?;
    let mtilde = Matrix::load(&a.mtilde).with_context(|| format!("loading {}", a.mtilde.display()))?;
    let ftilde = match &a.ftilde {
        Some(path) => Some(LPFactorization::from_json(&read_file(path)?)?),
        None => None,
    };
    let result = round_to_problem(built.problem.as_ref(), &built.guarantees, &mtilde, ftilde.as_ref())?;
    emit(&result.report(), a.out.as_deref())?;
    Ok(true)
}

fn cmd_export(c: &ExportCommand) -> Result<bool> {
    match c {
        ExportCommand::Reduction { gadget, out } => write_file(out, &gadget.build()?.reduction.to_json())?,
        ExportCommand::Slack { problem, out } => {
            let built = problems::build(problem)?;
            write_slack(&build_slack(built.problem.as_ref(), &built.guarantees)?, out)?;
        }
        ExportCommand::Formulation { problem, out } | ExportCommand::Factorization { problem, out } => {
            let built = problems::build(problem)?;
            let (p, g) = (built.problem.as_ref(), &built.guarantees);
            let f = LPFactorization::trivial(&build_slack(p, g)?.entries)?;
            let text = match c {
                ExportCommand::Formulation { .. } => formulation_from_factorization(p, g, &f)?.to_json(),
                _ => f.to_json(),
            };
            write_file(out, &text)?;
        }
    }
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Slack(a) => cmd_slack(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Roundtrip(a) => cmd_roundtrip(a),
        Command::Round(a) => cmd_round(a),
        Command::Export(c) => cmd_export(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn rationals_parse_exactly() {
        assert!(Cli::try_parse_from(["formcx", "slack", "--problem", "maxcut", "--tau", "1/0"]).is_err());
        assert!(Cli::try_parse_from(["formcx", "slack", "--problem", "maxcut", "--tau", "0.5"]).is_err());
        let cli = Cli::try_parse_from(["formcx", "slack", "--problem", "maxcut", "--tau", "3/4"]).unwrap();
        let Command::Slack(a) = cli.command else { panic!() };
        assert_eq!(a.problem.tau, Some(formcx::rational::rat(3, 4)));
    }

    #[test]
    fn budgets_must_be_positive() {
        assert!(Cli::try_parse_from(["formcx", "rank", "--matrix", "m.json", "--max-lps", "0"]).is_err());
    }

    #[test]
    fn unknown_names_are_errors() {
        let cli = Cli::try_parse_from(["formcx", "slack", "--problem", "nope"]).unwrap();
        assert!(run(&cli).is_err());
        let cli = Cli::try_parse_from(["formcx", "certify", "--gadget", "nope"]).unwrap();
        assert!(run(&cli).is_err());
    }
}
