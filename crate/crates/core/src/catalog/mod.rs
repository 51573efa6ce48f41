//! Constructors for the concrete problems: cuts, covers, matchings, tours, CSPs.

pub mod conflict;
pub mod csp;
pub mod graph;
pub mod json;

pub use conflict::{conflict_graph, conflict_vertices, PartialAssignment};
pub use csp::{
    build_csp, build_min_csp, csp_problem, min_csp_problem, Clause, ClauseKind, ClauseSet, CspOptions, Literal,
    MinCspKind,
};
pub use graph::{
    all_assignments, all_graphs, all_hamiltonian_cycles, all_pairs, all_perfect_matchings, all_weighted_graphs,
    subsets_of, Assignment, Cycle, Graph, Partition, PerfectMatching, VertexSet, WeightedGraph,
};

use crate::error::{Error, Result};
use crate::problem::{Guarantees, Problem, ProblemSpec, Sense};
use crate::rational::{self, int, Rational};

/// Enumeration caps. Builders refuse to materialize more than this many
/// instances or solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    pub max_instances: u128,
    pub max_solutions: u128,
}

/// Environment variable overriding both default enumeration caps.
pub const LIMIT_ENV: &str = "FORMCX_ENUM_LIMIT";

impl Default for Limits {
    fn default() -> Self {
        let cap = std::env::var(LIMIT_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(1u128 << 22);
        Limits {
            max_instances: cap,
            max_solutions: cap,
        }
    }
}

impl Limits {
    pub fn check_instances(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.max_instances {
            return Err(Error::Scale {
                what: format!("{what} instances"),
                needed,
                limit: self.max_instances,
            });
        }
        Ok(())
    }

    pub fn check_solutions(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.max_solutions {
            return Err(Error::Scale {
                what: format!("{what} solutions"),
                needed,
                limit: self.max_solutions,
            });
        }
        Ok(())
    }
}

fn pairs_count(n: usize) -> u32 {
    (n * n.saturating_sub(1) / 2) as u32
}

fn pow_u128(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).unwrap_or(u128::MAX)
}

fn graphs_bounded(n: usize, degree_bound: Option<usize>, what: &str) -> Result<Vec<Graph>> {
    Limits::default().check_instances(what, pow_u128(2, pairs_count(n)))?;
    Ok(all_graphs(n)
        .filter(|g| degree_bound.is_none_or(|d| g.max_degree() <= d))
        .collect())
}

/// MaxCUT on `n` vertices: all graphs (max degree at most `degree_bound`), all cuts.
pub fn build_maxcut(n: usize, degree_bound: Option<usize>) -> Result<ProblemSpec<Graph, Assignment>> {
    if n < 2 {
        return Err(Error::InvalidProblem("MaxCUT needs n >= 2".into()));
    }
    Limits::default().check_solutions("MaxCUT", pow_u128(2, n as u32))?;
    let instances = graphs_bounded(n, degree_bound, "MaxCUT")?;
    maxcut_problem(n, instances)
}

/// MaxCUT over an explicit list of graphs on `n` vertices.
pub fn maxcut_problem(n: usize, instances: Vec<Graph>) -> Result<ProblemSpec<Graph, Assignment>> {
    ProblemSpec::new(
        "MaxCUT",
        Sense::Maximize,
        instances,
        all_assignments(n).collect(),
        |g: &Graph, s: &Assignment| int(g.cut_value(s) as i64),
        |g: &Graph| int(g.num_edges() as i64),
    )
}

/// Weighted MaxCUT: every subgraph of `K_n` with edge weights from `palette`;
/// size is the total weight.
pub fn build_weighted_maxcut(n: usize, palette: &[Rational]) -> Result<ProblemSpec<WeightedGraph, Assignment>> {
    if n < 2 || palette.is_empty() || palette.iter().any(|w| w <= &rational::zero()) {
        return Err(Error::InvalidProblem("weighted MaxCUT needs n >= 2 and a positive palette".into()));
    }
    let needed = pow_u128(palette.len() as u128 + 1, pairs_count(n));
    Limits::default().check_instances("weighted MaxCUT", needed)?;
    ProblemSpec::new(
        "MaxCUT-w",
        Sense::Maximize,
        all_weighted_graphs(n, palette),
        all_assignments(n).collect(),
        |g: &WeightedGraph, s: &Assignment| g.cut_weight(s),
        WeightedGraph::total_weight,
    )
}

/// All `k^n` partitions of `0..n` into labelled cells.
pub fn all_partitions(n: usize, k: usize) -> Vec<Partition> {
    let total = k.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut cells = vec![0u8; n];
            for c in cells.iter_mut().rev() {
                *c = (code % k) as u8;
                code /= k;
            }
            Partition(cells)
        })
        .collect()
}

/// Number of edges whose endpoints lie in different cells.
pub fn multicut_value(g: &Graph, p: &Partition) -> usize {
    g.edges.iter().filter(|&&(a, b)| p.0[a] != p.0[b]).count()
}

/// MaxMULTICUT-k on `n` vertices.
pub fn build_multicut(n: usize, k: usize) -> Result<ProblemSpec<Graph, Partition>> {
    if k < 3 || n < k {
        return Err(Error::InvalidProblem("MaxMULTICUT needs k >= 3 and n >= k".into()));
    }
    Limits::default().check_solutions("MaxMULTICUT", pow_u128(k as u128, n as u32))?;
    let instances = graphs_bounded(n, None, "MaxMULTICUT")?;
    multicut_problem(n, k, instances)
}

pub fn multicut_problem(n: usize, k: usize, instances: Vec<Graph>) -> Result<ProblemSpec<Graph, Partition>> {
    Limits::default().check_solutions("MaxMULTICUT", pow_u128(k as u128, n as u32))?;
    ProblemSpec::new(
        format!("MaxMULTICUT-{k}"),
        Sense::Maximize,
        instances,
        all_partitions(n, k),
        |g: &Graph, p: &Partition| int(multicut_value(g, p) as i64),
        |g: &Graph| int(g.num_edges() as i64),
    )
}

fn induced_instances(g: &Graph, degree_bound: Option<usize>) -> Result<Vec<VertexSet>> {
    Limits::default().check_instances("induced subgraphs", pow_u128(2, g.n as u32))?;
    Ok(subsets_of(VertexSet::full(g.n))
        .filter(|&h| degree_bound.is_none_or(|d| g.induced(h).max_degree() <= d))
        .collect())
}

/// VertexCover of the fixed graph `g`: instances are induced subgraphs
/// (given by their vertex sets), solutions are the vertex covers of `g`.
pub fn build_vertex_cover(g: &Graph, degree_bound: Option<usize>) -> Result<ProblemSpec<VertexSet, VertexSet>> {
    let instances = induced_instances(g, degree_bound)?;
    vertex_cover_problem(g, instances)
}

pub fn vertex_cover_problem(g: &Graph, instances: Vec<VertexSet>) -> Result<ProblemSpec<VertexSet, VertexSet>> {
    Limits::default().check_solutions("VertexCover", pow_u128(2, g.n as u32))?;
    let covers = subsets_of(VertexSet::full(g.n)).filter(|&s| g.is_vertex_cover(s)).collect();
    ProblemSpec::new(
        "VertexCover",
        Sense::Minimize,
        instances,
        covers,
        |h: &VertexSet, s: &VertexSet| int(h.intersect(*s).len() as i64),
        |h: &VertexSet| int(h.len() as i64),
    )
}

/// MaxIndep of the fixed graph `g`: instances are induced subgraphs,
/// solutions are the independent sets of `g`.
pub fn build_max_indep(g: &Graph, degree_bound: Option<usize>) -> Result<ProblemSpec<VertexSet, VertexSet>> {
    let instances = induced_instances(g, degree_bound)?;
    max_indep_problem(g, instances)
}

pub fn max_indep_problem(g: &Graph, instances: Vec<VertexSet>) -> Result<ProblemSpec<VertexSet, VertexSet>> {
    Limits::default().check_solutions("MaxIndep", pow_u128(2, g.n as u32))?;
    let sets = subsets_of(VertexSet::full(g.n)).filter(|&s| g.is_independent(s)).collect();
    ProblemSpec::new(
        "MaxIndep",
        Sense::Maximize,
        instances,
        sets,
        |h: &VertexSet, s: &VertexSet| int(h.intersect(*s).len() as i64),
        |h: &VertexSet| int(h.len() as i64),
    )
}

/// A graph with an explicit vertex set `U` and edges inside `U`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubGraph {
    pub vertices: VertexSet,
    pub edges: Vec<(usize, usize)>,
}

impl SubGraph {
    pub fn clique(vertices: VertexSet) -> SubGraph {
        let vs: Vec<usize> = vertices.iter().collect();
        let edges = vs
            .iter()
            .enumerate()
            .flat_map(|(t, &a)| vs[t + 1..].iter().map(move |&b| (a, b)))
            .collect();
        SubGraph { vertices, edges }
    }

    /// `|V(G) ∩ S| - |E(G[S])|`.
    pub fn uniform_value(&self, s: VertexSet) -> i64 {
        let inside = self.edges.iter().filter(|&&(a, b)| s.contains(a) && s.contains(b)).count();
        self.vertices.intersect(s).len() as i64 - inside as i64
    }

    pub fn as_graph(&self, n: usize) -> Graph {
        Graph {
            n,
            edges: self.edges.clone(),
        }
    }
}

impl std::fmt::Debug for SubGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let es: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "{:?}[{}]", self.vertices, es.join(" "))
    }
}

/// Independent set in the uniform model: every subset is feasible and
/// `val_G(S) = |V(G) ∩ S| - |E(G[S])|`.
pub fn build_indep_uniform(n: usize) -> Result<ProblemSpec<SubGraph, VertexSet>> {
    if n < 2 {
        return Err(Error::InvalidProblem("uniform independent set needs n >= 2".into()));
    }
    let needed: u128 = (0..=n)
        .map(|u| {
            let binom = (0..u).fold(1u128, |acc, t| acc * (n - t) as u128 / (t + 1) as u128);
            binom.saturating_mul(pow_u128(2, pairs_count(u)))
        })
        .fold(0, u128::saturating_add);
    Limits::default().check_instances("uniform independent set", needed)?;
    let mut instances = Vec::new();
    for u in subsets_of(VertexSet::full(n)) {
        let vs: Vec<usize> = u.iter().collect();
        for g in all_graphs(vs.len()) {
            let edges = g.edges.iter().map(|&(a, b)| (vs[a], vs[b])).collect();
            instances.push(SubGraph { vertices: u, edges });
        }
    }
    indep_uniform_problem(n, instances)
}

pub fn indep_uniform_problem(n: usize, instances: Vec<SubGraph>) -> Result<ProblemSpec<SubGraph, VertexSet>> {
    ProblemSpec::new(
        "MaxIndep-uniform",
        Sense::Maximize,
        instances,
        subsets_of(VertexSet::full(n)).collect(),
        |g: &SubGraph, s: &VertexSet| int(g.uniform_value(*s)),
        |g: &SubGraph| int(g.vertices.len() as i64),
    )
}

/// Perfect matchings of `K_{n2}`; instances are all graphs, value `|M ∩ E(G)|`.
pub fn build_matching(n2: usize) -> Result<ProblemSpec<Graph, PerfectMatching>> {
    if n2 < 2 || n2 % 2 == 1 {
        return Err(Error::InvalidProblem("matching needs an even n2 >= 2".into()));
    }
    let instances = graphs_bounded(n2, None, "matching")?;
    matching_problem(n2, instances)
}

pub fn matching_problem(n2: usize, instances: Vec<Graph>) -> Result<ProblemSpec<Graph, PerfectMatching>> {
    let needed = (1..n2 as u128).step_by(2).product::<u128>();
    Limits::default().check_solutions("perfect matchings", needed)?;
    ProblemSpec::new(
        "Matching",
        Sense::Maximize,
        instances,
        all_perfect_matchings(n2),
        |g: &Graph, m: &PerfectMatching| int(m.shared_edges(g) as i64),
        |g: &Graph| int(g.num_edges() as i64),
    )
}

/// Max-weight Hamiltonian cycle on `K_n`; instances are weighted subgraphs
/// with weights in `{1, 2}` (or `{0, 1, 2}` with `allow_zero`).
pub fn build_hamiltonian(n: usize, allow_zero: bool) -> Result<ProblemSpec<WeightedGraph, Cycle>> {
    if n < 3 {
        return Err(Error::InvalidProblem("Hamiltonian cycles need n >= 3".into()));
    }
    let mut palette = vec![int(1), int(2)];
    if allow_zero {
        palette.insert(0, int(0));
    }
    let needed = pow_u128(palette.len() as u128 + 1, pairs_count(n));
    Limits::default().check_instances("weighted graphs", needed)?;
    hamiltonian_problem(n, all_weighted_graphs(n, &palette))
}

pub fn hamiltonian_problem(n: usize, instances: Vec<WeightedGraph>) -> Result<ProblemSpec<WeightedGraph, Cycle>> {
    let needed = (1..n as u128).product::<u128>() / 2;
    Limits::default().check_solutions("Hamiltonian cycles", needed)?;
    ProblemSpec::new(
        "Hamiltonian",
        Sense::Maximize,
        instances,
        all_hamiltonian_cycles(n),
        |g: &WeightedGraph, c: &Cycle| c.weight_in(g),
        WeightedGraph::total_weight,
    )
}

/// The junta instance `f_a(b) = a·b - 2 binom(a·b, 2)` for a `k`-set `a`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Junta {
    pub a: VertexSet,
}

impl Junta {
    pub fn eval(&self, b: VertexSet) -> Rational {
        let t = self.a.intersect(b).len() as i64;
        int(t - t * (t - 1))
    }
}

impl std::fmt::Debug for Junta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "f{:?}", self.a)
    }
}

/// Nonnegative `k`-juntas `f_a`, `|a| = k`, over `{0,1}^n` (points as vertex sets).
pub fn build_junta_family(n: usize, k: usize) -> Result<ProblemSpec<Junta, VertexSet>> {
    if k == 0 || k > n {
        return Err(Error::InvalidProblem("juntas need 1 <= k <= n".into()));
    }
    Limits::default().check_solutions("hypercube points", pow_u128(2, n as u32))?;
    let instances = csp::combinations(n, k)
        .into_iter()
        .map(|a| Junta {
            a: VertexSet::from_iter(a),
        })
        .collect();
    ProblemSpec::new(
        format!("Junta-{k}"),
        Sense::Maximize,
        instances,
        subsets_of(VertexSet::full(n)).collect(),
        |f: &Junta, b: &VertexSet| f.eval(*b),
        |_: &Junta| rational::one(),
    )
}

/// `C(f_a) = S(f_a) = 1`.
pub fn junta_guarantees(p: &ProblemSpec<Junta, VertexSet>) -> Result<Guarantees> {
    Guarantees::from_fn(p, |_| rational::one(), |_| rational::one())
}

/// Sanity helper used by tests and the CLI: the optimum of every instance.
pub fn optima(p: &dyn Problem) -> Vec<Rational> {
    (0..p.num_instances())
        .map(|f| crate::problem::brute_force_optimum(p, crate::problem::InstanceId(f)).expect("in range").0)
        .collect()
}
