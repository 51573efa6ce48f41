//! JSON documents for graphs and clause sets.
//!
//! ```json
//! { "n": 3, "edges": [[0, 1], [1, 2]], "weights": ["1", "1/2"] }
//! { "n": 2, "clauses": [{ "type": "xor", "vars": [0, 1], "parity": true }] }
//! ```

use super::csp::{Clause, ClauseSet};
use super::graph::{Graph, WeightedGraph};
use crate::error::Result;
use crate::rational::{self, Rational};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
}

impl GraphDoc {
    pub fn graph(&self) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().copied())
    }

    /// Weighted graph; missing weights default to one.
    pub fn weighted(&self) -> Result<WeightedGraph> {
        let g = self.graph()?;
        let Some(ws) = &self.weights else {
            return Ok(WeightedGraph::uniform(g));
        };
        let mut pairs: Vec<((usize, usize), Rational)> = self
            .edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .zip(ws.iter().map(|w| rational::parse(w)).collect::<Result<Vec<_>>>()?)
            .collect();
        pairs.sort();
        WeightedGraph::new(g, pairs.into_iter().map(|(_, w)| w).collect())
    }
}

impl From<&Graph> for GraphDoc {
    fn from(g: &Graph) -> Self {
        GraphDoc {
            n: g.n,
            edges: g.edges.clone(),
            weights: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClauseSetDoc {
    pub n: usize,
    pub clauses: Vec<Clause>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
}

impl ClauseSetDoc {
    pub fn clause_set(&self) -> Result<ClauseSet> {
        let weights = match &self.weights {
            Some(ws) => ws.iter().map(|w| rational::parse(w)).collect::<Result<Vec<_>>>()?,
            None => vec![rational::one(); self.clauses.len()],
        };
        ClauseSet::new(self.n, self.clauses.clone(), weights)
    }
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<GraphDoc> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn load_clause_set(path: impl AsRef<Path>) -> Result<ClauseSet> {
    let doc: ClauseSetDoc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    doc.clause_set()
}
