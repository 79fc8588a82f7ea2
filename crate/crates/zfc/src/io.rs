//! File formats: graph and hypergraph JSON, decay-table CSV, report
//! writing.
//!
//! Graph files look like
//! `{"vertex_count": 3, "edges": [[0,1],[1,2]], "beta": 2.0,
//!   "lambda": {"re": 0.5, "im": 0.0}}`
//! where `beta` is a number or per-edge array and `lambda` a number,
//! `{re, im}` object, or per-vertex array. The hypergraph variant allows
//! edges of any arity.

use std::path::Path;

use num::complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ext::Hypergraph;
use crate::graph::Graph;
use crate::ssm::DecayTable;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Uniform(f64),
    PerEdge(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum LambdaEntry {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl LambdaEntry {
    pub fn value(&self) -> Complex64 {
        match *self {
            LambdaEntry::Real(x) => Complex64::new(x, 0.0),
            LambdaEntry::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Single(LambdaEntry),
    PerVertex(Vec<LambdaEntry>),
}

#[derive(Debug, Deserialize)]
pub struct GraphFile {
    pub vertex_count: usize,
    pub edges: Vec<Vec<usize>>,
    #[serde(default)]
    pub beta: Option<BetaSpec>,
    #[serde(default)]
    pub lambda: Option<LambdaSpec>,
}

/// A graph file with its parameters resolved to per-edge and per-vertex
/// vectors (when present).
pub struct LoadedGraph {
    pub graph: Graph,
    pub beta: Option<Vec<f64>>,
    pub lambda: Option<Vec<Complex64>>,
}

pub fn parse_graph_json(text: &str) -> Result<LoadedGraph> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph json: {e}")))?;
    let mut pairs = Vec::with_capacity(file.edges.len());
    for (i, e) in file.edges.iter().enumerate() {
        if e.len() != 2 {
            return Err(Error::Parse(format!(
                "edge {i} has {} endpoints, expected 2 (use the hypergraph loader for larger edges)",
                e.len()
            )));
        }
        pairs.push((e[0], e[1]));
    }
    let graph = Graph::new(file.vertex_count, pairs)?;
    let beta = match file.beta {
        None => None,
        Some(BetaSpec::Uniform(b)) => Some(vec![b; graph.edge_count()]),
        Some(BetaSpec::PerEdge(v)) => {
            if v.len() != graph.edge_count() {
                return Err(Error::Parse(format!(
                    "beta array has {} entries for {} edges",
                    v.len(),
                    graph.edge_count()
                )));
            }
            Some(v)
        }
    };
    let lambda = match file.lambda {
        None => None,
        Some(LambdaSpec::Single(l)) => Some(vec![l.value(); graph.vertex_count()]),
        Some(LambdaSpec::PerVertex(v)) => {
            if v.len() != graph.vertex_count() {
                return Err(Error::Parse(format!(
                    "lambda array has {} entries for {} vertices",
                    v.len(),
                    graph.vertex_count()
                )));
            }
            Some(v.iter().map(LambdaEntry::value).collect())
        }
    };
    Ok(LoadedGraph { graph, beta, lambda })
}

pub fn load_graph(path: &Path) -> Result<LoadedGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph_json(&text)
}

#[derive(Debug, Deserialize)]
struct HypergraphFile {
    vertex_count: usize,
    edges: Vec<Vec<usize>>,
}

pub fn parse_hypergraph_json(text: &str) -> Result<Hypergraph> {
    let file: HypergraphFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("hypergraph json: {e}")))?;
    Hypergraph::new(file.vertex_count, file.edges)
}

pub fn load_hypergraph(path: &Path) -> Result<Hypergraph> {
    let text = std::fs::read_to_string(path)?;
    parse_hypergraph_json(&text)
}

/// Renders a decay table as `distance,max_abs_diff,instance_count` rows.
pub fn decay_table_csv(table: &DecayTable) -> String {
    let mut out = String::from("distance,max_abs_diff,instance_count\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{:e},{}\n",
            row.distance, row.max_abs_diff, row.instance_count
        ));
    }
    out
}

/// Writes to the path, or to stdout when no path is given.
pub fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
