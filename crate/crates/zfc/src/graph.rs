//! Graph representation, Ising parameter bundles, partial evaluations and
//! metric utilities shared by every other module.
//!
//! A [`Graph`] is a finite simple graph with stable vertex ids `0..n` and
//! stable edge ids `0..m` given by the position in the edge list. The edge
//! list order doubles as the canonical telescoping order, so it is part of
//! the value, not an implementation detail.

use std::collections::BTreeMap;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spin of a pinned vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    Plus,
    Minus,
}

/// A pinning of selected vertices to fixed spins.
pub type Pinning = BTreeMap<usize, Spin>;

/// An edge activity used in overrides. `Contract` is the explicit sentinel
/// for the limit beta -> infinity; consumers interpret it as contracting the
/// edge (endpoints forced equal, weight factor 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeActivity {
    Finite(f64),
    Contract,
}

impl EdgeActivity {
    pub fn is_contract(&self) -> bool {
        matches!(self, EdgeActivity::Contract)
    }
}

/// A finite simple graph. Immutable after construction; cheap to share
/// read-only across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    /// Adjacency lists sorted by neighbour id: `(neighbour, edge id)`.
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Builds a graph, validating simplicity and endpoint ranges.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::Argument(format!(
                    "edge ({u},{v}) has endpoint outside 0..{vertex_count}"
                )));
            }
            if u == v {
                return Err(Error::Argument(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::Argument(format!("duplicate edge ({u},{v})")));
            }
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges,
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<(usize, usize)> {
        self.edges
            .get(e)
            .copied()
            .ok_or_else(|| Error::Argument(format!("edge id {e} out of range")))
    }

    /// Neighbours of `v` with the connecting edge id, sorted by neighbour id.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Single-source shortest-path vertex distances (unweighted BFS).
    /// `None` marks unreachable vertices.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &(w, _) in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn vertex_distance(&self, a: usize, b: usize) -> Option<usize> {
        self.distances_from(&[a])[b]
    }

    /// Distance from a vertex to the nearest vertex of a set.
    pub fn vertex_set_distance(&self, v: usize, targets: &[usize]) -> Result<Option<usize>> {
        if targets.is_empty() {
            return Err(Error::Argument("empty target set".into()));
        }
        for &t in targets {
            if t >= self.vertex_count {
                return Err(Error::Argument(format!("vertex id {t} out of range")));
            }
        }
        if v >= self.vertex_count {
            return Err(Error::Argument(format!("vertex id {v} out of range")));
        }
        let dist = self.distances_from(targets);
        Ok(dist[v])
    }

    /// Distance between edge `e` and a set of target edges: the minimum over
    /// endpoints `a` of `e` and endpoints `b` of any target of the
    /// shortest-path vertex distance `d(a,b)`. `None` means disconnected.
    pub fn edge_distance(&self, e: usize, targets: &[usize]) -> Result<Option<usize>> {
        if targets.is_empty() {
            return Err(Error::Argument("empty target edge set".into()));
        }
        let (u, v) = self.edge(e)?;
        let mut sources = Vec::with_capacity(2 * targets.len());
        for &t in targets {
            let (a, b) = self.edge(t)?;
            sources.push(a);
            sources.push(b);
        }
        let dist = self.distances_from(&sources);
        Ok(match (dist[u], dist[v]) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        })
    }

    /// Distance between two edge sets: min over pairs.
    pub fn edge_set_distance(&self, a: &[usize], b: &[usize]) -> Result<Option<usize>> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Argument("empty edge set".into()));
        }
        let mut best: Option<usize> = None;
        for &e in a {
            if let Some(d) = self.edge_distance(e, b)? {
                best = Some(best.map_or(d, |x| x.min(d)));
            }
        }
        Ok(best)
    }

    /// Returns the graph with the given edges removed. The vertex set is
    /// unchanged; surviving edges keep their relative order and are
    /// renumbered `0..`.
    pub fn delete_edges(&self, removed: &[usize]) -> Result<Graph> {
        let mut drop = vec![false; self.edges.len()];
        for &e in removed {
            if e >= self.edges.len() {
                return Err(Error::Argument(format!("edge id {e} out of range")));
            }
            drop[e] = true;
        }
        let kept = self
            .edges
            .iter()
            .zip(&drop)
            .filter(|(_, &d)| !d)
            .map(|(&e, _)| e)
            .collect();
        Graph::new(self.vertex_count, kept)
    }

    /// The prefix graph on the first `i` edges (telescoping order).
    pub fn edge_prefix(&self, i: usize) -> Graph {
        Graph::new(self.vertex_count, self.edges[..i].to_vec())
            .expect("prefix of a valid graph is valid")
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        self.distances_from(&[0]).iter().all(Option::is_some)
    }
}

/// Per-edge activities and per-vertex external fields of an Ising model.
#[derive(Debug, Clone)]
pub struct IsingParams {
    pub beta: Vec<f64>,
    pub lambda: Vec<Complex64>,
}

impl IsingParams {
    /// Uniform activities.
    pub fn uniform(g: &Graph, beta: f64, lambda: Complex64) -> Self {
        IsingParams {
            beta: vec![beta; g.edge_count()],
            lambda: vec![lambda; g.vertex_count()],
        }
    }

    /// Checks the ferromagnetic regime (`beta >= 1` on every edge).
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.beta.len() != g.edge_count() {
            return Err(Error::Argument(format!(
                "beta has {} entries for {} edges",
                self.beta.len(),
                g.edge_count()
            )));
        }
        if self.lambda.len() != g.vertex_count() {
            return Err(Error::Argument(format!(
                "lambda has {} entries for {} vertices",
                self.lambda.len(),
                g.vertex_count()
            )));
        }
        if let Some(b) = self.beta.iter().find(|&&b| !(b >= 1.0)) {
            return Err(Error::Domain(format!(
                "edge activity {b} below the ferromagnetic threshold 1"
            )));
        }
        Ok(())
    }
}

/// A partial evaluation: substitution of fixed values for selected edge
/// activities and vertex fields. Edge values live in `[1, inf]` with the
/// infinity written as [`EdgeActivity::Contract`].
#[derive(Debug, Clone, Default)]
pub struct PartialEvaluation {
    pub edge_overrides: BTreeMap<usize, EdgeActivity>,
    pub vertex_overrides: BTreeMap<usize, Complex64>,
}

impl PartialEvaluation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_edge(mut self, e: usize, value: EdgeActivity) -> Self {
        self.edge_overrides.insert(e, value);
        self
    }

    pub fn with_vertex(mut self, v: usize, value: Complex64) -> Self {
        self.vertex_overrides.insert(v, value);
        self
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        for (&e, val) in &self.edge_overrides {
            if e >= g.edge_count() {
                return Err(Error::Argument(format!("override on unknown edge {e}")));
            }
            if let EdgeActivity::Finite(b) = val {
                if !(*b >= 1.0) {
                    return Err(Error::Domain(format!(
                        "edge override {b} outside [1, inf]"
                    )));
                }
            }
        }
        for &v in self.vertex_overrides.keys() {
            if v >= g.vertex_count() {
                return Err(Error::Argument(format!("override on unknown vertex {v}")));
            }
        }
        Ok(())
    }

    /// Composes two evaluations, requiring disjoint domains.
    pub fn compose(&self, other: &PartialEvaluation) -> Result<PartialEvaluation> {
        let mut out = self.clone();
        for (&e, &val) in &other.edge_overrides {
            if out.edge_overrides.insert(e, val).is_some() {
                return Err(Error::Argument(format!(
                    "edge {e} assigned by both evaluations"
                )));
            }
        }
        for (&v, &val) in &other.vertex_overrides {
            if out.vertex_overrides.insert(v, val).is_some() {
                return Err(Error::Argument(format!(
                    "vertex {v} assigned by both evaluations"
                )));
            }
        }
        Ok(out)
    }

    /// Edge ids this evaluation touches.
    pub fn edge_domain(&self) -> Vec<usize> {
        self.edge_overrides.keys().copied().collect()
    }
}

/// The set of edges on which two evaluations differ:
/// `(A \ B) U (B \ A) U { f in A n B : m1(f) != m2(f) }`.
pub fn edge_disagreement(m1: &PartialEvaluation, m2: &PartialEvaluation) -> Vec<usize> {
    let mut out = Vec::new();
    for (&e, &v1) in &m1.edge_overrides {
        match m2.edge_overrides.get(&e) {
            None => out.push(e),
            Some(&v2) if v1 != v2 => out.push(e),
            _ => {}
        }
    }
    for &e in m2.edge_overrides.keys() {
        if !m1.edge_overrides.contains_key(&e) {
            out.push(e);
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap()
    }

    #[test]
    fn edge_distance_on_path() {
        // path v0-v1-v2-v3, e = (v0,v1), target = (v2,v3) -> 1
        let g = path(4);
        assert_eq!(g.edge_distance(0, &[2]).unwrap(), Some(1));
        // an edge is at distance 0 from itself
        assert_eq!(g.edge_distance(1, &[1]).unwrap(), Some(0));
    }

    #[test]
    fn edge_distance_disconnected() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.edge_distance(0, &[1]).unwrap(), None);
    }

    #[test]
    fn edge_distance_rejects_bad_input() {
        let g = path(4);
        assert!(g.edge_distance(0, &[]).is_err());
        assert!(g.edge_distance(9, &[0]).is_err());
        assert!(g.edge_distance(0, &[9]).is_err());
    }

    #[test]
    fn delete_edges_triangle() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = g.delete_edges(&[2]).unwrap();
        assert_eq!(p.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(p.vertex_count(), 3);

        let empty = g.delete_edges(&[0, 1, 2]).unwrap();
        assert_eq!(empty.edge_count(), 0);
        assert_eq!(empty.vertex_count(), 3);

        let same = g.delete_edges(&[]).unwrap();
        assert_eq!(same.edges(), g.edges());
    }

    #[test]
    fn delete_edges_composes_up_to_remap() {
        let g = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let once = g.delete_edges(&[1, 3]).unwrap();
        // removing {1} then the remapped id of {3} (now 2) matches
        let a = g.delete_edges(&[1]).unwrap();
        let b = a.delete_edges(&[2]).unwrap();
        assert_eq!(once.edges(), b.edges());
    }

    #[test]
    fn max_degree_cases() {
        let star = Graph::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(star.max_degree(), 4);
        let c5 = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5)).collect()).unwrap();
        assert_eq!(c5.max_degree(), 2);
        let empty = Graph::new(3, vec![]).unwrap();
        assert_eq!(empty.max_degree(), 0);
    }

    #[test]
    fn rejects_non_simple() {
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn adding_edges_never_increases_edge_distance() {
        // triangle with a pendant path: compare distances in subgraph vs supergraph
        let g = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let h = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        for e in 0..g.edge_count() {
            for t in 0..g.edge_count() {
                let dg = g.edge_distance(e, &[t]).unwrap();
                let dh = h.edge_distance(e, &[t]).unwrap();
                match (dg, dh) {
                    (Some(a), Some(b)) => assert!(b <= a),
                    (None, _) => {}
                    (Some(_), None) => panic!("supergraph disconnected where subgraph is not"),
                }
            }
        }
    }

    #[test]
    fn composition_requires_disjoint_domains() {
        let a = PartialEvaluation::new().with_edge(0, EdgeActivity::Finite(1.0));
        let b = PartialEvaluation::new().with_edge(0, EdgeActivity::Contract);
        assert!(a.compose(&b).is_err());
        let c = PartialEvaluation::new().with_edge(1, EdgeActivity::Contract);
        assert!(a.compose(&c).is_ok());
    }

    #[test]
    fn disagreement_set() {
        let m1 = PartialEvaluation::new()
            .with_edge(0, EdgeActivity::Finite(1.0))
            .with_edge(1, EdgeActivity::Finite(2.0));
        let m2 = PartialEvaluation::new()
            .with_edge(1, EdgeActivity::Finite(2.0))
            .with_edge(2, EdgeActivity::Finite(1.0));
        assert_eq!(edge_disagreement(&m1, &m2), vec![0, 2]);
        let m3 = PartialEvaluation::new().with_edge(1, EdgeActivity::Finite(3.0));
        assert_eq!(edge_disagreement(&m1, &m3), vec![0, 1]);
    }
}
