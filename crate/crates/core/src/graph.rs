//! Undirected graph instances with the incident-edge structure the
//! 3-coloring question distribution is built on.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// An undirected edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(u: usize, v: usize) -> Result<Self> {
        if u == v {
            return Err(CoreError::Parse(format!("self-loop at vertex {u}")));
        }
        Ok(Edge(u.min(v), u.max(v)))
    }

    pub fn endpoints(&self) -> [usize; 2] {
        [self.0, self.1]
    }

    pub fn touches(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// The shared vertices of two edges, in ascending order.
    pub fn shared_vertices(&self, other: &Edge) -> Vec<usize> {
        self.endpoints()
            .into_iter()
            .filter(|v| other.touches(*v))
            .collect()
    }
}

/// A simple undirected graph: `n` vertices and an edge set `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphInstance {
    n: usize,
    edges: Vec<Edge>,
    /// `incident[v]` holds indices into `edges` of every edge touching `v`.
    incident: Vec<Vec<usize>>,
}

impl GraphInstance {
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(u, v) in pairs {
            if u >= n || v >= n {
                return Err(CoreError::Parse(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            edges.push(Edge::new(u, v)?);
        }
        edges.sort();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoreError::Parse("duplicate edge".into()));
        }
        let mut incident = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            incident[e.0].push(i);
            incident[e.1].push(i);
        }
        Ok(GraphInstance { n, edges, incident })
    }

    /// Parse a text edge list: one `u v` pair per line, 0-indexed, blank
    /// lines ignored. The vertex count is the largest index plus one.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut max_vertex = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.ok_or_else(|| CoreError::Parse(format!("line {}: missing vertex", lineno + 1)))?
                    .parse::<usize>()
                    .map_err(|e| CoreError::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(CoreError::Parse(format!(
                    "line {}: expected exactly two vertices",
                    lineno + 1
                )));
            }
            max_vertex = max_vertex.max(u).max(v);
            pairs.push((u, v));
        }
        if pairs.is_empty() {
            return Err(CoreError::Parse("empty edge list".into()));
        }
        GraphInstance::new(max_vertex + 1, &pairs)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> Edge {
        self.edges[idx]
    }

    pub fn edge_index(&self, e: &Edge) -> Option<usize> {
        self.edges.binary_search(e).ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        Edge::new(u, v).map_or(false, |e| self.edge_index(&e).is_some())
    }

    /// Indices of the edges incident to `v`. An edge is incident to both
    /// of its endpoints, itself included.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                pairs.push((u, v));
            }
        }
        GraphInstance::new(n, &pairs).expect("complete graph is simple")
    }

    /// Cycle graph `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        GraphInstance::new(n, &pairs).expect("cycle graph is simple")
    }

    /// Star with `n - 1` leaves around vertex 0.
    pub fn star(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
        GraphInstance::new(n, &pairs).expect("star graph is simple")
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        GraphInstance::new(n, &pairs).expect("path graph is simple")
    }

    /// Check a cyclic vertex sequence: visits every vertex exactly once
    /// and every consecutive pair (including the wraparound) is an edge.
    pub fn is_hamiltonian_cycle(&self, cycle: &[usize]) -> bool {
        if cycle.len() != self.n || self.n < 3 {
            return false;
        }
        let mut seen = vec![false; self.n];
        for &v in cycle {
            if v >= self.n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        (0..self.n).all(|i| self.has_edge(cycle[i], cycle[(i + 1) % self.n]))
    }

    /// Check a 3-coloring: adjacent vertices get distinct colors in F_3.
    pub fn is_proper_coloring(&self, coloring: &[u8]) -> bool {
        coloring.len() == self.n
            && coloring.iter().all(|&c| c < 3)
            && self
                .edges
                .iter()
                .all(|e| coloring[e.0] != coloring[e.1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_edge_lists() {
        let g = GraphInstance::parse_edge_list("0 1\n\n1 2\n2 0\n").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GraphInstance::parse_edge_list("0 0").is_err());
        assert!(GraphInstance::parse_edge_list("0 1\n1 0").is_err());
        assert!(GraphInstance::parse_edge_list("0").is_err());
        assert!(GraphInstance::parse_edge_list("").is_err());
    }

    #[test]
    fn incident_edges_include_the_edge_itself() {
        let g = GraphInstance::complete(3);
        let e = Edge::new(0, 1).unwrap();
        let idx = g.edge_index(&e).unwrap();
        assert!(g.incident_edges(0).contains(&idx));
        assert!(g.incident_edges(1).contains(&idx));
    }

    #[test]
    fn hamiltonian_cycle_checks() {
        let g = GraphInstance::complete(4);
        assert!(g.is_hamiltonian_cycle(&[0, 1, 2, 3]));
        assert!(!g.is_hamiltonian_cycle(&[0, 1, 2, 2]));
        let star = GraphInstance::star(4);
        assert!(!star.is_hamiltonian_cycle(&[0, 1, 2, 3]));
    }

    #[test]
    fn coloring_checks() {
        let g = GraphInstance::complete(3);
        assert!(g.is_proper_coloring(&[0, 1, 2]));
        assert!(!g.is_proper_coloring(&[0, 0, 2]));
        let k4 = GraphInstance::complete(4);
        assert!(!k4.is_proper_coloring(&[0, 1, 2, 0]));
    }
}
