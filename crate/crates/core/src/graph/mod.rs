//! Port-numbered simple graphs with optional weights and task inputs.
//!
//! Ports are assigned per node in order of edge insertion, so the port of an
//! edge at a node is stable across save/load round trips. Ports and pin
//! indices are zero-based in code and rendered one-based in text output.

mod generate;
mod io;
pub mod oracle;

pub use generate::{generate, GraphKind, WeightMode};
pub use io::{load_graph, save_graph};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("edge index {index} out of range for m = {m}")]
    EdgeOutOfRange { index: usize, m: usize },
    #[error("weight {0} is below 1")]
    WeightTooSmall(u64),
    #[error("{msg} at line {line}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no edge weights")]
    Unweighted,
}

/// One entry of a node's port table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub neighbor: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    k: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<Incidence>>,
    weights: Option<Vec<u64>>,
    subgraph: Option<Vec<bool>>,
    st: Option<(usize, usize)>,
    marked_edge: Option<usize>,
}

impl Graph {
    pub fn new(n: usize, k: usize) -> Self {
        Graph {
            n,
            k: k.max(1),
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
            weights: None,
            subgraph: None,
            st: None,
            marked_edge: None,
        }
    }

    pub fn from_edges(n: usize, k: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n, k);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<usize, GraphError> {
        for node in [u, v] {
            if node >= self.n {
                return Err(GraphError::NodeOutOfRange { node, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.edge_between(u, v).is_some() {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        let edge = self.edges.len();
        self.edges.push((u, v));
        self.adjacency[u].push(Incidence { neighbor: v, edge });
        self.adjacency[v].push(Incidence { neighbor: u, edge });
        if let Some(w) = self.weights.as_mut() {
            w.push(1);
        }
        if let Some(h) = self.subgraph.as_mut() {
            h.push(false);
        }
        Ok(edge)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Pins per edge declared for this graph (the file header value).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn with_pins(mut self, k: usize) -> Self {
        self.k = k.max(1);
        self
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    pub fn other_endpoint(&self, edge: usize, v: usize) -> usize {
        let (a, b) = self.edges[edge];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Incident edges of `v` in port order.
    pub fn ports(&self, v: usize) -> &[Incidence] {
        &self.adjacency[v]
    }

    pub fn port_of(&self, v: usize, edge: usize) -> Option<usize> {
        self.adjacency[v].iter().position(|inc| inc.edge == edge)
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a]
            .iter()
            .find(|inc| inc.neighbor == b)
            .map(|inc| inc.edge)
    }

    pub fn weights(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    pub fn weight(&self, edge: usize) -> Option<u64> {
        self.weights.as_ref().map(|w| w[edge])
    }

    pub fn set_weights(&mut self, weights: Vec<u64>) -> Result<(), GraphError> {
        if weights.len() != self.m() {
            return Err(GraphError::Param(format!(
                "expected {} weights, got {}",
                self.m(),
                weights.len()
            )));
        }
        if let Some(&w) = weights.iter().find(|&&w| w < 1) {
            return Err(GraphError::WeightTooSmall(w));
        }
        self.weights = Some(weights);
        Ok(())
    }

    pub fn clear_weights(&mut self) {
        self.weights = None;
    }

    /// Largest weight, or `None` for unweighted graphs.
    pub fn max_weight(&self) -> Option<u64> {
        self.weights.as_ref().and_then(|w| w.iter().copied().max())
    }

    /// Subgraph membership bits (`E_H`), one per edge.
    pub fn subgraph(&self) -> Option<&[bool]> {
        self.subgraph.as_deref()
    }

    pub fn set_subgraph(&mut self, bits: Vec<bool>) -> Result<(), GraphError> {
        if bits.len() != self.m() {
            return Err(GraphError::Param(format!(
                "expected {} subgraph bits, got {}",
                self.m(),
                bits.len()
            )));
        }
        self.subgraph = Some(bits);
        Ok(())
    }

    pub fn set_subgraph_edges(&mut self, edges: &[usize]) -> Result<(), GraphError> {
        let mut bits = vec![false; self.m()];
        for &e in edges {
            if e >= self.m() {
                return Err(GraphError::EdgeOutOfRange {
                    index: e,
                    m: self.m(),
                });
            }
            bits[e] = true;
        }
        self.subgraph = Some(bits);
        Ok(())
    }

    pub fn clear_subgraph(&mut self) {
        self.subgraph = None;
    }

    pub fn st(&self) -> Option<(usize, usize)> {
        self.st
    }

    pub fn set_st(&mut self, s: usize, t: usize) -> Result<(), GraphError> {
        for node in [s, t] {
            if node >= self.n {
                return Err(GraphError::NodeOutOfRange { node, n: self.n });
            }
        }
        if s == t {
            return Err(GraphError::Param("s and t must differ".into()));
        }
        self.st = Some((s, t));
        Ok(())
    }

    pub fn clear_st(&mut self) {
        self.st = None;
    }

    pub fn marked_edge(&self) -> Option<usize> {
        self.marked_edge
    }

    pub fn set_marked_edge(&mut self, edge: usize) -> Result<(), GraphError> {
        if edge >= self.m() {
            return Err(GraphError::EdgeOutOfRange {
                index: edge,
                m: self.m(),
            });
        }
        self.marked_edge = Some(edge);
        Ok(())
    }

    pub fn clear_marked_edge(&mut self) {
        self.marked_edge = None;
    }

    /// Per node, the bit of each port's edge in `mask`.
    pub fn port_bits(&self, mask: &[bool]) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|v| self.adjacency[v].iter().map(|inc| mask[inc.edge]).collect())
            .collect()
    }

    /// Per node, the value of each port's edge in `values`.
    pub fn port_values<T: Copy>(&self, values: &[T]) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|v| {
                self.adjacency[v]
                    .iter()
                    .map(|inc| values[inc.edge])
                    .collect()
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.m()).collect();
        oracle::components(self, &all).count <= 1
    }
}

/// Number of bits in the binary representation of `w` without leading zeros.
pub fn bit_length(w: u64) -> u32 {
    64 - w.leading_zeros()
}
