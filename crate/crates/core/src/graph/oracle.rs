//! Classical sequential reference answers.

use std::collections::VecDeque;

use super::{Graph, GraphError};
use crate::dsu::UnionFind;

pub const UNREACHABLE: u32 = u32::MAX;

/// Connected components of `(V, T)` for an edge subset `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    pub cluster_of: Vec<usize>,
    pub count: usize,
}

impl ClusterPartition {
    pub fn same(&self, u: usize, v: usize) -> bool {
        self.cluster_of[u] == self.cluster_of[v]
    }

    /// An edge is outgoing iff its endpoints lie in different clusters.
    pub fn is_outgoing(&self, g: &Graph, edge: usize) -> bool {
        let (u, v) = g.endpoints(edge);
        !self.same(u, v)
    }
}

pub fn mask_to_edges(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(e, _)| e)
        .collect()
}

pub fn components(g: &Graph, edges: &[usize]) -> ClusterPartition {
    let mut uf = UnionFind::new(g.n());
    for &e in edges {
        let (u, v) = g.endpoints(e);
        uf.union(u, v);
    }
    let (labels, count) = uf.labels();
    ClusterPartition {
        cluster_of: labels.into_iter().map(|l| l as usize).collect(),
        count,
    }
}

/// Kruskal. Returns the MST weight and one MST edge set (lowest edge index
/// among equal weights).
pub fn oracle_mst(g: &Graph) -> Result<(u64, Vec<usize>), GraphError> {
    let w = g.weights().ok_or(GraphError::Unweighted)?;
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&e| (w[e], e));
    let mut uf = UnionFind::new(g.n());
    let mut total = 0;
    let mut tree = Vec::with_capacity(g.n().saturating_sub(1));
    for e in order {
        let (u, v) = g.endpoints(e);
        if uf.union(u, v) {
            total += w[e];
            tree.push(e);
        }
    }
    if g.n() > 0 && tree.len() != g.n() - 1 {
        return Err(GraphError::Disconnected);
    }
    tree.sort_unstable();
    Ok((total, tree))
}

fn adjacency(g: &Graph, edges: &[usize]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.n()];
    for &e in edges {
        let (u, v) = g.endpoints(e);
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; adj.len()];
    let mut queue = VecDeque::new();
    dist[s] = 0;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Hop distances from `s` in `(V, edges)`; [`UNREACHABLE`] marks other components.
pub fn distances_from(g: &Graph, edges: &[usize], s: usize) -> Vec<u32> {
    bfs(&adjacency(g, edges), s)
}

/// All-pairs hop distances in `(V, edges)`.
pub fn oracle_distances(g: &Graph, edges: &[usize]) -> Vec<Vec<u32>> {
    let adj = adjacency(g, edges);
    (0..g.n()).map(|s| bfs(&adj, s)).collect()
}

/// With `st`, whether `s` and `t` are connected in `(V, edges)`; otherwise
/// whether `(V, edges)` is connected.
pub fn oracle_connectivity(g: &Graph, edges: &[usize], st: Option<(usize, usize)>) -> bool {
    let parts = components(g, edges);
    match st {
        Some((s, t)) => parts.same(s, t),
        None => parts.count <= 1,
    }
}
