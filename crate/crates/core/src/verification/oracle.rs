//! Centralized answers for the verification tasks.

use super::{Task, VerifyError};
use crate::graph::oracle::{components, mask_to_edges, oracle_mst};
use crate::graph::Graph;

fn h_edges(g: &Graph) -> Result<Vec<usize>, VerifyError> {
    g.subgraph()
        .map(mask_to_edges)
        .ok_or(VerifyError::Missing("subgraph"))
}

fn complement(g: &Graph, h: &[usize]) -> Vec<usize> {
    let mut in_h = vec![false; g.m()];
    for &e in h {
        in_h[e] = true;
    }
    (0..g.m()).filter(|&e| !in_h[e]).collect()
}

fn degrees(g: &Graph, h: &[usize]) -> Vec<usize> {
    let mut d = vec![0; g.n()];
    for &e in h {
        let (u, v) = g.endpoints(e);
        d[u] += 1;
        d[v] += 1;
    }
    d
}

/// Whether the nodes touched by `h` form one component of `h`.
fn touched_connected(g: &Graph, h: &[usize]) -> bool {
    let parts = components(g, h);
    let deg = degrees(g, h);
    let mut label = None;
    for v in 0..g.n() {
        if deg[v] > 0 {
            match label {
                None => label = Some(parts.cluster_of[v]),
                Some(l) if l != parts.cluster_of[v] => return false,
                _ => {}
            }
        }
    }
    true
}

fn on_cycle(g: &Graph, h: &[usize], e: usize) -> bool {
    if !h.contains(&e) {
        return false;
    }
    let rest: Vec<usize> = h.iter().copied().filter(|&x| x != e).collect();
    let (u, v) = g.endpoints(e);
    components(g, &rest).same(u, v)
}

fn st(g: &Graph) -> Result<(usize, usize), VerifyError> {
    g.st().ok_or(VerifyError::Missing("s and t"))
}

fn marked(g: &Graph) -> Result<usize, VerifyError> {
    g.marked_edge()
        .ok_or(VerifyError::Missing("distinguished edge"))
}

/// The correct answer for `task` on the instance stored in `g`.
pub fn oracle_answer(task: Task, g: &Graph) -> Result<bool, VerifyError> {
    let h = h_edges(g)?;
    let n = g.n();
    Ok(match task {
        Task::Mst => {
            let weights = g.weights().ok_or(VerifyError::Missing("weights"))?;
            let (best, _) = oracle_mst(g)?;
            let w: u64 = h.iter().map(|&e| weights[e]).sum();
            h.len() + 1 == n && components(g, &h).count == 1 && w == best
        }
        Task::ConnectedSpanning => components(g, &h).count == 1,
        Task::ECycle => on_cycle(g, &h, marked(g)?),
        Task::EdgeOnAllPaths => {
            let e = marked(g)?;
            h.contains(&e) && !on_cycle(g, &h, e)
        }
        Task::StConnectivity => {
            let (s, t) = st(g)?;
            components(g, &h).same(s, t)
        }
        Task::StCut => {
            let (s, t) = st(g)?;
            !components(g, &complement(g, &h)).same(s, t)
        }
        Task::Connectivity => touched_connected(g, &h),
        Task::Cut => components(g, &complement(g, &h)).count > 1,
        Task::HamiltonianCycle => {
            n >= 3 && degrees(g, &h).iter().all(|&d| d == 2) && components(g, &h).count == 1
        }
        Task::SimplePath => {
            let d = degrees(g, &h);
            d.iter().all(|&x| x <= 2) && d.contains(&1) && touched_connected(g, &h)
        }
    })
}
