//! Matched yes/no instances that differ by a small perturbation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Task, VerifyError};
use crate::dsu::UnionFind;
use crate::graph::oracle::oracle_mst;
use crate::graph::{generate, Graph, GraphError, GraphKind, WeightMode};

const ATTEMPTS: u64 = 64;

#[derive(Debug, Clone)]
pub struct InstancePair {
    pub yes: Graph,
    pub no: Graph,
}

impl InstancePair {
    pub fn get(&self, yes: bool) -> &Graph {
        if yes {
            &self.yes
        } else {
            &self.no
        }
    }
}

/// Builds a yes instance and a no instance of `task` on `n >= 6` nodes.
pub fn instance_pair(task: Task, n: usize, seed: u64) -> Result<InstancePair, VerifyError> {
    if n < 6 {
        return Err(GraphError::Param("instances need n >= 6".into()).into());
    }
    for attempt in 0..ATTEMPTS {
        let s = seed.wrapping_mul(ATTEMPTS).wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5eed_1a57);
        if let Some(pair) = build(task, n, s, &mut rng)? {
            return Ok(pair);
        }
    }
    Err(GraphError::Param(format!("no {task} instance found for n={n}, seed={seed}")).into())
}

fn base(n: usize, weights: Option<WeightMode>, seed: u64) -> Result<Graph, GraphError> {
    let p = (6.0 / n as f64).min(1.0);
    generate(GraphKind::GnpConnected { n, p }, weights, 3, seed)
}

fn random_tree(g: &Graph, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.shuffle(rng);
    let mut uf = UnionFind::new(g.n());
    let mut tree: Vec<usize> = order
        .into_iter()
        .filter(|&e| {
            let (u, v) = g.endpoints(e);
            uf.union(u, v)
        })
        .collect();
    tree.sort_unstable();
    tree
}

/// Edges on the path from `a` to `b` using only `edges`.
fn path_edges(g: &Graph, edges: &[usize], a: usize, b: usize) -> Vec<usize> {
    let mut allowed = vec![false; g.m()];
    for &e in edges {
        allowed[e] = true;
    }
    let mut via: Vec<Option<usize>> = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    seen[a] = true;
    let mut queue = std::collections::VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for inc in g.ports(v) {
            if allowed[inc.edge] && !seen[inc.neighbor] {
                seen[inc.neighbor] = true;
                via[inc.neighbor] = Some(inc.edge);
                queue.push_back(inc.neighbor);
            }
        }
    }
    let mut path = Vec::new();
    let mut x = b;
    while let Some(e) = via[x] {
        path.push(e);
        x = g.other_endpoint(e, x);
    }
    path
}

fn without(edges: &[usize], drop: &[usize]) -> Vec<usize> {
    edges
        .iter()
        .copied()
        .filter(|e| !drop.contains(e))
        .collect()
}

fn non_edges_of(g: &Graph, edges: &[usize]) -> Vec<usize> {
    (0..g.m()).filter(|e| !edges.contains(e)).collect()
}

fn with_h(g: &Graph, h: &[usize]) -> Result<Graph, GraphError> {
    let mut x = g.clone();
    x.set_subgraph_edges(h)?;
    Ok(x)
}

/// Side of `s` after removing `cut` from `tree`.
fn side(g: &Graph, tree: &[usize], cut: usize, s: usize) -> Vec<bool> {
    let rest = without(tree, &[cut]);
    let mut inside = vec![false; g.n()];
    for v in 0..g.n() {
        inside[v] = v == s || !path_edges(g, &rest, s, v).is_empty();
    }
    inside
}

fn crossing(g: &Graph, inside: &[bool]) -> Vec<usize> {
    (0..g.m())
        .filter(|&e| {
            let (u, v) = g.endpoints(e);
            inside[u] != inside[v]
        })
        .collect()
}

/// Random Hamiltonian cycle over a permutation, plus extra chords.
fn ham_graph(
    n: usize,
    chords: &[(usize, usize)],
    rng: &mut ChaCha8Rng,
) -> Result<(Graph, Vec<usize>), GraphError> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut g = Graph::new(n, 3);
    for i in 0..n {
        g.add_edge(perm[i], perm[(i + 1) % n])?;
    }
    for &(i, j) in chords {
        let (u, v) = (perm[i], perm[j]);
        if g.edge_between(u, v).is_none() {
            g.add_edge(u, v)?;
        }
    }
    for _ in 0..n / 2 {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && g.edge_between(u, v).is_none() {
            g.add_edge(u, v)?;
        }
    }
    Ok((g, perm))
}

fn build(
    task: Task,
    n: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<InstancePair>, VerifyError> {
    let pair = |yes: Graph, no: Graph| Ok(Some(InstancePair { yes, no }));
    match task {
        Task::Mst => {
            let g = base(n, Some(WeightMode::DistinctRandom), seed)?;
            let (_, tree) = oracle_mst(&g)?;
            let others = non_edges_of(&g, &tree);
            let Some(&f) = others.choose(rng) else {
                return Ok(None);
            };
            let (a, b) = g.endpoints(f);
            let path = path_edges(&g, &tree, a, b);
            let e = *path.choose(rng).expect("tree path is nonempty");
            let mut swapped = without(&tree, &[e]);
            swapped.push(f);
            pair(with_h(&g, &tree)?, with_h(&g, &swapped)?)
        }
        Task::ConnectedSpanning => {
            let g = base(n, None, seed)?;
            let tree = random_tree(&g, rng);
            let e = *tree.choose(rng).expect("n >= 6");
            pair(with_h(&g, &tree)?, with_h(&g, &without(&tree, &[e]))?)
        }
        Task::ECycle | Task::EdgeOnAllPaths => {
            let g = base(n, None, seed)?;
            let tree = random_tree(&g, rng);
            let Some(&f) = non_edges_of(&g, &tree).choose(rng) else {
                return Ok(None);
            };
            let (a, b) = g.endpoints(f);
            let mut cycle = path_edges(&g, &tree, a, b);
            cycle.push(f);
            cycle.shuffle(rng);
            let (e, broken) = (cycle[0], cycle[1]);
            let mut h = tree.clone();
            h.push(f);
            let mut on = with_h(&g, &h)?;
            on.set_marked_edge(e)?;
            let mut off = with_h(&g, &without(&h, &[broken]))?;
            off.set_marked_edge(e)?;
            if task == Task::ECycle {
                pair(on, off)
            } else {
                pair(off, on)
            }
        }
        Task::StConnectivity => {
            let g = base(n, None, seed)?;
            let tree = random_tree(&g, rng);
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            let e = *path_edges(&g, &tree, s, t).choose(rng).expect("s != t");
            let mut yes = with_h(&g, &tree)?;
            yes.set_st(s, t)?;
            let mut no = with_h(&g, &without(&tree, &[e]))?;
            no.set_st(s, t)?;
            pair(yes, no)
        }
        Task::StCut | Task::Cut => {
            let g = base(n, None, seed)?;
            let tree = random_tree(&g, rng);
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            let e = *path_edges(&g, &tree, s, t).choose(rng).expect("s != t");
            let cut = crossing(&g, &side(&g, &tree, e, s));
            let back = *cut.choose(rng).expect("tree edge crosses");
            let mut yes = with_h(&g, &cut)?;
            let mut no = with_h(&g, &without(&cut, &[back]))?;
            if task == Task::StCut {
                yes.set_st(s, t)?;
                no.set_st(s, t)?;
            }
            pair(yes, no)
        }
        Task::Connectivity => {
            let g = base(n, None, seed)?;
            let tree = random_tree(&g, rng);
            let root = rng.gen_range(0..n);
            let keep = rng.gen_range(n / 3..=2 * n / 3).max(4);
            let mut order = vec![root];
            let mut i = 0;
            while i < order.len() && order.len() < keep {
                let v = order[i];
                for inc in g.ports(v) {
                    if tree.contains(&inc.edge)
                        && !order.contains(&inc.neighbor)
                        && order.len() < keep
                    {
                        order.push(inc.neighbor);
                    }
                }
                i += 1;
            }
            let sub: Vec<usize> = tree
                .iter()
                .copied()
                .filter(|&e| {
                    let (u, v) = g.endpoints(e);
                    order.contains(&u) && order.contains(&v)
                })
                .collect();
            let deg = |v: usize| {
                sub.iter()
                    .filter(|&&e| {
                        let (a, b) = g.endpoints(e);
                        a == v || b == v
                    })
                    .count()
            };
            let inner: Vec<usize> = sub
                .iter()
                .copied()
                .filter(|&e| {
                    let (u, v) = g.endpoints(e);
                    deg(u) >= 2 && deg(v) >= 2
                })
                .collect();
            let Some(&e) = inner.choose(rng) else {
                return Ok(None);
            };
            pair(with_h(&g, &sub)?, with_h(&g, &without(&sub, &[e]))?)
        }
        Task::HamiltonianCycle => {
            let i = rng.gen_range(2..=n - 4);
            let (g, perm) = ham_graph(n, &[(i, 0), (n - 1, i + 1)], rng)?;
            let ring: Vec<usize> = (0..n)
                .map(|j| {
                    g.edge_between(perm[j], perm[(j + 1) % n])
                        .expect("cycle edge")
                })
                .collect();
            let mut split = without(&ring, &[ring[i], ring[n - 1]]);
            split.push(g.edge_between(perm[i], perm[0]).expect("chord"));
            split.push(g.edge_between(perm[n - 1], perm[i + 1]).expect("chord"));
            pair(with_h(&g, &ring)?, with_h(&g, &split)?)
        }
        Task::SimplePath => {
            let (g, perm) = ham_graph(n, &[], rng)?;
            let k = rng.gen_range(n / 2..n).max(3);
            let path: Vec<usize> = (0..k)
                .map(|j| g.edge_between(perm[j], perm[j + 1]).expect("cycle edge"))
                .collect();
            let cut = path[rng.gen_range(1..k - 1)];
            pair(with_h(&g, &path)?, with_h(&g, &without(&path, &[cut]))?)
        }
    }
}
