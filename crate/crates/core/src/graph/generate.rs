use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

const GNP_MAX_TRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphKind {
    GnpConnected { n: usize, p: f64 },
    Path { n: usize },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    Complete { n: usize },
    Star { n: usize },
    TreePlusChords { n: usize, chords: usize },
}

impl GraphKind {
    pub fn n(&self) -> usize {
        match *self {
            GraphKind::GnpConnected { n, .. }
            | GraphKind::Path { n }
            | GraphKind::Cycle { n }
            | GraphKind::Complete { n }
            | GraphKind::Star { n }
            | GraphKind::TreePlusChords { n, .. } => n,
            GraphKind::Grid { rows, cols } => rows * cols,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightMode {
    /// Independent uniform weights in `1..=max`.
    Uniform {
        max: u64,
    },
    AllEqual,
    /// A random permutation of `1..=m`.
    DistinctRandom,
}

/// Generates a connected graph; identical arguments give identical graphs.
pub fn generate(
    kind: GraphKind,
    weights: Option<WeightMode>,
    k: usize,
    seed: u64,
) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = match kind {
        GraphKind::GnpConnected { n, p } => gnp_connected(n, p, k, &mut rng)?,
        GraphKind::Path { n } => {
            if n < 1 {
                return Err(GraphError::Param("path needs n >= 1".into()));
            }
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, k, &edges)?
        }
        GraphKind::Cycle { n } => {
            if n < 3 {
                return Err(GraphError::Param("cycle needs n >= 3".into()));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::from_edges(n, k, &edges)?
        }
        GraphKind::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(GraphError::Param("grid needs positive dimensions".into()));
            }
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Graph::from_edges(rows * cols, k, &edges)?
        }
        GraphKind::Complete { n } => {
            if n < 1 {
                return Err(GraphError::Param("complete graph needs n >= 1".into()));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v));
                }
            }
            Graph::from_edges(n, k, &edges)?
        }
        GraphKind::Star { n } => {
            if n < 1 {
                return Err(GraphError::Param("star needs n >= 1".into()));
            }
            let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
            Graph::from_edges(n, k, &edges)?
        }
        GraphKind::TreePlusChords { n, chords } => {
            if n < 1 {
                return Err(GraphError::Param("tree needs n >= 1".into()));
            }
            let max_extra = n * (n - 1) / 2 - (n - 1);
            if chords > max_extra {
                return Err(GraphError::Param(format!(
                    "{chords} chords exceed the {max_extra} available non-tree pairs"
                )));
            }
            let mut g = Graph::new(n, k);
            for v in 1..n {
                let parent = rng.gen_range(0..v);
                g.add_edge(parent, v)?;
            }
            let mut added = 0;
            while added < chords {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && g.edge_between(u, v).is_none() {
                    g.add_edge(u.min(v), u.max(v))?;
                    added += 1;
                }
            }
            g
        }
    };
    if let Some(mode) = weights {
        let m = g.m();
        let w = match mode {
            WeightMode::Uniform { max } => {
                if max < 1 {
                    return Err(GraphError::Param("weight bound must be >= 1".into()));
                }
                (0..m).map(|_| rng.gen_range(1..=max)).collect()
            }
            WeightMode::AllEqual => vec![1; m],
            WeightMode::DistinctRandom => {
                let mut w: Vec<u64> = (1..=m as u64).collect();
                w.shuffle(&mut rng);
                w
            }
        };
        g.set_weights(w)?;
    }
    Ok(g)
}

fn gnp_connected(n: usize, p: f64, k: usize, rng: &mut ChaCha8Rng) -> Result<Graph, GraphError> {
    if n < 1 || !(0.0..=1.0).contains(&p) {
        return Err(GraphError::Param(format!(
            "gnp needs n >= 1 and p in [0,1], got n={n}, p={p}"
        )));
    }
    if n > 1 && p == 0.0 {
        return Err(GraphError::Param(
            "gnp with p = 0 is never connected".into(),
        ));
    }
    for _ in 0..GNP_MAX_TRIES {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, k, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::Param(format!(
        "gnp(n={n}, p={p}) not connected after {GNP_MAX_TRIES} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_complete_sizes() {
        let p = generate(GraphKind::Path { n: 5 }, None, 1, 0).unwrap();
        assert_eq!(p.m(), 4);
        let c = generate(GraphKind::Complete { n: 4 }, None, 1, 0).unwrap();
        assert_eq!(c.m(), 6);
        let grid = generate(GraphKind::Grid { rows: 3, cols: 4 }, None, 1, 0).unwrap();
        assert_eq!(grid.m(), 3 * 3 + 2 * 4);
    }

    #[test]
    fn gnp_is_deterministic_and_connected() {
        let kind = GraphKind::GnpConnected { n: 64, p: 0.1 };
        let a = generate(kind.clone(), None, 1, 7).unwrap();
        let b = generate(kind, None, 1, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.is_connected());
    }

    #[test]
    fn parameter_errors() {
        assert!(generate(GraphKind::Cycle { n: 2 }, None, 1, 0).is_err());
        assert!(generate(GraphKind::TreePlusChords { n: 3, chords: 2 }, None, 1, 0).is_err());
        assert!(generate(GraphKind::GnpConnected { n: 5, p: 0.0 }, None, 1, 0).is_err());
    }

    #[test]
    fn weight_modes() {
        let kind = GraphKind::Complete { n: 6 };
        let g = generate(kind.clone(), Some(WeightMode::DistinctRandom), 1, 2).unwrap();
        let mut w = g.weights().unwrap().to_vec();
        w.sort_unstable();
        assert_eq!(w, (1..=15).collect::<Vec<u64>>());
        let g = generate(kind.clone(), Some(WeightMode::Uniform { max: 16 }), 1, 2).unwrap();
        assert!(g.weights().unwrap().iter().all(|&w| (1..=16).contains(&w)));
        let g = generate(kind, Some(WeightMode::AllEqual), 1, 2).unwrap();
        assert!(g.weights().unwrap().iter().all(|&w| w == 1));
    }

    #[test]
    fn tree_plus_chords_counts() {
        let g = generate(GraphKind::TreePlusChords { n: 20, chords: 7 }, None, 1, 4).unwrap();
        assert_eq!(g.m(), 19 + 7);
        assert!(g.is_connected());
    }
}
