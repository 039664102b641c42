//! Random problem instances for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{SparseWeights, WeightedGraph};

/// Random connected epsilon-graph on `n` uniform points of the unit square.
///
/// Pairs closer than `eps` get a weight drawn from `[0.1, 2)`. Components are
/// then joined to the one containing vertex 0 through their closest pair, so
/// the result is always connected.
pub fn random_eps_graph(n: usize, eps: f64, seed: u64) -> WeightedGraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen(), rng.gen()]).collect();
    let dist = |a: usize, b: usize| ((pts[a][0] - pts[b][0]).powi(2) + (pts[a][1] - pts[b][1]).powi(2)).sqrt();
    let mut edges = Vec::new();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist(i, j) < eps {
                edges.push((i, j, rng.gen_range(0.1..2.0)));
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    loop {
        let root = find(&mut parent, 0);
        let (inside, outside): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| find(&mut parent, i) == root);
        if outside.is_empty() {
            break;
        }
        let mut best = (f64::INFINITY, 0, 0);
        for &a in &inside {
            for &b in &outside {
                let d = dist(a, b);
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (_, a, b) = best;
        edges.push((a.min(b), a.max(b), rng.gen_range(0.1..2.0)));
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[rb] = ra;
    }
    WeightedGraph::from_weights(SparseWeights::from_edges(n, edges).expect("valid random edges"))
}

/// `k` distinct random vertices with random values in `[lo, hi)`.
pub fn random_labels(n: usize, k: usize, lo: f64, hi: f64, seed: u64) -> Vec<(usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    idx.truncate(k.min(n));
    idx.into_iter().map(|i| (i, rng.gen_range(lo..hi))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graphs_are_connected_and_symmetric() {
        for seed in 0..20 {
            let g = random_eps_graph(60, 0.1, seed);
            assert!(g.weights().is_symmetric());
            let mut seen = [false; 60];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(x) = stack.pop() {
                for (y, _) in g.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }
}
