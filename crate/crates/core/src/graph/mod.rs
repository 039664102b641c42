//! Kernel profiles and sparse weighted graphs built from point clouds.
//!
//! Base weights are `sigma(i, j) = Phi(|x_i - x_j| / h)`. Degrees are the
//! kernel density estimate `d(x) = (Phi(0) + sum_{j != i} sigma(i, j)) / (n h^d)`
//! with `n` the number of unlabeled points. Self-tuning weights are
//! `w(i, j) = d_i^alpha d_j^alpha sigma(i, j)`. Self-loops are never stored:
//! they contribute nothing to the graph infinity-Laplacian, but the `Phi(0)`
//! self term is part of the degree.

mod io;
mod kernel;
mod sparse;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use io::{read_graph, write_graph};
pub use kernel::{unit_ball_volume, Kernel, Profile};
pub use sparse::SparseWeights;

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, SpatialIndex};
use crate::scalar::Scalar;

/// Symmetric weighted graph together with the vertex degrees used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<T> {
    weights: SparseWeights<T>,
    degrees: Vec<T>,
    alpha: T,
    max_weight: T,
    normalized: bool,
}

impl<T: Scalar> WeightedGraph<T> {
    /// Wraps weights and degrees. `M` is recomputed from the weights.
    pub fn new(weights: SparseWeights<T>, degrees: Vec<T>, alpha: T) -> Result<Self> {
        if degrees.len() != weights.n_vertices() {
            return Err(Error::param(format!(
                "{} degrees supplied for {} vertices",
                degrees.len(),
                weights.n_vertices()
            )));
        }
        let max_weight = weights.max_value();
        Ok(WeightedGraph { weights, degrees, alpha, max_weight, normalized: false })
    }

    /// Graph given directly by its weights, with unit degrees and `alpha = 0`.
    pub fn from_weights(weights: SparseWeights<T>) -> Self {
        let n = weights.n_vertices();
        let max_weight = weights.max_value();
        WeightedGraph { weights, degrees: vec![T::one(); n], alpha: T::zero(), max_weight, normalized: false }
    }

    pub fn n_vertices(&self) -> usize {
        self.weights.n_vertices()
    }

    pub fn n_edges(&self) -> usize {
        self.weights.n_edges()
    }

    pub fn weights(&self) -> &SparseWeights<T> {
        &self.weights
    }

    pub fn degrees(&self) -> &[T] {
        &self.degrees
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `M`, the largest edge weight (zero for an edgeless graph).
    pub fn max_weight(&self) -> T {
        self.max_weight
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        self.weights.neighbors(i)
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights.get(i, j).unwrap_or_else(T::zero)
    }

    /// Same graph with every weight multiplied by `c > 0`.
    pub fn rescaled(&self, c: T) -> Result<Self> {
        let weights = self.weights.scaled(c)?;
        let max_weight = weights.max_value();
        Ok(WeightedGraph { weights, degrees: self.degrees.clone(), alpha: self.alpha, max_weight, normalized: false })
    }

    /// Vertices with no incident edge.
    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&i| self.weights.degree_count(i) == 0).collect()
    }

    pub(crate) fn set_normalized(&mut self, flag: bool) {
        self.normalized = flag;
    }
}

/// Weight rule on k-NN edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KnnWeightRule {
    /// `sigma = 1` on every k-NN edge.
    Unit,
    /// `sigma(i, j) = exp(-|x_i - x_j|^2 / (s_i s_j))`, `s_i` the distance from
    /// `x_i` to its 5th nearest neighbour.
    #[default]
    Gaussian5th,
}

/// Kernel weights `Phi(|x_i - x_j| / h)` on all pairs inside the kernel support.
pub fn base_weights<T: Scalar>(cloud: &PointCloud<T>, kernel: &Kernel<T>) -> SparseWeights<T> {
    let radius = kernel.support_radius();
    let index = SpatialIndex::build(cloud, radius);
    let rows: Vec<Vec<(u32, T)>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            index.for_each_within(cloud.point(i), Some(i), radius, true, |j, dist| {
                let w = kernel.weight(dist);
                if w > T::zero() {
                    row.push((j as u32, w));
                }
            });
            row.sort_unstable_by_key(|e| e.0);
            row
        })
        .collect();
    // Distances are computed symmetrically, so the pattern and values are too.
    SparseWeights::from_sorted_rows_unchecked(rows)
}

/// Kernel density estimate at every vertex.
///
/// Sums kernel values on the fly without storing the graph.
pub fn degrees<T: Scalar>(cloud: &PointCloud<T>, kernel: &Kernel<T>, n_unlabeled: usize) -> Result<Vec<T>> {
    if n_unlabeled == 0 {
        return Err(Error::param("degree normalisation needs at least one unlabeled point"));
    }
    let scale = T::one() / (T::of_usize(n_unlabeled) * kernel.bandwidth.powi(cloud.dim() as i32));
    let self_term = kernel.weight(T::zero());
    let radius = kernel.support_radius();
    let index = SpatialIndex::build(cloud, radius);
    Ok((0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let mut s = self_term;
            index.for_each_within(cloud.point(i), Some(i), radius, true, |_, dist| s += kernel.weight(dist));
            s * scale
        })
        .collect())
}

/// Degrees from precomputed base weights, adding the `Phi(0)` self term.
pub fn degrees_from_base<T: Scalar>(
    base: &SparseWeights<T>,
    kernel: &Kernel<T>,
    dim: usize,
    n_unlabeled: usize,
) -> Result<Vec<T>> {
    if n_unlabeled == 0 {
        return Err(Error::param("degree normalisation needs at least one unlabeled point"));
    }
    if !(kernel.bandwidth > T::zero()) {
        return Err(Error::param("bandwidth must be positive"));
    }
    let scale = T::one() / (T::of_usize(n_unlabeled) * kernel.bandwidth.powi(dim as i32));
    let self_term = kernel.weight(T::zero());
    Ok((0..base.n_vertices())
        .into_par_iter()
        .map(|i| {
            let (_, vals) = base.row(i);
            (self_term + vals.iter().copied().sum::<T>()) * scale
        })
        .collect())
}

/// `w(i, j) = d_i^alpha d_j^alpha sigma(i, j)`.
///
/// With `alpha = 0` the base weights are returned unchanged. Otherwise every
/// degree must be positive.
pub fn self_tuning_weights<T: Scalar>(base: &SparseWeights<T>, degrees: &[T], alpha: T) -> Result<WeightedGraph<T>> {
    if degrees.len() != base.n_vertices() {
        return Err(Error::param(format!("{} degrees supplied for {} vertices", degrees.len(), base.n_vertices())));
    }
    if alpha == T::zero() {
        return WeightedGraph::new(base.clone(), degrees.to_vec(), alpha);
    }
    if let Some(vertex) = degrees.iter().position(|&d| !(d > T::zero())) {
        return Err(Error::ZeroDegree { vertex, alpha: alpha.as_f64() });
    }
    let factor: Vec<T> = degrees.iter().map(|&d| d.powf(alpha)).collect();
    let weights = base.map_values(|i, j, s| s * pair_product(&factor, i, j));
    WeightedGraph::new(weights, degrees.to_vec(), alpha)
}

// Product of the two vertex factors in a fixed order so that (i, j) and (j, i)
// round identically.
#[inline]
fn pair_product<T: Scalar>(factor: &[T], i: usize, j: usize) -> T {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    factor[a] * factor[b]
}

/// Symmetrised k-NN graph with weights `D_k(x)^-alpha D_k(y)^-alpha sigma(x, y)`.
///
/// `D_k(x)` is the distance from `x` to its `k`-th nearest neighbour. Each
/// vertex gets directed edges to its `k` nearest neighbours, and the result is
/// `(W + W^T) / 2`. The stored degrees are the `D_k` values.
pub fn knn_self_tuning_weights<T: Scalar>(
    cloud: &PointCloud<T>,
    k: usize,
    alpha: T,
    rule: KnnWeightRule,
) -> Result<WeightedGraph<T>> {
    let n = cloud.len();
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let needed = match rule {
        KnnWeightRule::Unit => k,
        KnnWeightRule::Gaussian5th => k.max(5),
    };
    if needed >= n {
        return Err(Error::TooFewPoints { k: needed, n });
    }
    let index = SpatialIndex::for_knn(cloud, needed);
    let lists: Vec<Vec<(usize, T)>> = (0..n)
        .into_par_iter()
        .map(|i| index.k_nearest(i, needed).into_iter().map(|nb| (nb.index, nb.distance)).collect())
        .collect();
    let dk: Vec<T> = lists.iter().map(|l| l[k - 1].1).collect();
    if alpha != T::zero() {
        if let Some(vertex) = dk.iter().position(|&d| !(d > T::zero())) {
            return Err(Error::ZeroDegree { vertex, alpha: alpha.as_f64() });
        }
    }
    let scale: Vec<T> = match rule {
        KnnWeightRule::Unit => Vec::new(),
        KnnWeightRule::Gaussian5th => {
            let s: Vec<T> = lists.iter().map(|l| l[4].1).collect();
            if let Some(v) = s.iter().position(|&x| !(x > T::zero())) {
                return Err(Error::param(format!("vertex {v} has five or more duplicates, Gaussian scale is zero")));
            }
            s
        }
    };
    let factor: Vec<T> = dk.iter().map(|&d| if alpha == T::zero() { T::one() } else { d.powf(-alpha) }).collect();

    let directed = |i: usize, j: usize, dist: T| -> T {
        let sigma = match rule {
            KnnWeightRule::Unit => T::one(),
            KnnWeightRule::Gaussian5th => (-(dist * dist) / (scale[i] * scale[j])).exp(),
        };
        sigma * pair_product(&factor, i, j)
    };

    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    for (i, list) in lists.iter().enumerate() {
        for &(j, dist) in &list[..k] {
            let w = directed(i, j, dist);
            rows[i].push((j, w));
            rows[j].push((i, w));
        }
    }
    let half = T::of(0.5);
    let rows: Vec<Vec<(u32, T)>> = rows
        .into_par_iter()
        .map(|mut row| {
            row.sort_by_key(|e| e.0);
            // A pair listed from both sides collapses to (w + w) / 2 = w, a
            // one-sided pair to w / 2.
            let mut merged: Vec<(u32, T)> = Vec::with_capacity(row.len());
            let mut last: Option<usize> = None;
            for (j, w) in row {
                if last == Some(j) {
                    let e = merged.last_mut().expect("previous entry");
                    e.1 += w * half;
                } else {
                    merged.push((j as u32, w * half));
                    last = Some(j);
                }
            }
            merged.retain(|e| e.1 > T::zero());
            merged
        })
        .collect();
    WeightedGraph::new(SparseWeights::from_sorted_rows_unchecked(rows), dk, alpha)
}

/// Divides every weight by `M` so that the largest weight is exactly one.
pub fn normalize_max_weight<T: Scalar>(graph: &WeightedGraph<T>) -> Result<WeightedGraph<T>> {
    let m = graph.max_weight();
    if graph.n_edges() == 0 || !(m > T::zero()) {
        return Err(Error::EmptyGraph);
    }
    let weights = if m == T::one() {
        graph.weights.clone()
    } else {
        graph.weights.map_values(|_, _, w| if w == m { T::one() } else { w / m })
    };
    let mut g = WeightedGraph::new(weights, graph.degrees.clone(), graph.alpha)?;
    g.set_normalized(true);
    Ok(g)
}

/// Kernel graph with self-tuning weights: base weights, KDE degrees, reweighting.
pub fn build_graph<T: Scalar>(
    cloud: &PointCloud<T>,
    kernel: &Kernel<T>,
    alpha: T,
    n_unlabeled: usize,
) -> Result<WeightedGraph<T>> {
    let base = base_weights(cloud, kernel);
    let deg = degrees_from_base(&base, kernel, cloud.dim(), n_unlabeled)?;
    self_tuning_weights(&base, &deg, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample, Metric, SamplerKind, SamplerSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud1d(xs: &[f64]) -> PointCloud<f64> {
        PointCloud::new(xs.iter().map(|&x| vec![x]).collect(), 1, Metric::Euclidean).unwrap()
    }

    fn uniform(n: usize, d: usize, seed: u64, metric: Metric) -> PointCloud<f64> {
        let spec = SamplerSpec::new(SamplerKind::UniformBox { lower: vec![0.0], upper: vec![1.0] }, seed);
        sample::<f64>(&spec, n, d).unwrap().with_metric(metric).unwrap()
    }

    #[test]
    fn base_weight_support() {
        let c = cloud1d(&[0.0, 0.15, 0.05]);
        let ind = Kernel::indicator(0.1).unwrap();
        let w = base_weights(&c, &ind);
        assert_eq!(w.get(0, 1), None);
        assert_eq!(w.get(0, 2), Some(1.0));
        let c = cloud1d(&[0.0, 0.21, 0.05]);
        let bump = Kernel::smooth_bump(0.1).unwrap();
        let w = base_weights(&c, &bump);
        assert_eq!(w.get(0, 1), None);
        assert!(w.get(0, 2).unwrap() >= 1.0);
        // boundary: exactly h is inside the indicator support
        let c = cloud1d(&[0.0, 0.25]);
        let w = base_weights(&c, &Kernel::indicator(0.25).unwrap());
        assert_eq!(w.get(0, 1), Some(1.0));
    }

    #[test]
    fn base_weights_match_brute_force() {
        let c = uniform(600, 2, 3, Metric::Torus);
        for profile in [Profile::SmoothBump, Profile::Indicator, Profile::Gaussian] {
            let k = Kernel::new(profile, 0.07).unwrap();
            let w = base_weights(&c, &k);
            assert!(w.is_symmetric());
            let mut count = 0;
            for i in 0..c.len() {
                for j in 0..c.len() {
                    if i == j {
                        continue;
                    }
                    let s = k.weight(c.distance(i, j).unwrap());
                    if s > 0.0 {
                        count += 1;
                        assert_eq!(w.get(i, j), Some(s));
                    } else {
                        assert_eq!(w.get(i, j), None);
                    }
                }
            }
            assert_eq!(count, w.nnz());
        }
    }

    #[test]
    fn isolated_points_have_only_self_term() {
        let c = cloud1d(&[0.0, 0.5, 1.0]);
        let k = Kernel::indicator(0.1).unwrap();
        let d = degrees(&c, &k, 3).unwrap();
        for v in d {
            assert!((v - 1.0 / (3.0 * 0.1)).abs() < 1e-12);
        }
    }

    #[test]
    fn degrees_match_direct_sum() {
        let pts = vec![vec![0.0, 0.0], vec![0.05, 0.0], vec![0.0, 0.08], vec![0.3, 0.3], vec![0.31, 0.29]];
        let c = PointCloud::new(pts, 2, Metric::Euclidean).unwrap();
        let k = Kernel::smooth_bump(0.06).unwrap();
        let n_unl = 4;
        let d = degrees(&c, &k, n_unl).unwrap();
        for i in 0..5 {
            let mut s = 0.0;
            for j in 0..5 {
                s += k.weight(c.distance(i, j).unwrap());
            }
            let expect = s / (n_unl as f64 * 0.06f64.powi(2));
            assert!((d[i] - expect).abs() <= 1e-12 * expect, "{i}: {} vs {expect}", d[i]);
        }
        assert!(degrees(&c, &k, 0).is_err());
    }

    #[test]
    fn degrees_brute_force_n500() {
        let c = uniform(500, 2, 8, Metric::Torus);
        let k = Kernel::smooth_bump(0.1).unwrap();
        let d = degrees(&c, &k, 500).unwrap();
        for i in 0..500 {
            let s: f64 = (0..500).map(|j| k.weight(c.distance(i, j).unwrap())).sum();
            let expect = s / (500.0 * 0.01);
            assert!((d[i] - expect).abs() <= 1e-12 * expect);
        }
    }

    #[test]
    fn indicator_degrees_approach_ball_volume() {
        // The mean tracks pi closely. The supremum over 20000 vertices is a
        // much noisier quantity (about five standard deviations of a
        // binomial count with mean n h^2 pi).
        let c = uniform(20_000, 2, 1, Metric::Torus);
        let k = Kernel::indicator(0.1).unwrap();
        let d = degrees(&c, &k, 20_000).unwrap();
        let pi = std::f64::consts::PI;
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        assert!((mean - pi).abs() / pi < 0.01, "mean {mean}");
        let sup = d.iter().map(|v| (v - pi).abs() / pi).fold(0.0, f64::max);
        assert!(sup < 0.25, "sup {sup}");
    }

    #[test]
    fn alpha_zero_is_bitwise_base() {
        let c = uniform(300, 2, 4, Metric::Torus);
        let k = Kernel::smooth_bump(0.1).unwrap();
        let base = base_weights(&c, &k);
        let d = degrees_from_base(&base, &k, 2, 300).unwrap();
        let g = self_tuning_weights(&base, &d, 0.0).unwrap();
        assert_eq!(g.weights(), &base);
        let perturbed: Vec<f64> = d.iter().map(|v| v * 1.7 + 0.3).collect();
        let g2 = self_tuning_weights(&base, &perturbed, 0.0).unwrap();
        assert_eq!(g2.weights(), g.weights());
    }

    #[test]
    fn constant_degrees_scale_uniformly() {
        let base = SparseWeights::from_edges(3, vec![(0, 1, 0.5f64), (1, 2, 2.0)]).unwrap();
        let g = self_tuning_weights(&base, &[3.0; 3], 1.5).unwrap();
        let c = 3.0f64.powf(3.0);
        assert!((g.weight(0, 1) - c * 0.5).abs() < 1e-12);
        assert!((g.weight(2, 1) - c * 2.0).abs() < 1e-12);
        assert!((g.max_weight() - c * 2.0).abs() < 1e-12);
    }

    #[test]
    fn self_tuning_matches_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut edges = Vec::new();
        for i in 0..10 {
            for j in i + 1..10 {
                if rng.gen_bool(0.4) {
                    edges.push((i, j, rng.gen_range(0.1..2.0)));
                }
            }
        }
        let base = SparseWeights::from_edges(10, edges.clone()).unwrap();
        let d: Vec<f64> = (0..10).map(|_| rng.gen_range(0.5..3.0)).collect();
        let alpha = -0.7;
        let g = self_tuning_weights(&base, &d, alpha).unwrap();
        assert!(g.weights().is_symmetric());
        for (i, j, s) in edges {
            let expect = d[i].powf(alpha) * d[j].powf(alpha) * s;
            assert!((g.weight(i, j) - expect).abs() <= 1e-14 * expect);
        }
    }

    #[test]
    fn zero_degree_is_named() {
        let base = SparseWeights::from_edges(3, vec![(0, 1, 1.0f64)]).unwrap();
        match self_tuning_weights(&base, &[1.0, 1.0, 0.0], 1.0) {
            Err(Error::ZeroDegree { vertex, .. }) => assert_eq!(vertex, 2),
            other => panic!("{other:?}"),
        }
        assert!(self_tuning_weights(&base, &[1.0, 1.0, 0.0], 0.0).is_ok());
    }

    #[test]
    fn knn_unit_alpha_zero_half_or_one() {
        let c = uniform(200, 2, 5, Metric::Euclidean);
        let g = knn_self_tuning_weights(&c, 4, 0.0, KnnWeightRule::Unit).unwrap();
        assert!(g.weights().is_symmetric());
        let mut saw_half = false;
        for i in 0..c.len() {
            let nn = c.k_nearest(i, 4).unwrap();
            for nb in &nn {
                assert!(g.weight(i, nb.index) > 0.0);
            }
            for (j, w) in g.neighbors(i) {
                let fwd = nn.iter().any(|nb| nb.index == j);
                let back = c.k_nearest(j, 4).unwrap().iter().any(|nb| nb.index == i);
                let expect = 0.5 * (fwd as u8 + back as u8) as f64;
                assert_eq!(w, expect);
                saw_half |= w == 0.5;
            }
        }
        assert!(saw_half);
    }

    #[test]
    fn knn_constant_factor_on_grid() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.02).collect();
        let c = cloud1d(&xs).with_metric(Metric::Euclidean).unwrap();
        // interior points of a regular grid share the same k-th neighbour distance
        let g = knn_self_tuning_weights(&c, 2, 1.0, KnnWeightRule::Unit).unwrap();
        let dk = g.degrees();
        for i in 2..48 {
            assert!((dk[i] - 0.02).abs() < 1e-12);
        }
    }

    #[test]
    fn knn_gaussian_matches_brute_force() {
        let c = uniform(50, 2, 12, Metric::Euclidean);
        let (k, alpha) = (5usize, 1.0f64);
        let g = knn_self_tuning_weights(&c, k, alpha, KnnWeightRule::Gaussian5th).unwrap();
        let n = c.len();
        let sorted = |i: usize| {
            let mut v: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (c.distance(i, j).unwrap(), j)).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let lists: Vec<_> = (0..n).map(sorted).collect();
        let dk: Vec<f64> = lists.iter().map(|l| l[k - 1].0).collect();
        let s5: Vec<f64> = lists.iter().map(|l| l[4].0).collect();
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for &(dist, j) in &lists[i][..k] {
                let w = dk[i].powf(-alpha) * dk[j].powf(-alpha) * (-dist * dist / (s5[i] * s5[j])).exp();
                dense[i][j] += 0.5 * w;
                dense[j][i] += 0.5 * w;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let got = g.weight(i, j);
                assert!((got - dense[i][j]).abs() <= 1e-12 * dense[i][j].max(1.0), "({i},{j})");
            }
        }
    }

    #[test]
    fn knn_duplicates_rejected() {
        let c = cloud1d(&[0.0, 0.0, 0.0, 0.5, 0.7, 0.9, 1.0]);
        assert!(matches!(knn_self_tuning_weights(&c, 2, 1.0, KnnWeightRule::Unit), Err(Error::ZeroDegree { .. })));
        assert!(knn_self_tuning_weights(&c, 2, 0.0, KnnWeightRule::Unit).is_ok());
        assert!(matches!(knn_self_tuning_weights(&c, 7, 0.0, KnnWeightRule::Unit), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn normalization() {
        let g = WeightedGraph::from_weights(SparseWeights::from_edges(3, vec![(0, 1, 4.0f64), (1, 2, 4.0)]).unwrap());
        let n = normalize_max_weight(&g).unwrap();
        assert!(n.weights().values().iter().all(|&w| w == 1.0));
        assert!(n.is_normalized());
        let again = normalize_max_weight(&n).unwrap();
        assert_eq!(again.weights(), n.weights());

        let c = uniform(400, 2, 6, Metric::Torus);
        let g = build_graph(&c, &Kernel::smooth_bump(0.08).unwrap(), 1.0, 400).unwrap();
        let n = normalize_max_weight(&g).unwrap();
        assert_eq!(n.max_weight(), 1.0);
        assert_eq!(n.weights().values().iter().copied().fold(0.0, f64::max), 1.0);

        let empty = WeightedGraph::from_weights(SparseWeights::<f64>::empty(3));
        assert!(matches!(normalize_max_weight(&empty), Err(Error::EmptyGraph)));
    }
}
