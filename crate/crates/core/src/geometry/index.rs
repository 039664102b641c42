//! Uniform cell grid for fixed-radius and k-nearest-neighbour queries.
//!
//! Points are bucketed into axis-aligned cells. A query at Chebyshev cell
//! radius `R` scans every cell whose offset from the query cell is at most `R`
//! per axis; that block contains every point within distance `R * side` of the
//! query. On the torus the offsets wrap, in Euclidean space the grid spans the
//! bounding box and offsets are clipped.
//!
//! Above [`MAX_GRID_DIM`] dimensions the `3^d` neighbour block is larger than a
//! brute-force scan, so the index degrades to scanning all points.

use serde::Serialize;

use super::{Metric, PointCloud};
use crate::scalar::{cmp, Scalar};

/// Highest dimension for which a cell grid is used.
pub const MAX_GRID_DIM: usize = 6;

const MAX_CELLS: usize = 1 << 22;

/// A neighbouring vertex and its distance to the query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Neighbor<T> {
    pub index: usize,
    pub distance: T,
}

pub struct SpatialIndex<'a, T> {
    cloud: &'a PointCloud<T>,
    grid: Option<Grid<T>>,
}

struct Grid<T> {
    origin: Vec<T>,
    side: Vec<T>,
    counts: Vec<usize>,
    strides: Vec<usize>,
    cell_start: Vec<usize>,
    cell_points: Vec<u32>,
}

impl<'a, T: Scalar> SpatialIndex<'a, T> {
    /// Index whose cells have side at least `cell_size` (tuned for radius queries of that size).
    pub fn build(cloud: &'a PointCloud<T>, cell_size: T) -> Self {
        let n = cloud.len();
        let grid = if cloud.dim() > MAX_GRID_DIM || n < 16 || !(cell_size > T::zero()) {
            None
        } else {
            Some(Grid::new(cloud, cell_size))
        };
        SpatialIndex { cloud, grid }
    }

    /// Index with cells sized so that a cell holds about `k` points on average.
    pub fn for_knn(cloud: &'a PointCloud<T>, k: usize) -> Self {
        let d = cloud.dim();
        let n = cloud.len().max(1);
        let volume = bounding_volume(cloud);
        let per_cell = (k.max(1) as f64) / n as f64;
        let side = (volume * per_cell).powf(1.0 / d as f64);
        Self::build(cloud, T::of(side.max(1e-12)))
    }

    pub fn cloud(&self) -> &PointCloud<T> {
        self.cloud
    }

    /// Points `j != i` with `distance(i, j) < radius`, sorted by index.
    pub fn within(&self, i: usize, radius: T) -> Vec<Neighbor<T>> {
        let mut out = Vec::new();
        self.for_each_within(self.cloud.point(i), Some(i), radius, false, |index, distance| {
            out.push(Neighbor { index, distance })
        });
        out.sort_by_key(|n| n.index);
        out
    }

    /// Points within `radius` of an arbitrary location (`<=` when `inclusive`).
    pub fn within_point(&self, p: &[T], radius: T, inclusive: bool) -> Vec<Neighbor<T>> {
        let mut out = Vec::new();
        self.for_each_within(p, None, radius, inclusive, |index, distance| out.push(Neighbor { index, distance }));
        out.sort_by_key(|n| n.index);
        out
    }

    /// Calls `f(j, dist)` for every point within `radius` of `p`, skipping `exclude`.
    pub fn for_each_within<F: FnMut(usize, T)>(
        &self,
        p: &[T],
        exclude: Option<usize>,
        radius: T,
        inclusive: bool,
        mut f: F,
    ) {
        let metric = self.cloud.metric();
        let mut visit = |j: usize| {
            if Some(j) == exclude {
                return;
            }
            let d = metric.dist(p, self.cloud.point(j));
            if d < radius || (inclusive && d == radius) {
                f(j, d);
            }
        };
        match &self.grid {
            None => (0..self.cloud.len()).for_each(&mut visit),
            Some(g) => {
                let reach: Vec<usize> =
                    g.side.iter().map(|&s| (radius / s).ceil().to_usize().unwrap_or(usize::MAX).max(1)).collect();
                g.for_each_in_block(p, metric, &reach, |j| visit(j as usize));
            }
        }
    }

    /// `k` nearest points to vertex `i` (excluding it), by distance then index.
    pub fn k_nearest(&self, i: usize, k: usize) -> Vec<Neighbor<T>> {
        self.k_nearest_point(self.cloud.point(i), Some(i), k)
    }

    /// `k` nearest points to an arbitrary location.
    pub fn k_nearest_point(&self, p: &[T], exclude: Option<usize>, k: usize) -> Vec<Neighbor<T>> {
        let metric = self.cloud.metric();
        let n = self.cloud.len();
        let available = n - usize::from(exclude.is_some_and(|e| e < n));
        let k = k.min(available);
        if k == 0 {
            return Vec::new();
        }
        let mut cand: Vec<Neighbor<T>> = Vec::new();
        let finish = |mut cand: Vec<Neighbor<T>>| {
            cand.sort_by(|a, b| cmp(&a.distance, &b.distance).then(a.index.cmp(&b.index)));
            cand.truncate(k);
            cand
        };
        let Some(g) = &self.grid else {
            for j in 0..n {
                if Some(j) != exclude {
                    cand.push(Neighbor { index: j, distance: metric.dist(p, self.cloud.point(j)) });
                }
            }
            return finish(cand);
        };
        let max_reach = g.counts.iter().copied().max().unwrap_or(1);
        let min_side = g.side.iter().copied().fold(T::infinity(), T::min);
        let mut r = 1usize;
        loop {
            cand.clear();
            let reach = vec![r; g.counts.len()];
            g.for_each_in_block(p, metric, &reach, |j| {
                let j = j as usize;
                if Some(j) != exclude {
                    cand.push(Neighbor { index: j, distance: metric.dist(p, self.cloud.point(j)) });
                }
            });
            let covers_all = r >= max_reach;
            if cand.len() >= k {
                let kth = {
                    let mut d: Vec<T> = cand.iter().map(|c| c.distance).collect();
                    let (_, kth, _) = d.select_nth_unstable_by(k - 1, cmp);
                    *kth
                };
                if covers_all || kth <= T::of_usize(r) * min_side {
                    return finish(cand);
                }
            } else if covers_all {
                return finish(cand);
            }
            r = (r * 2).min(max_reach);
        }
    }
}

fn bounding_volume<T: Scalar>(cloud: &PointCloud<T>) -> f64 {
    match cloud.metric() {
        Metric::Torus => 1.0,
        Metric::Euclidean => {
            let (lo, hi) = bounds(cloud);
            lo.iter().zip(&hi).map(|(a, b)| (b.as_f64() - a.as_f64()).max(1e-9)).product()
        }
    }
}

fn bounds<T: Scalar>(cloud: &PointCloud<T>) -> (Vec<T>, Vec<T>) {
    let d = cloud.dim();
    let mut lo = vec![T::infinity(); d];
    let mut hi = vec![T::neg_infinity(); d];
    for p in cloud.points() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

impl<T: Scalar> Grid<T> {
    fn new(cloud: &PointCloud<T>, cell_size: T) -> Self {
        let d = cloud.dim();
        let n = cloud.len();
        let metric = cloud.metric();
        let (origin, extent) = match metric {
            Metric::Torus => (vec![T::zero(); d], vec![T::one(); d]),
            Metric::Euclidean => {
                let (lo, hi) = bounds(cloud);
                let ext = lo.iter().zip(&hi).map(|(&a, &b)| b - a).collect();
                (lo, ext)
            }
        };
        let cap = MAX_CELLS.min(8 * n.max(1));
        let mut s = cell_size;
        let (counts, side) = loop {
            let mut counts = Vec::with_capacity(d);
            let mut side = Vec::with_capacity(d);
            for &e in &extent {
                match metric {
                    Metric::Torus => {
                        let c = (T::one() / s).floor().to_usize().unwrap_or(1).max(1);
                        counts.push(c);
                        side.push(T::one() / T::of_usize(c));
                    }
                    Metric::Euclidean => {
                        let c = (e / s).floor().to_usize().unwrap_or(0) + 1;
                        counts.push(c);
                        side.push(s);
                    }
                }
            }
            let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
            match total {
                Some(t) if t <= cap => break (counts, side),
                _ => s = s + s,
            }
        };
        let mut strides = vec![1usize; d];
        for k in 1..d {
            strides[k] = strides[k - 1] * counts[k - 1];
        }
        let total: usize = counts.iter().product();
        let mut grid = Grid { origin, side, counts, strides, cell_start: vec![0; total + 1], cell_points: vec![0; n] };
        let ids: Vec<usize> = cloud.points().map(|p| grid.cell_id(p)).collect();
        for &c in &ids {
            grid.cell_start[c + 1] += 1;
        }
        for c in 0..total {
            grid.cell_start[c + 1] += grid.cell_start[c];
        }
        let mut fill = grid.cell_start.clone();
        for (j, &c) in ids.iter().enumerate() {
            grid.cell_points[fill[c]] = j as u32;
            fill[c] += 1;
        }
        grid
    }

    #[inline]
    fn axis_cell(&self, k: usize, x: T) -> isize {
        let c = ((x - self.origin[k]) / self.side[k]).floor().to_isize().unwrap_or(0);
        c.clamp(0, self.counts[k] as isize - 1)
    }

    fn cell_id(&self, p: &[T]) -> usize {
        (0..p.len()).map(|k| self.axis_cell(k, p[k]) as usize * self.strides[k]).sum()
    }

    /// Visits points in all cells within `reach[k]` cells of `p` along each axis.
    fn for_each_in_block<F: FnMut(u32)>(&self, p: &[T], metric: Metric, reach: &[usize], mut f: F) {
        let d = p.len();
        let mut axes: Vec<Vec<usize>> = Vec::with_capacity(d);
        for k in 0..d {
            let c = self.counts[k] as isize;
            let q = self.axis_cell(k, p[k]);
            let r = reach[k].min(self.counts[k]) as isize;
            let cells: Vec<usize> = match metric {
                Metric::Torus if 2 * r + 1 >= c => (0..c as usize).collect(),
                Metric::Torus => (q - r..=q + r).map(|o| o.rem_euclid(c) as usize).collect(),
                Metric::Euclidean => ((q - r).max(0)..=(q + r).min(c - 1)).map(|o| o as usize).collect(),
            };
            axes.push(cells);
        }
        let mut pos = vec![0usize; d];
        loop {
            let id: usize = (0..d).map(|k| axes[k][pos[k]] * self.strides[k]).sum();
            for &j in &self.cell_points[self.cell_start[id]..self.cell_start[id + 1]] {
                f(j);
            }
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                pos[k] += 1;
                if pos[k] < axes[k].len() {
                    break;
                }
                pos[k] = 0;
                k += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(n: usize, d: usize, metric: Metric, seed: u64) -> PointCloud<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n * d).map(|_| rng.gen::<f64>()).collect();
        PointCloud::from_flat(coords, d, metric).unwrap()
    }

    fn brute_within(c: &PointCloud<f64>, i: usize, r: f64) -> Vec<usize> {
        (0..c.len()).filter(|&j| j != i && c.distance(i, j).unwrap() < r).collect()
    }

    fn brute_knn(c: &PointCloud<f64>, i: usize, k: usize) -> Vec<(usize, f64)> {
        let mut all: Vec<(usize, f64)> =
            (0..c.len()).filter(|&j| j != i).map(|j| (j, c.distance(i, j).unwrap())).collect();
        all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }

    #[test]
    fn within_matches_brute_force() {
        for (metric, d) in [(Metric::Torus, 2), (Metric::Euclidean, 2), (Metric::Torus, 3), (Metric::Euclidean, 1)] {
            let c = random_cloud(2000, d, metric, 11 + d as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..50 {
                let i = rng.gen_range(0..c.len());
                let r = rng.gen_range(0.01..0.2);
                let got: Vec<usize> = c.neighbors_within(i, r).unwrap().iter().map(|n| n.index).collect();
                assert_eq!(got, brute_within(&c, i, r), "{metric:?} d={d} i={i} r={r}");
            }
        }
    }

    #[test]
    fn knn_matches_brute_force() {
        for (metric, d) in [(Metric::Torus, 2), (Metric::Euclidean, 2), (Metric::Euclidean, 3), (Metric::Torus, 1)] {
            let c = random_cloud(1000, d, metric, 3 + d as u64);
            let index = SpatialIndex::for_knn(&c, 10);
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..50 {
                let i = rng.gen_range(0..c.len());
                let k = rng.gen_range(1..40);
                let got: Vec<(usize, f64)> = index.k_nearest(i, k).iter().map(|n| (n.index, n.distance)).collect();
                assert_eq!(got, brute_knn(&c, i, k), "{metric:?} d={d} i={i} k={k}");
            }
        }
    }

    #[test]
    fn knn_ties_broken_by_lower_index() {
        let pts: Vec<Vec<f64>> = vec![vec![0.5], vec![0.25], vec![0.75], vec![0.0]];
        let c = PointCloud::new(pts, 1, Metric::Torus).unwrap();
        let got: Vec<usize> = c.k_nearest(0, 2).unwrap().iter().map(|n| n.index).collect();
        assert_eq!(got, vec![1, 2]);
    }

    #[test]
    fn clustered_euclidean_knn_grows_search() {
        // Dense cluster plus far outliers forces the ring search to expand.
        let mut pts: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64 * 1e-4, 0.0]).collect();
        pts.push(vec![10.0, 10.0]);
        pts.push(vec![-10.0, 5.0]);
        let c = PointCloud::new(pts, 2, Metric::Euclidean).unwrap();
        let got: Vec<usize> = c.k_nearest(200, 3).unwrap().iter().map(|n| n.index).collect();
        let want: Vec<usize> = brute_knn(&c, 200, 3).iter().map(|x| x.0).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn high_dimension_falls_back_to_scan() {
        let c = random_cloud(300, 10, Metric::Euclidean, 1);
        let got: Vec<usize> = c.neighbors_within(7, 1.0).unwrap().iter().map(|n| n.index).collect();
        assert_eq!(got, brute_within(&c, 7, 1.0));
        let got: Vec<(usize, f64)> = c.k_nearest(7, 5).unwrap().iter().map(|n| (n.index, n.distance)).collect();
        assert_eq!(got, brute_knn(&c, 7, 5));
    }
}
