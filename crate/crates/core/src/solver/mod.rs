//! Graph infinity-Laplacian and the monotone fixed-point solver for the
//! labeled Dirichlet problem `L u = 0` off the labels, `u = g` on them.
//!
//! `L u(x) = max_y w(x,y)(u(y) - u(x)) + min_y w(x,y)(u(y) - u(x))`, where the
//! extrema run over all vertices. Non-neighbours contribute `w = 0`, so a zero
//! candidate always takes part in both extrema.
//!
//! The iteration `u <- u + L u / (2M)` is monotone: with `w <= M` the new
//! value at `x` is nondecreasing in every old value, which gives the discrete
//! maximum principle at every iterate.

mod export;

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use export::{diagnostics_json, write_solution_csv};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;

/// Graph plus boundary data `g` on a nonempty set of labeled vertices.
#[derive(Debug, Clone)]
pub struct LabelProblem<'a, T> {
    graph: &'a WeightedGraph<T>,
    labeled: Vec<(usize, T)>,
    pinned: Vec<Option<T>>,
}

impl<'a, T: Scalar> LabelProblem<'a, T> {
    /// Validates that label indices are distinct and in range, values finite,
    /// and at least one label is present.
    pub fn new(graph: &'a WeightedGraph<T>, labeled: Vec<(usize, T)>) -> Result<Self> {
        let n = graph.n_vertices();
        if labeled.is_empty() {
            return Err(Error::Labels("at least one labeled vertex is required".into()));
        }
        let mut pinned = vec![None; n];
        for &(i, g) in &labeled {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if !g.is_finite() {
                return Err(Error::Labels(format!("label at vertex {i} is not finite")));
            }
            if pinned[i].replace(g).is_some() {
                return Err(Error::Labels(format!("vertex {i} labeled twice")));
            }
        }
        Ok(LabelProblem { graph, labeled, pinned })
    }

    pub fn graph(&self) -> &'a WeightedGraph<T> {
        self.graph
    }

    pub fn labeled(&self) -> &[(usize, T)] {
        &self.labeled
    }

    pub fn label(&self, i: usize) -> Option<T> {
        self.pinned[i]
    }

    pub fn n_unlabeled(&self) -> usize {
        self.graph.n_vertices() - self.labeled.len()
    }

    /// `(min g, max g)`.
    pub fn label_range(&self) -> (T, T) {
        self.labeled.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &(_, g)| (lo.min(g), hi.max(g)))
    }

    /// Same graph and labeled set with values replaced by `f(g)`.
    pub fn map_labels<F: Fn(T) -> T>(&self, f: F) -> Result<Self> {
        Self::new(self.graph, self.labeled.iter().map(|&(i, g)| (i, f(g))).collect())
    }

    /// Hop distance from each vertex to the labeled set, `None` if unreachable.
    fn hops(&self) -> Vec<Option<(usize, usize)>> {
        let n = self.graph.n_vertices();
        let mut seen: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut queue = VecDeque::new();
        for (k, &(i, _)) in self.labeled.iter().enumerate() {
            seen[i] = Some((0, k));
            queue.push_back(i);
        }
        while let Some(x) = queue.pop_front() {
            let (d, src) = seen[x].expect("queued vertices are reached");
            for (y, _) in self.graph.neighbors(x) {
                if seen[y].is_none() {
                    seen[y] = Some((d + 1, src));
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Fails with the first vertex that cannot reach any label.
    pub fn check_connected(&self) -> Result<()> {
        match self.hops().iter().position(Option::is_none) {
            Some(vertex) => Err(Error::Disconnected { vertex }),
            None => Ok(()),
        }
    }
}

/// Starting values for unlabeled vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Mean of the label values.
    #[default]
    LabelMean,
    /// Zero, clamped into `[min g, max g]`.
    Zero,
    /// Value of the label fewest hops away (ties to the earlier label).
    NearestLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub init: Init,
    /// Starting values overriding `init` on unlabeled vertices (clamped into
    /// the label range). Any start converges to the same unique solution.
    #[serde(skip)]
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-5, max_iter: 1_000_000, init: Init::LabelMean, warm_start: None }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_warm_start(mut self, u0: Vec<f64>) -> Self {
        self.warm_start = Some(u0);
        self
    }
}

/// Summary statistics attached to a solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics<T> {
    /// `max w(x,y) |u(x) - u(y)|` over edges.
    pub max_gradient: T,
    pub min_u: T,
    pub max_u: T,
    /// Vertices without neighbours (their Laplacian is identically zero).
    pub isolated: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution<T> {
    pub u: Vec<T>,
    pub iterations: usize,
    /// `max |L u| / M` over unlabeled vertices at the returned `u`.
    pub final_residual: T,
    #[serde(serialize_with = "export::duration_secs")]
    pub elapsed: Duration,
    pub converged: bool,
    pub diagnostics: Diagnostics<T>,
}

/// `L u(x)` with the zero candidate included.
pub fn inf_laplacian<T: Scalar>(graph: &WeightedGraph<T>, u: &[T], x: usize) -> Result<T> {
    check_vertex(graph, u, x)?;
    let (cols, vals) = graph.weights().row(x);
    Ok(laplacian_at(cols, vals, u, x))
}

/// `L u(x)` with the extrema taken over neighbours only; `None` when isolated.
pub fn inf_laplacian_neighbors<T: Scalar>(graph: &WeightedGraph<T>, u: &[T], x: usize) -> Result<Option<T>> {
    check_vertex(graph, u, x)?;
    let ux = u[x];
    let mut it = graph.neighbors(x).map(|(y, w)| w * (u[y] - ux));
    let Some(first) = it.next() else { return Ok(None) };
    let (lo, hi) = it.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d)));
    Ok(Some(lo + hi))
}

fn check_vertex<T: Scalar>(graph: &WeightedGraph<T>, u: &[T], x: usize) -> Result<()> {
    let n = graph.n_vertices();
    if u.len() != n {
        return Err(Error::param(format!("u has {} entries for {n} vertices", u.len())));
    }
    if x >= n {
        return Err(Error::IndexOutOfRange { index: x, len: n });
    }
    Ok(())
}

#[inline]
fn laplacian_at<T: Scalar>(cols: &[u32], vals: &[T], u: &[T], x: usize) -> T {
    let ux = u[x];
    // Four independent accumulators shorten the dependency chain.
    let mut hi = [T::zero(); 4];
    let mut lo = [T::zero(); 4];
    let mut c = cols.chunks_exact(4);
    let mut v = vals.chunks_exact(4);
    for (cc, vv) in (&mut c).zip(&mut v) {
        for k in 0..4 {
            let d = vv[k] * (u[cc[k] as usize] - ux);
            hi[k] = if d > hi[k] { d } else { hi[k] };
            lo[k] = if d < lo[k] { d } else { lo[k] };
        }
    }
    for (&j, &w) in c.remainder().iter().zip(v.remainder()) {
        let d = w * (u[j as usize] - ux);
        hi[0] = if d > hi[0] { d } else { hi[0] };
        lo[0] = if d < lo[0] { d } else { lo[0] };
    }
    let hi = hi[0].max(hi[1]).max(hi[2].max(hi[3]));
    let lo = lo[0].min(lo[1]).min(lo[2].min(lo[3]));
    hi + lo
}

// Equal weights: rounding is monotone, so w * (max u_y - u_x) is bitwise the
// largest of the rounded products and the neighbour extrema can be found first.
#[inline]
fn laplacian_uniform<T: Scalar>(cols: &[u32], w: T, u: &[T], x: usize) -> T {
    let ux = u[x];
    let mut hi = [ux; 4];
    let mut lo = [ux; 4];
    let mut c = cols.chunks_exact(4);
    for cc in &mut c {
        for k in 0..4 {
            let v = u[cc[k] as usize];
            hi[k] = if v > hi[k] { v } else { hi[k] };
            lo[k] = if v < lo[k] { v } else { lo[k] };
        }
    }
    for &j in c.remainder() {
        let v = u[j as usize];
        hi[0] = if v > hi[0] { v } else { hi[0] };
        lo[0] = if v < lo[0] { v } else { lo[0] };
    }
    let hi = hi[0].max(hi[1]).max(hi[2].max(hi[3]));
    let lo = lo[0].min(lo[1]).min(lo[2].min(lo[3]));
    w * (hi - ux) + w * (lo - ux)
}

/// Solves and fails with [`Error::NotConverged`] if `max_iter` is reached.
pub fn solve<T: Scalar>(problem: &LabelProblem<'_, T>, opts: &SolveOptions) -> Result<Solution<T>> {
    let sol = solve_capped(problem, opts)?;
    if sol.converged {
        Ok(sol)
    } else {
        Err(Error::NotConverged { iterations: sol.iterations, residual: sol.final_residual.as_f64() })
    }
}

/// Solves, returning the last iterate with `converged = false` if `max_iter`
/// is reached. Connectivity is checked before iterating.
pub fn solve_capped<T: Scalar>(problem: &LabelProblem<'_, T>, opts: &SolveOptions) -> Result<Solution<T>> {
    if !(opts.tol > 0.0) {
        return Err(Error::param(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let start = Instant::now();
    let graph = problem.graph;
    let n = graph.n_vertices();
    let hops = problem.hops();
    if let Some(vertex) = hops.iter().position(Option::is_none) {
        return Err(Error::Disconnected { vertex });
    }

    let (gmin, gmax) = problem.label_range();
    let mean = problem.labeled.iter().map(|&(_, g)| g).sum::<T>() / T::of_usize(problem.labeled.len());
    if let Some(w) = &opts.warm_start {
        if w.len() != n {
            return Err(Error::param(format!("warm start has {} values for {n} vertices", w.len())));
        }
    }
    let mut u: Vec<T> = (0..n)
        .map(|i| match problem.pinned[i] {
            Some(g) => g,
            None if opts.warm_start.is_some() => {
                let v = T::of(opts.warm_start.as_ref().expect("checked")[i]);
                if v.is_finite() {
                    v.max(gmin).min(gmax)
                } else {
                    mean.max(gmin).min(gmax)
                }
            }
            None => match opts.init {
                Init::LabelMean => mean.max(gmin).min(gmax),
                Init::Zero => T::zero().max(gmin).min(gmax),
                Init::NearestLabel => problem.labeled[hops[i].expect("connected").1].1,
            },
        })
        .collect();

    let m = graph.max_weight();
    let tol = T::of(opts.tol);
    let weights = graph.weights();
    let uniform = {
        let v = weights.values();
        v.first().filter(|&&w0| v.iter().all(|&w| w == w0)).copied()
    };
    let mut next = u.clone();
    let mut iterations = 0;
    let residual = loop {
        // With no edges every vertex is labeled (connectivity) and L u = 0.
        if m == T::zero() {
            break T::zero();
        }
        let step = T::one() / (T::of(2.0) * m);
        let pinned = &problem.pinned;
        let cur = &u;
        let worst = next
            .par_iter_mut()
            .enumerate()
            .with_min_len(1024)
            .map(|(x, slot)| {
                if let Some(g) = pinned[x] {
                    *slot = g;
                    return T::zero();
                }
                let (cols, vals) = weights.row(x);
                let l = match uniform {
                    Some(w) => laplacian_uniform(cols, w, cur, x),
                    None => laplacian_at(cols, vals, cur, x),
                };
                *slot = (cur[x] + l * step).max(gmin).min(gmax);
                l.abs()
            })
            .reduce(T::zero, T::max);
        let r = worst / m;
        if r < tol || iterations >= opts.max_iter {
            break r;
        }
        std::mem::swap(&mut u, &mut next);
        iterations += 1;
    };

    let (min_u, max_u) = u.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    debug_assert!(min_u >= gmin && max_u <= gmax);
    let diagnostics =
        Diagnostics { max_gradient: lipschitz_gradient(graph, &u), min_u, max_u, isolated: graph.isolated_vertices() };
    Ok(Solution {
        u,
        iterations,
        final_residual: residual,
        elapsed: start.elapsed(),
        converged: residual < tol,
        diagnostics,
    })
}

/// `max w(x,y) |u(x) - u(y)|` over stored edges.
pub fn lipschitz_gradient<T: Scalar>(graph: &WeightedGraph<T>, u: &[T]) -> T {
    (0..graph.n_vertices())
        .into_par_iter()
        .with_min_len(1024)
        .map(|x| graph.neighbors(x).map(|(y, w)| w * (u[x] - u[y]).abs()).fold(T::zero(), T::max))
        .reduce(T::zero, T::max)
}

/// Slack multiplier on `tol` used by [`verify_comparison`].
pub const COMPARISON_SLACK: f64 = 2.0;

/// Checks `u1 <= u2 + 2 tol` everywhere for two problems on the same graph
/// with the same labeled vertices and `g1 <= g2`.
pub fn verify_comparison<T: Scalar>(
    p1: &LabelProblem<'_, T>,
    p2: &LabelProblem<'_, T>,
    s1: &Solution<T>,
    s2: &Solution<T>,
    tol: f64,
) -> Result<bool> {
    if !std::ptr::eq(p1.graph, p2.graph) && p1.graph != p2.graph {
        return Err(Error::GraphMismatch);
    }
    let n = p1.graph.n_vertices();
    if s1.u.len() != n || s2.u.len() != n {
        return Err(Error::param("solution length does not match the graph"));
    }
    for i in 0..n {
        match (p1.pinned[i], p2.pinned[i]) {
            (None, None) => {}
            (Some(a), Some(b)) if a <= b => {}
            (Some(_), Some(_)) => return Err(Error::Labels(format!("g1 > g2 at vertex {i}"))),
            _ => return Err(Error::Labels(format!("vertex {i} is labeled in only one problem"))),
        }
    }
    let slack = T::of(COMPARISON_SLACK * tol);
    Ok(s1.u.iter().zip(&s2.u).all(|(&a, &b)| a <= b + slack))
}
