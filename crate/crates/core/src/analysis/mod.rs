//! Discrete-to-continuum checks: the graph operator against
//! `Delta_inf phi + 2 alpha grad(log f) . grad(phi)`, and degree (kernel
//! density) convergence.

mod density;
mod testfn;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use density::DensityModel;
pub use testfn::{SmoothTestFunction, TrigTerm};

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, SpatialIndex};
use crate::graph::{degrees, Kernel, Profile};
use crate::scalar::Scalar;
use testfn::{dot, matvec};

/// Gradients below this norm make the operator undefined.
pub const GRADIENT_FLOOR: f64 = 1e-12;

/// `Delta_inf phi(x) = grad(phi) . Hess(phi) grad(phi) / |grad(phi)|^2`.
pub fn infinity_laplacian(phi: &SmoothTestFunction, x: &[f64]) -> Result<f64> {
    let g = phi.gradient(x);
    let norm2 = dot(&g, &g);
    if norm2.sqrt() < GRADIENT_FLOOR {
        return Err(Error::VanishingGradient { norm: norm2.sqrt() });
    }
    Ok(dot(&g, &matvec(&phi.hessian(x), &g)) / norm2)
}

/// `Delta_inf phi(x) + 2 alpha grad(log f)(x) . grad(phi)(x)`.
pub fn continuum_operator(phi: &SmoothTestFunction, f: &DensityModel, alpha: f64, x: &[f64]) -> Result<f64> {
    let inf = infinity_laplacian(phi, x)?;
    Ok(inf + 2.0 * alpha * dot(&f.log_gradient(x), &phi.gradient(x)))
}

/// Where the self-tuning factors in the weights come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeSource {
    /// Kernel density estimate from the cloud, normalised by `n_unlabeled`.
    Kde { n_unlabeled: usize },
    /// The density model itself, `w = f(x)^alpha f(y)^alpha sigma`.
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyOptions {
    pub degrees: DegreeSource,
    /// Sign agreement is only judged when `|continuum| > margin`.
    pub margin: f64,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        ConsistencyOptions { degrees: DegreeSource::Density, margin: 0.5 }
    }
}

/// One evaluation of the graph operator against its continuum limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub h: f64,
    /// `L phi(x) / h^2`.
    pub discrete: f64,
    pub continuum: f64,
    /// `|discrete - continuum|`, only for the indicator kernel with `alpha = 0`
    /// where the scaling constant is exactly one.
    pub error: Option<f64>,
    /// Whether the signs agree, when `|continuum|` exceeds the margin.
    pub sign_agrees: Option<bool>,
}

impl ConsistencyReport {
    pub fn is_quantitative(&self) -> bool {
        self.error.is_some()
    }
}

/// Evaluates `L phi` at vertex `x_index` on the kernel graph of `cloud`, with
/// `phi` read in the chart around the vertex (minimal-image displacements on
/// the torus), and compares with [`continuum_operator`].
pub fn discrete_consistency_check<T: Scalar>(
    cloud: &PointCloud<T>,
    kernel: &Kernel<T>,
    alpha: f64,
    phi: &SmoothTestFunction,
    f: &DensityModel,
    x_index: usize,
    opts: &ConsistencyOptions,
) -> Result<ConsistencyReport> {
    let index = SpatialIndex::build(cloud, kernel.support_radius());
    consistency_at(&index, kernel, alpha, phi, f, x_index, opts)
}

/// [`discrete_consistency_check`] at many vertices, in parallel.
pub fn consistency_batch<T: Scalar>(
    cloud: &PointCloud<T>,
    kernel: &Kernel<T>,
    alpha: f64,
    phi: &SmoothTestFunction,
    f: &DensityModel,
    vertices: &[usize],
    opts: &ConsistencyOptions,
) -> Result<Vec<ConsistencyReport>> {
    let index = SpatialIndex::build(cloud, kernel.support_radius());
    vertices.par_iter().map(|&x| consistency_at(&index, kernel, alpha, phi, f, x, opts)).collect()
}

fn consistency_at<T: Scalar>(
    index: &SpatialIndex<'_, T>,
    kernel: &Kernel<T>,
    alpha: f64,
    phi: &SmoothTestFunction,
    f: &DensityModel,
    x: usize,
    opts: &ConsistencyOptions,
) -> Result<ConsistencyReport> {
    let cloud = index.cloud();
    cloud.check_index(x)?;
    f.validate()?;
    if phi.dim() != cloud.dim() {
        return Err(Error::param(format!("test function has dimension {}, cloud {}", phi.dim(), cloud.dim())));
    }
    let p = to_f64(cloud.point(x));
    let continuum = continuum_operator(phi, f, alpha, &p)?;
    let h = kernel.bandwidth.as_f64();
    let radius = kernel.support_radius();

    let kde = |i: usize, n_unlabeled: usize| -> f64 {
        let mut s = kernel.weight(T::zero());
        index.for_each_within(cloud.point(i), Some(i), radius, true, |_, d| s += kernel.weight(d));
        s.as_f64() / (n_unlabeled as f64 * h.powi(cloud.dim() as i32))
    };
    let factor = |i: usize| -> f64 {
        if alpha == 0.0 {
            return 1.0;
        }
        match opts.degrees {
            DegreeSource::Density => f.value(&to_f64(cloud.point(i))).powf(alpha),
            DegreeSource::Kde { n_unlabeled } => kde(i, n_unlabeled).powf(alpha),
        }
    };

    let phi_x = phi.value(&p);
    let fx = factor(x);
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    index.for_each_within(cloud.point(x), Some(x), radius, true, |j, d| {
        let sigma = kernel.weight(d).as_f64();
        if sigma <= 0.0 {
            return;
        }
        let y: Vec<f64> = p.iter().zip(cloud.displacement(x, j)).map(|(a, b)| a + b.as_f64()).collect();
        let v = fx * factor(j) * sigma * (phi.value(&y) - phi_x);
        hi = hi.max(v);
        lo = lo.min(v);
    });
    let discrete = (hi + lo) / (h * h);
    let quantitative = kernel.profile == Profile::Indicator && alpha == 0.0;
    Ok(ConsistencyReport {
        h,
        discrete,
        continuum,
        error: quantitative.then(|| (discrete - continuum).abs()),
        sign_agrees: (continuum.abs() > opts.margin)
            .then(|| discrete.signum() == continuum.signum() && discrete != 0.0),
    })
}

fn to_f64<T: Scalar>(p: &[T]) -> Vec<f64> {
    p.iter().map(|v| v.as_f64()).collect()
}

/// Writes `h,discrete,continuum,error` rows (empty error for sign-only reports).
pub fn write_consistency_csv<W: Write>(rows: &[ConsistencyReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["h", "discrete", "continuum", "error"])?;
    for r in rows {
        w.write_record([
            r.h.to_string(),
            r.discrete.to_string(),
            r.continuum.to_string(),
            r.error.map(|e| e.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Sup-norm deviation of the degrees from a target density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KdeReport {
    /// `R_n = max_i |d(x_i) - target(x_i)|` (divided by `C_Phi` when normalised).
    pub r_n: f64,
    pub r_n_over_h: f64,
    pub mean_abs: f64,
    /// Vertex attaining the maximum.
    pub argmax: usize,
}

/// Degree error against `f`, which must already include the `C_Phi` factor
/// unless `normalize_by_c_phi` is set (then degrees are divided by `C_Phi`
/// and compared with `f` as a probability density).
pub fn kde_error<T: Scalar>(
    cloud: &PointCloud<T>,
    kernel: &Kernel<T>,
    f: &DensityModel,
    n_unlabeled: usize,
    normalize_by_c_phi: bool,
) -> Result<KdeReport> {
    f.validate()?;
    kde_error_with(cloud, kernel, |x| f.value(x), n_unlabeled, normalize_by_c_phi)
}

/// [`kde_error`] against an arbitrary target function.
pub fn kde_error_with<T: Scalar, F: Fn(&[f64]) -> f64 + Sync>(
    cloud: &PointCloud<T>,
    kernel: &Kernel<T>,
    target: F,
    n_unlabeled: usize,
    normalize_by_c_phi: bool,
) -> Result<KdeReport> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let d = degrees(cloud, kernel, n_unlabeled)?;
    let scale = if normalize_by_c_phi { 1.0 / kernel.integral(cloud.dim()) } else { 1.0 };
    let dev: Vec<f64> = (0..cloud.len())
        .into_par_iter()
        .map(|i| (d[i].as_f64() * scale - target(&to_f64(cloud.point(i)))).abs())
        .collect();
    let (argmax, r_n) =
        dev.iter().copied().enumerate().fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let h = kernel.bandwidth.as_f64();
    Ok(KdeReport { r_n, r_n_over_h: r_n / h, mean_abs: dev.iter().sum::<f64>() / dev.len() as f64, argmax })
}

#[cfg(test)]
mod tests;
