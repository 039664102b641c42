use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{aux_rng, create, median, output_file, ExperimentConfig};
use crate::analysis::{
    consistency_batch, continuum_operator, discrete_consistency_check, kde_error, write_consistency_csv,
    ConsistencyOptions, ConsistencyReport, DegreeSource, DensityModel, SmoothTestFunction,
};
use crate::error::{Error, Result};
use crate::geometry::{sample, Metric, PointCloud, SamplerKind, SamplerSpec, SpatialIndex};
use crate::graph::{Kernel, Profile};
use crate::oracle::{pair_density_oracle, BaseDensity};

/// Grid spacing of the consistency sweep relative to the bandwidth.
pub const GRID_REFINEMENT: f64 = 20.0;

fn torus_grid(h: f64, dim: usize) -> Result<PointCloud<f64>> {
    let per_axis = (GRID_REFINEMENT / h).round() as usize;
    let spec = SamplerSpec::new(SamplerKind::DeterministicGrid { per_axis, lower: 0.0, upper: 1.0 }, 0);
    sample::<f64>(&spec, 0, dim)?.with_metric(Metric::Torus)
}

/// A random dip configuration and its sign comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignTrial {
    pub trial: usize,
    pub alpha: f64,
    pub h: f64,
    pub mu: f64,
    pub delta: f64,
    pub center: f64,
    /// Angle of the linear test function's gradient.
    pub angle: f64,
    pub x: Vec<f64>,
    pub discrete: f64,
    pub continuum: f64,
    /// `None` when no point with `|continuum| > margin` was found.
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencySweepOutput {
    /// `x_1 + x_1^2` at the origin, one report per level.
    pub levels: Vec<ConsistencyReport>,
    pub sign_trials: Vec<SignTrial>,
}

impl ConsistencySweepOutput {
    /// Errors of the quantitative reports, in level order.
    pub fn errors(&self) -> Vec<f64> {
        self.levels.iter().filter_map(|r| r.error).collect()
    }

    /// True when every judged sign trial agrees and at least one was judged.
    pub fn signs_agree(&self) -> bool {
        let judged: Vec<bool> = self.sign_trials.iter().filter_map(|t| t.agrees).collect();
        !judged.is_empty() && judged.iter().all(|&a| a)
    }
}

/// Graph operator against the continuum operator on torus grids of spacing
/// `h / 20`.
///
/// For every level `h`: `phi = x_1 + x_1^2` at the origin with `alpha = 0`
/// (continuum value 2). For every nonzero alpha and trial: a random periodic
/// dip density (weights built from the density itself), a random linear
/// `phi`, and a point on the dip's ramp where `|continuum| > margin`; the
/// sign of the discrete operator must match. Configurations without such a
/// point are redrawn. Sign trials use the finest level.
///
/// Writes `consistency.csv` (`h,discrete,continuum,error`) and
/// `consistency_signs.csv`.
pub fn run_consistency_sweep(config: &ExperimentConfig) -> Result<ConsistencySweepOutput> {
    config.validate()?;
    let dim = config.dim;
    let phi = SmoothTestFunction::x1_plus_x1_squared(dim);
    let flat = DensityModel::Constant { value: 1.0 };
    let opts = ConsistencyOptions { degrees: DegreeSource::Density, margin: config.margin };
    let levels_h: Vec<f64> = config.levels().iter().map(|l| l.h).collect();
    let levels = levels_h
        .iter()
        .map(|&h| {
            let grid = torus_grid(h, dim)?;
            discrete_consistency_check(&grid, &config.kernel_at(h)?, 0.0, &phi, &flat, 0, &opts)
        })
        .collect::<Result<Vec<_>>>()?;

    let h = levels_h.iter().copied().fold(f64::INFINITY, f64::min);
    let mut sign_trials = Vec::new();
    let alphas: Vec<f64> = config.alphas.iter().copied().filter(|&a| a != 0.0).collect();
    if !alphas.is_empty() {
        let grid = torus_grid(h, dim)?;
        let kernel = config.kernel_at(h)?;
        let index = SpatialIndex::for_knn(&grid, 1);
        let jobs: Vec<(f64, usize)> = alphas.iter().flat_map(|&a| (0..config.trials).map(move |t| (a, t))).collect();
        sign_trials = jobs
            .par_iter()
            .map(|&(alpha, trial)| sign_trial(config, &grid, &index, &kernel, alpha, trial, &opts))
            .collect::<Result<_>>()?;
    }

    if let Some(dir) = &config.output_dir {
        let path = output_file(dir, "consistency.csv")?;
        write_consistency_csv(&levels, create(&path)?)?;
        let path = output_file(dir, "consistency_signs.csv")?;
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["trial", "alpha", "h", "mu", "delta", "center", "angle", "discrete", "continuum", "agrees"])?;
        for t in &sign_trials {
            w.write_record([
                t.trial.to_string(),
                t.alpha.to_string(),
                t.h.to_string(),
                t.mu.to_string(),
                t.delta.to_string(),
                t.center.to_string(),
                t.angle.to_string(),
                t.discrete.to_string(),
                t.continuum.to_string(),
                t.agrees.map(|a| a.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(ConsistencySweepOutput { levels, sign_trials })
}

const SIGN_ATTEMPTS: usize = 200;

fn sign_trial(
    config: &ExperimentConfig,
    grid: &PointCloud<f64>,
    index: &SpatialIndex<'_, f64>,
    kernel: &Kernel<f64>,
    alpha: f64,
    trial: usize,
    opts: &ConsistencyOptions,
) -> Result<SignTrial> {
    let dim = grid.dim();
    let mut rng = aux_rng(config.seed, trial);
    let mut out = SignTrial {
        trial,
        alpha,
        h: kernel.bandwidth,
        mu: f64::NAN,
        delta: f64::NAN,
        center: f64::NAN,
        angle: f64::NAN,
        x: Vec::new(),
        discrete: f64::NAN,
        continuum: f64::NAN,
        agrees: None,
    };
    // A configuration whose gradient is nearly orthogonal to the dip has no
    // point above the margin; it is redrawn rather than left unjudged.
    for _ in 0..SIGN_ATTEMPTS {
        let mu = rng.gen_range(0.2..0.8);
        let delta = rng.gen_range(0.15..0.3);
        let width = 0.5 * delta;
        let center = rng.gen::<f64>();
        let angle = rng.gen_range(0.0..TAU);
        let f = DensityModel::SmoothDip { level: 1.0, mu, delta, width, center, periodic: true };
        let mut p = vec![0.0; dim];
        p[0] = angle.cos();
        if dim > 1 {
            p[1] = angle.sin();
        }
        let phi = SmoothTestFunction::Linear { p };
        (out.mu, out.delta, out.center, out.angle) = (mu, delta, center, angle);
        // a point on the ramp, either side of the dip
        let side = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let r = delta - width + rng.gen::<f64>() * 2.0 * width;
        let mut x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        x[0] = (center + side * r).rem_euclid(1.0);
        let v = index.k_nearest_point(&x, None, 1)[0].index;
        let at: Vec<f64> = grid.point(v).to_vec();
        if continuum_operator(&phi, &f, alpha, &at)?.abs() <= opts.margin {
            continue;
        }
        let rep = &consistency_batch(grid, kernel, alpha, &phi, &f, &[v], opts)?[0];
        out.x = at;
        out.discrete = rep.discrete;
        out.continuum = rep.continuum;
        out.agrees = rep.sign_agrees;
        break;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KdeRow {
    pub n: usize,
    pub h: f64,
    pub trial: usize,
    /// `R_n / C_Phi`.
    pub r_n: f64,
    pub r_n_over_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KdeSweepOutput {
    pub rows: Vec<KdeRow>,
}

impl KdeSweepOutput {
    pub fn median_r_n(&self, n: usize, h: f64) -> f64 {
        median(&self.rows.iter().filter(|r| r.n == n && r.h == h).map(|r| r.r_n).collect::<Vec<_>>())
    }
}

/// Degree error `R_n / C_Phi` for i.i.d. uniform data on the torus, per
/// level and trial. Writes `kde.csv` (`n,h,trial,r_n,r_n_over_h`).
pub fn run_kde_sweep(config: &ExperimentConfig) -> Result<KdeSweepOutput> {
    config.validate()?;
    let jobs: Vec<(usize, f64, usize)> =
        config.levels().iter().flat_map(|l| (0..config.trials).map(move |t| (l.n, l.h, t))).collect();
    let flat = DensityModel::Constant { value: 1.0 };
    // trials run one after another: each already parallelises over points
    let rows = jobs
        .iter()
        .map(|&(n, h, trial)| {
            let spec = SamplerSpec::new(SamplerKind::UniformBox { lower: vec![0.0], upper: vec![1.0] }, config.seed)
                .with_stream(trial as u64);
            let cloud = sample::<f64>(&spec, n, config.dim)?.with_metric(Metric::Torus)?;
            let rep = kde_error(&cloud, &config.kernel_at(h)?, &flat, n, true)?;
            Ok(KdeRow { n, h, trial, r_n: rep.r_n, r_n_over_h: rep.r_n_over_h })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(dir) = &config.output_dir {
        let path = output_file(dir, "kde.csv")?;
        let mut w = csv::Writer::from_writer(create(&path)?);
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(KdeSweepOutput { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairKdeCheck {
    pub m: usize,
    pub n: usize,
    pub h: f64,
    /// `max_i |d(z_i) - C_Phi (rho * rho)(z_i)| / C_Phi`.
    pub sup_error_over_c_phi: f64,
}

/// Degrees of the pair-sum cloud `{Y_i + Y_j}` (`Y` uniform on `[0, 1]`)
/// against the convolution limit.
pub fn pair_kde_check(m: usize, h: f64, profile: Profile, seed: u64) -> Result<PairKdeCheck> {
    let spec = SamplerSpec::new(SamplerKind::PairStatistic { m, lower: 0.0, upper: 1.0 }, seed);
    let cloud = sample::<f64>(&spec, 0, 1)?;
    let kernel = Kernel::new(profile, h)?;
    let base = BaseDensity::Uniform { lower: 0.0, upper: 1.0 };
    let n = cloud.len();
    let rep = crate::analysis::kde_error_with(
        &cloud,
        &kernel,
        |z| pair_density_oracle(&base, &kernel, z[0]).unwrap_or(f64::NAN),
        n,
        false,
    )?;
    Ok(PairKdeCheck { m, n, h, sup_error_over_c_phi: rep.r_n / kernel.integral(1) })
}
