use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{aux_rng, create, median, output_file, solve_on_cloud, write_line_svg, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{sample, Metric, PointCloud, SamplerKind, SamplerSpec};
use crate::graph::{build_graph, Kernel};
use crate::harness::ExperimentConfig;
use crate::oracle::OneDModel;

/// One graph solve of the two-label dip problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneDTrial {
    /// Unlabeled positions and the learned values there.
    pub xs: Vec<f64>,
    pub u: Vec<f64>,
    /// `max_i |u_n(x_i) - u_alpha(x_i)|` over unlabeled points.
    pub sup_error: f64,
    /// Fraction of unlabeled points with `sign(u) = g`, counting `u = 0` as `-1`.
    pub accuracy: f64,
    pub closed_form: f64,
    pub iterations: usize,
}

/// Samples `n` points from the dip density of `model`, labels `-x1` and
/// `x2`, builds the self-tuned kernel graph and solves.
pub fn oned_trial(
    model: &OneDModel<f64>,
    n: usize,
    kernel: &Kernel<f64>,
    seed: u64,
    trial: usize,
    solver: &SolverConfig,
) -> Result<OneDTrial> {
    let spec = SamplerSpec::new(SamplerKind::DipDensity1D { mu: model.mu, delta: model.delta }, seed)
        .with_stream(trial as u64);
    let base = sample::<f64>(&spec, n, 1)?;
    let mut coords = base.coords().to_vec();
    coords.extend([-model.x1, model.x2]);
    let cloud = PointCloud::from_flat(coords, 1, Metric::Euclidean)?;
    let labels = [(n, -1.0), (n + 1, 1.0)];
    let build = |c: &PointCloud<f64>, nu: usize| build_graph(c, kernel, model.alpha, nu);
    let (_, sol) = solve_on_cloud(&cloud, n, &labels, &build, &solver.options(), solver.multilevel)?;
    let xs = base.coords().to_vec();
    let u = sol.u[..n].to_vec();
    let mut sup: f64 = 0.0;
    let mut correct = 0usize;
    for (&x, &v) in xs.iter().zip(&u) {
        sup = sup.max((v - model.eval_u_alpha(x)?).abs());
        if (v > 0.0) == (x >= 0.0) {
            correct += 1;
        }
    }
    Ok(OneDTrial {
        xs,
        u,
        sup_error: sup,
        accuracy: correct as f64 / n as f64,
        closed_form: model.closed_form_accuracy(),
        iterations: sol.iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oracle1dRow {
    pub n: usize,
    pub h: f64,
    pub alpha: f64,
    pub mu: f64,
    pub trial: usize,
    pub x1: f64,
    pub x2: f64,
    pub sup_error: f64,
    pub accuracy: f64,
    pub closed_form_accuracy: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oracle1dOutput {
    pub rows: Vec<Oracle1dRow>,
}

impl Oracle1dOutput {
    fn select(&self, n: usize, h: f64, alpha: f64, mu: f64) -> impl Iterator<Item = &Oracle1dRow> {
        self.rows.iter().filter(move |r| r.n == n && r.h == h && r.alpha == alpha && r.mu == mu)
    }

    /// Median sup error over trials at one `(n, h, alpha, mu)`.
    pub fn median_sup_error(&self, n: usize, h: f64, alpha: f64, mu: f64) -> f64 {
        median(&self.select(n, h, alpha, mu).map(|r| r.sup_error).collect::<Vec<_>>())
    }

    /// Mean of `accuracy - closed_form_accuracy` over trials.
    pub fn mean_accuracy_gap(&self, n: usize, h: f64, alpha: f64, mu: f64) -> f64 {
        let gaps: Vec<f64> = self.select(n, h, alpha, mu).map(|r| r.accuracy - r.closed_form_accuracy).collect();
        gaps.iter().sum::<f64>() / gaps.len() as f64
    }
}

/// Sweeps levels x mu x alpha x trials on the one-dimensional dip model and
/// compares each graph solution with the closed-form continuum solution.
///
/// Writes `oracle1d_n{n}_h{h}.csv` per level with header
/// `n,h,alpha,mu,trial,x1,x2,sup_error,accuracy,closed_form_accuracy,iterations`.
pub fn run_oracle1d_validation(config: &ExperimentConfig) -> Result<Oracle1dOutput> {
    config.validate()?;
    if config.dim != 1 {
        return Err(Error::Config(format!("oracle1d is one-dimensional, got dim = {}", config.dim)));
    }
    let mut jobs = Vec::new();
    for level in config.levels() {
        for &mu in &config.mu_values {
            for &alpha in &config.alphas {
                for trial in 0..config.trials {
                    jobs.push((level, mu, alpha, trial));
                }
            }
        }
    }
    let rows: Vec<Oracle1dRow> = jobs
        .par_iter()
        .map(|&(level, mu, alpha, trial)| {
            let (x1, x2) = label_positions(config, trial);
            let model = OneDModel::new(mu, config.delta, x1, x2, alpha)?;
            let kernel = config.kernel_at(level.h)?;
            let t = oned_trial(&model, level.n, &kernel, config.seed, trial, &config.solver)?;
            Ok(Oracle1dRow {
                n: level.n,
                h: level.h,
                alpha,
                mu,
                trial,
                x1,
                x2,
                sup_error: t.sup_error,
                accuracy: t.accuracy,
                closed_form_accuracy: t.closed_form,
                iterations: t.iterations,
            })
        })
        .collect::<Result<_>>()?;
    let out = Oracle1dOutput { rows };
    if let Some(dir) = &config.output_dir {
        for level in config.levels() {
            let path = output_file(dir, &format!("oracle1d_n{}_h{}.csv", level.n, level.h))?;
            let mut w = csv::Writer::from_writer(create(&path)?);
            for r in out.rows.iter().filter(|r| r.n == level.n && r.h == level.h) {
                w.serialize(r)?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        if config.svg {
            write_profiles(config, dir)?;
        }
    }
    Ok(out)
}

// Labels from the config, or uniform on [delta, 1] from the trial's aux stream.
fn label_positions(config: &ExperimentConfig, trial: usize) -> (f64, f64) {
    let mut rng = aux_rng(config.seed, trial);
    let mut draw = |fixed: Option<f64>| fixed.unwrap_or_else(|| rng.gen_range(config.delta..=1.0));
    (draw(config.x1), draw(config.x2))
}

// Graph solution against u_alpha for trial 0 of the finest level.
fn write_profiles(config: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    let Some(level) = config.levels().last().copied() else { return Ok(()) };
    let (x1, x2) = label_positions(config, 0);
    for &mu in &config.mu_values {
        for &alpha in &config.alphas {
            let model = OneDModel::new(mu, config.delta, x1, x2, alpha)?;
            let t = oned_trial(&model, level.n, &config.kernel_at(level.h)?, config.seed, 0, &config.solver)?;
            let mut pts: Vec<(f64, f64)> = t.xs.iter().copied().zip(t.u.iter().copied()).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let series = vec![("graph".to_string(), pts), ("continuum".to_string(), model.profile(401))];
            let path = output_file(dir, &format!("oracle1d_profile_mu{mu}_alpha{alpha}.svg"))?;
            let mut f = create(&path)?;
            write_line_svg(&format!("mu = {mu}, alpha = {alpha}"), &series, &mut f)?;
            f.flush().map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}
