use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{create, output_file, solve_on_cloud, write_scatter_svg, ExperimentConfig};
use crate::error::{Error, Result};
use crate::geometry::{sample, PointCloud, SamplerKind, SamplerSpec};
use crate::graph::build_graph;

/// Labeled points of the surface experiment: `g(0, 1/2) = 0`, `g(1, 1/2) = 1`.
pub const SURFACE_LABELS: [([f64; 2], f64); 2] = [([0.0, 0.5], 0.0), ([1.0, 0.5], 1.0)];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceRun {
    pub alpha: f64,
    /// All vertices, unlabeled first, then the two labeled points.
    pub points: Vec<(f64, f64)>,
    pub u: Vec<f64>,
    /// Mean of `u` over the unlabeled vertices.
    pub mean_u: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Surface2dOutput {
    pub runs: Vec<SurfaceRun>,
}

impl Surface2dOutput {
    pub fn run(&self, alpha: f64) -> Option<&SurfaceRun> {
        self.runs.iter().find(|r| r.alpha == alpha)
    }
}

/// Solves the two-label problem on the unit square for each alpha on one
/// shared sample, writing `surface_alpha{alpha}.csv` with header `x,y,u`.
pub fn run_surface2d(config: &ExperimentConfig) -> Result<Surface2dOutput> {
    config.validate()?;
    if config.dim != 2 {
        return Err(Error::Config(format!("surface2d needs dim = 2, got {}", config.dim)));
    }
    if config.n == 0 {
        return Err(Error::NoUnlabeled);
    }
    let kind = config.sampler.clone().unwrap_or(SamplerKind::UniformBox { lower: vec![0.0], upper: vec![1.0] });
    let base = sample::<f64>(&SamplerSpec::new(kind, config.seed), config.n, 2)?;
    let n = base.len();
    let cloud = base.concat(&SURFACE_LABELS.iter().map(|(p, _)| p.to_vec()).collect::<Vec<_>>())?;
    let labels: Vec<(usize, f64)> = SURFACE_LABELS.iter().enumerate().map(|(k, &(_, g))| (n + k, g)).collect();
    let points: Vec<(f64, f64)> = cloud.points().map(|p| (p[0], p[1])).collect();

    let runs: Vec<SurfaceRun> = config
        .alphas
        .par_iter()
        .map(|&alpha| {
            let build = |c: &PointCloud<f64>, nu: usize| build_graph(c, &config.kernel, alpha, nu);
            let (_, sol) =
                solve_on_cloud(&cloud, n, &labels, &build, &config.solver.options(), config.solver.multilevel)?;
            let mean_u = sol.u[..n].iter().sum::<f64>() / n as f64;
            Ok(SurfaceRun { alpha, points: points.clone(), u: sol.u, mean_u, iterations: sol.iterations })
        })
        .collect::<Result<_>>()?;

    if let Some(dir) = &config.output_dir {
        for run in &runs {
            let path = output_file(dir, &format!("surface_alpha{}.csv", run.alpha))?;
            let mut w = csv::Writer::from_writer(create(&path)?);
            w.write_record(["x", "y", "u"])?;
            for (&(x, y), u) in run.points.iter().zip(&run.u) {
                w.write_record([x.to_string(), y.to_string(), u.to_string()])?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            if config.svg {
                let path = output_file(dir, &format!("surface_alpha{}.svg", run.alpha))?;
                let mut f = create(&path)?;
                write_scatter_svg(&format!("alpha = {}", run.alpha), &run.points, &run.u, &mut f)?;
                f.flush().map_err(|e| Error::io(&path, e))?;
            }
        }
    }
    Ok(Surface2dOutput { runs })
}
