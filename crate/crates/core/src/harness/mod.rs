//! Configuration-driven experiment runners.
//!
//! Every runner takes an [`ExperimentConfig`], runs its trials in parallel on
//! independent RNG streams `(seed, trial)`, returns typed results and, when
//! `output_dir` is set, writes CSV files (and optionally SVG figures) there.
//!
//! Clouds are laid out with the unlabeled sample first and labeled points
//! appended, so vertex `i < n` is unlabeled.

mod classify;
mod config;
mod idx;
mod multiclass;
mod oned;
mod surface;
mod svg;
mod sweeps;

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use classify::{run_synth_classify, SynthClassifyOutput};
pub use config::{Experiment, ExperimentConfig, Level, SolverConfig};
pub use idx::{ingest_idx, parse_idx_images, parse_idx_labels, IdxImages};
pub use multiclass::{
    binary_threshold, gaussian_blobs, one_vs_rest, run_multiclass, write_multiclass_csv, Blobs, MulticlassOutput,
    MulticlassRun,
};
pub use oned::{oned_trial, run_oracle1d_validation, OneDTrial, Oracle1dOutput, Oracle1dRow};
pub use surface::{run_surface2d, Surface2dOutput, SurfaceRun};
pub use svg::{write_line_svg, write_scatter_svg};
pub use sweeps::{
    pair_kde_check, run_consistency_sweep, run_kde_sweep, ConsistencySweepOutput, KdeRow, KdeSweepOutput, PairKdeCheck,
    SignTrial,
};

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, SpatialIndex};
use crate::graph::WeightedGraph;
use crate::solver::{solve, LabelProblem, Solution, SolveOptions};

/// Coarse levels stop once they would hold fewer unlabeled points than this.
pub const MULTILEVEL_MIN_POINTS: usize = 1000;
/// Ratio of unlabeled points between successive levels.
pub const MULTILEVEL_FACTOR: usize = 4;

// Label positions and other per-trial draws use streams offset from the
// sampler's so the unlabeled sample is shared by every alpha in a trial.
const AUX_STREAM: u64 = 1 << 32;

pub(crate) fn aux_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(AUX_STREAM + trial as u64);
    rng
}

/// Classification accuracies over trials for one alpha (and dip strength
/// `mu` where the experiment has one).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Fraction of unlabeled points classified correctly, per trial.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (zero for a single trial).
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl ClassificationResult {
    pub fn new(alpha: f64, mu: Option<f64>, accuracies: Vec<f64>) -> Self {
        let n = accuracies.len() as f64;
        let mean = accuracies.iter().sum::<f64>() / n;
        let var = if accuracies.len() > 1 {
            accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let min = accuracies.iter().copied().fold(f64::INFINITY, f64::min);
        let max = accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ClassificationResult { alpha, mu, accuracies, mean: mean.clamp(min, max), std: var.sqrt(), min, max }
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Solves on `cloud` whose first `n_unlabeled` points are unlabeled and whose
/// labeled vertices all come after them.
///
/// With `multilevel`, the problem is first solved on the prefix of
/// `n_unlabeled / 4` unlabeled points plus the labeled points (recursively),
/// and the coarse solution, read off at each fine point's nearest coarse
/// point, is the warm start. i.i.d. samples make the prefix a random
/// subsample. A failing coarse level falls back to the default start.
pub fn solve_on_cloud<G>(
    cloud: &PointCloud<f64>,
    n_unlabeled: usize,
    labels: &[(usize, f64)],
    build: &G,
    opts: &SolveOptions,
    multilevel: bool,
) -> Result<(WeightedGraph<f64>, Solution<f64>)>
where
    G: Fn(&PointCloud<f64>, usize) -> Result<WeightedGraph<f64>>,
{
    let graph = build(cloud, n_unlabeled)?;
    let problem = LabelProblem::new(&graph, labels.to_vec())?;
    let mut opts = opts.clone();
    let layered = labels.iter().all(|&(i, _)| i >= n_unlabeled);
    if multilevel && layered && opts.warm_start.is_none() && n_unlabeled / MULTILEVEL_FACTOR >= MULTILEVEL_MIN_POINTS {
        if let Some(u0) = coarse_start(cloud, n_unlabeled, labels, build, &opts) {
            opts.warm_start = Some(u0);
        }
    }
    let sol = solve(&problem, &opts)?;
    Ok((graph, sol))
}

fn coarse_start<G>(
    cloud: &PointCloud<f64>,
    n_unlabeled: usize,
    labels: &[(usize, f64)],
    build: &G,
    opts: &SolveOptions,
) -> Option<Vec<f64>>
where
    G: Fn(&PointCloud<f64>, usize) -> Result<WeightedGraph<f64>>,
{
    let nc = n_unlabeled / MULTILEVEL_FACTOR;
    let d = cloud.dim();
    let mut coords = cloud.coords()[..nc * d].to_vec();
    coords.extend_from_slice(&cloud.coords()[n_unlabeled * d..]);
    let coarse = PointCloud::from_flat(coords, d, cloud.metric()).ok()?;
    let coarse_labels: Vec<(usize, f64)> = labels.iter().map(|&(i, g)| (i - n_unlabeled + nc, g)).collect();
    let (_, sol) = solve_on_cloud(&coarse, nc, &coarse_labels, build, opts, true).ok()?;
    let index = SpatialIndex::for_knn(&coarse, 1);
    Some((0..cloud.len()).map(|i| sol.u[index.k_nearest_point(cloud.point(i), None, 1)[0].index]).collect())
}

/// Creates `dir` (if needed) and returns `dir/name`.
pub(crate) fn output_file(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.join(name))
}

pub(crate) fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}
