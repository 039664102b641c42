use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SamplerKind;
use crate::graph::{Kernel, Profile};
use crate::solver::SolveOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Surface2d,
    Oracle1d,
    SynthClassify,
    ConsistencySweep,
    KdeSweep,
    MultiClass,
}

/// One `(n, h)` refinement level of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: usize,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Warm-start large solves from a coarse subsample.
    pub multilevel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolveOptions::default();
        SolverConfig { tol: d.tol, max_iter: d.max_iter, multilevel: true }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions::default().with_tol(self.tol).with_max_iter(self.max_iter)
    }
}

/// Parameters of one experiment, read from TOML.
///
/// Fields not used by the chosen experiment are ignored. A minimal file:
///
/// ```toml
/// experiment = "oracle1d"
/// seed = 7
/// trials = 5
/// alphas = [0.0, 1.0]
/// levels = [{ n = 4000, h = 0.05 }, { n = 16000, h = 0.03 }]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    /// Unlabeled sample size when `levels` is empty.
    pub n: usize,
    pub alphas: Vec<f64>,
    /// Unlabeled distribution for `surface2d` (uniform box by default).
    pub sampler: Option<SamplerKind>,
    pub kernel: Kernel<f64>,
    pub solver: SolverConfig,
    pub output_dir: Option<PathBuf>,
    /// Dip strengths for `oracle1d` and `synth_classify`.
    pub mu_values: Vec<f64>,
    pub delta: f64,
    /// Fixed label positions `-x1`, `x2` for `oracle1d`; drawn uniformly on
    /// `[delta, 1]` per trial when absent.
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    /// `(n, h)` levels; defaults to a single level `(n, kernel.bandwidth)`.
    pub levels: Vec<Level>,
    /// Multiclass: number of classes, labels drawn per class, k-NN size.
    pub classes: usize,
    pub labels_per_class: usize,
    pub knn: usize,
    /// Multiclass input in IDX format instead of synthetic blobs.
    pub idx_images: Option<PathBuf>,
    pub idx_labels: Option<PathBuf>,
    pub idx_limit: Option<usize>,
    /// Sign-test margin for `consistency_sweep`.
    pub margin: f64,
    /// Also write SVG figures.
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Surface2d,
            seed: 0,
            trials: 1,
            dim: 2,
            n: 10_000,
            alphas: vec![0.0, 1.0],
            sampler: None,
            kernel: Kernel { profile: Profile::SmoothBump, bandwidth: 0.05 },
            solver: SolverConfig::default(),
            output_dir: None,
            mu_values: vec![0.5],
            delta: 0.1,
            x1: None,
            x2: None,
            levels: Vec::new(),
            classes: 3,
            labels_per_class: 5,
            knn: 10,
            idx_images: None,
            idx_labels: None,
            idx_limit: None,
            margin: 0.5,
            svg: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Named parameter sets for the standard experiments.
    ///
    /// `fig4` uses `h = 0.05` and `fig6-d2` uses `h = 0.5` (with `fig6-d5` at
    /// `h = 0.25`, `delta = 0.2`); both bandwidth regimes are available and
    /// neither is implied by the other.
    pub fn preset(name: &str) -> Result<Self> {
        let base = ExperimentConfig::default();
        let indicator = |h| Kernel { profile: Profile::Indicator, bandwidth: h };
        let cfg = match name {
            "surface-uniform" => ExperimentConfig { experiment: Experiment::Surface2d, ..base },
            "surface-ramp" => {
                ExperimentConfig { experiment: Experiment::Surface2d, sampler: Some(SamplerKind::LinearRamp), ..base }
            }
            "oracle1d" => ExperimentConfig {
                experiment: Experiment::Oracle1d,
                dim: 1,
                trials: 5,
                seed: 1,
                kernel: indicator(0.05),
                x1: Some(0.9),
                x2: Some(0.25),
                levels: vec![Level { n: 4000, h: 0.05 }, Level { n: 16000, h: 0.03 }],
                ..base
            },
            "fig4" => {
                ExperimentConfig { experiment: Experiment::SynthClassify, mu_values: vec![0.5], n: 10_000, ..base }
            }
            "fig6-d2" => ExperimentConfig {
                experiment: Experiment::SynthClassify,
                trials: 100,
                n: 10_000,
                kernel: Kernel { profile: Profile::SmoothBump, bandwidth: 0.5 },
                alphas: vec![0.0, 0.5, 1.0, 1.5, 2.0],
                mu_values: vec![0.5, 0.6, 0.7, 0.8, 0.9],
                ..base
            },
            "fig6-d5" => ExperimentConfig {
                experiment: Experiment::SynthClassify,
                trials: 100,
                dim: 5,
                n: 10_000,
                delta: 0.2,
                kernel: Kernel { profile: Profile::SmoothBump, bandwidth: 0.25 },
                alphas: vec![0.0, 0.5, 1.0, 1.5, 2.0],
                mu_values: vec![0.5, 0.6, 0.7, 0.8, 0.9],
                ..base
            },
            "consistency" => ExperimentConfig {
                experiment: Experiment::ConsistencySweep,
                trials: 20,
                kernel: indicator(0.05),
                alphas: vec![0.0, 1.0],
                levels: vec![Level { n: 0, h: 0.2 }, Level { n: 0, h: 0.1 }, Level { n: 0, h: 0.05 }],
                ..base
            },
            "kde" => ExperimentConfig {
                experiment: Experiment::KdeSweep,
                trials: 5,
                kernel: indicator(0.1),
                levels: vec![Level { n: 20_000, h: 0.1 }, Level { n: 80_000, h: 0.05 }],
                ..base
            },
            "blobs" => {
                ExperimentConfig { experiment: Experiment::MultiClass, trials: 10, n: 600, alphas: vec![0.5], ..base }
            }
            other => return Err(Error::Config(format!("unknown preset '{other}'"))),
        };
        Ok(cfg)
    }

    pub const PRESETS: &'static [&'static str] =
        &["surface-uniform", "surface-ramp", "oracle1d", "fig4", "fig6-d2", "fig6-d5", "consistency", "kde", "blobs"];

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.alphas.is_empty() {
            return bad("alphas must not be empty".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !a.is_finite()) {
            return bad(format!("alpha {a} is not finite"));
        }
        if self.dim == 0 {
            return bad("dim must be positive".into());
        }
        Kernel::new(self.kernel.profile, self.kernel.bandwidth)?;
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 {
            return bad("solver needs tol > 0 and max_iter >= 1".into());
        }
        if let Some(l) = self.levels.iter().find(|l| !(l.h > 0.0)) {
            return bad(format!("level bandwidth must be positive, got {}", l.h));
        }
        for p in [&self.idx_images, &self.idx_labels].into_iter().flatten() {
            if !p.exists() {
                return bad(format!("{} does not exist", p.display()));
            }
        }
        if self.idx_images.is_some() != self.idx_labels.is_some() {
            return bad("idx_images and idx_labels must be given together".into());
        }
        Ok(())
    }

    /// Requested levels, or the single level `(n, bandwidth)`.
    pub fn levels(&self) -> Vec<Level> {
        if self.levels.is_empty() {
            vec![Level { n: self.n, h: self.kernel.bandwidth }]
        } else {
            self.levels.clone()
        }
    }

    pub fn kernel_at(&self, h: f64) -> Result<Kernel<f64>> {
        Kernel::new(self.kernel.profile, h)
    }
}
