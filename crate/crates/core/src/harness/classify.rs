use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{aux_rng, create, output_file, solve_on_cloud, ClassificationResult, ExperimentConfig};
use crate::error::{Error, Result};
use crate::geometry::{sample, PointCloud, SamplerKind, SamplerSpec};
use crate::graph::build_graph;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthClassifyOutput {
    /// Ordered by mu, then alpha.
    pub results: Vec<ClassificationResult>,
}

impl SynthClassifyOutput {
    pub fn get(&self, alpha: f64, mu: f64) -> Option<&ClassificationResult> {
        self.results.iter().find(|r| r.alpha == alpha && r.mu == Some(mu))
    }
}

/// Dip-density classification on `[-1, 1] x [0, 1]^(d-1)`.
///
/// Per trial: unlabeled points from the dip density, one label `-1` at `-X1`
/// and one label `+1` at `X2` with `X1, X2` uniform on
/// `[delta, 1] x [0, 1]^(d-1)` (the reflection flips the first coordinate
/// only), solve for each alpha on the shared sample, threshold at 0 and
/// score against `g = 1` iff `x_1 >= 0`.
///
/// Writes `classify_trials.csv` (`alpha,mu,trial,accuracy`) and
/// `classify_summary.csv` (`alpha,mu,trials,mean,std,min,max`).
pub fn run_synth_classify(config: &ExperimentConfig) -> Result<SynthClassifyOutput> {
    config.validate()?;
    let d = config.dim;
    if d < 2 {
        return Err(Error::Config(format!("synth_classify needs dim >= 2, got {d}")));
    }
    let jobs: Vec<(f64, usize)> =
        config.mu_values.iter().flat_map(|&mu| (0..config.trials).map(move |t| (mu, t))).collect();
    let per_job: Vec<Vec<f64>> =
        jobs.par_iter().map(|&(mu, trial)| synth_trial(config, mu, trial)).collect::<Result<_>>()?;

    let mut results = Vec::new();
    for &mu in &config.mu_values {
        for (k, &alpha) in config.alphas.iter().enumerate() {
            let acc: Vec<f64> = jobs.iter().zip(&per_job).filter(|((m, _), _)| *m == mu).map(|(_, a)| a[k]).collect();
            results.push(ClassificationResult::new(alpha, Some(mu), acc));
        }
    }

    if let Some(dir) = &config.output_dir {
        let path = output_file(dir, "classify_trials.csv")?;
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["alpha", "mu", "trial", "accuracy"])?;
        for r in &results {
            for (t, a) in r.accuracies.iter().enumerate() {
                w.write_record([r.alpha.to_string(), mu_str(r), t.to_string(), a.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        let path = output_file(dir, "classify_summary.csv")?;
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["alpha", "mu", "trials", "mean", "std", "min", "max"])?;
        for r in &results {
            w.write_record([
                r.alpha.to_string(),
                mu_str(r),
                r.accuracies.len().to_string(),
                r.mean.to_string(),
                r.std.to_string(),
                r.min.to_string(),
                r.max.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(SynthClassifyOutput { results })
}

fn mu_str(r: &ClassificationResult) -> String {
    r.mu.map(|m| m.to_string()).unwrap_or_default()
}

// Accuracy for every alpha in the config on one sample.
fn synth_trial(config: &ExperimentConfig, mu: f64, trial: usize) -> Result<Vec<f64>> {
    let d = config.dim;
    let spec =
        SamplerSpec::new(SamplerKind::DipDensityBox { mu, delta: config.delta }, config.seed).with_stream(trial as u64);
    let base = sample::<f64>(&spec, config.n, d)?;
    let n = base.len();
    let mut rng = aux_rng(config.seed, trial);
    let mut draw = || -> Vec<f64> {
        let mut p = vec![rng.gen_range(config.delta..=1.0)];
        p.extend((1..d).map(|_| rng.gen::<f64>()));
        p
    };
    let mut neg = draw();
    neg[0] = -neg[0];
    let pos = draw();
    let cloud = base.concat(&[neg, pos])?;
    let labels = [(n, -1.0), (n + 1, 1.0)];
    config
        .alphas
        .iter()
        .map(|&alpha| {
            let build = |c: &PointCloud<f64>, nu: usize| build_graph(c, &config.kernel, alpha, nu);
            let (_, sol) =
                solve_on_cloud(&cloud, n, &labels, &build, &config.solver.options(), config.solver.multilevel)?;
            let correct = (0..n).filter(|&i| (sol.u[i] > 0.0) == (cloud.point(i)[0] >= 0.0)).count();
            Ok(correct as f64 / n as f64)
        })
        .collect()
}
