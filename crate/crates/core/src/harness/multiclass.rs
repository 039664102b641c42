use std::f64::consts::TAU;
use std::io::Write;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::{aux_rng, create, ingest_idx, output_file, ClassificationResult, ExperimentConfig};
use crate::error::{Error, Result};
use crate::geometry::{Metric, PointCloud};
use crate::graph::{knn_self_tuning_weights, KnnWeightRule, WeightedGraph};
use crate::solver::{solve, LabelProblem, SolveOptions};

/// One-vs-rest scores and argmax predictions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MulticlassOutput {
    /// `scores[c][x]`, the solution with label 1 on class `c` and 0 elsewhere.
    pub scores: Vec<Vec<f64>>,
    pub predictions: Vec<usize>,
    /// Total solver iterations over all classes.
    pub iterations: usize,
}

/// Class 1 where `u > 0`, class 0 otherwise.
pub fn binary_threshold(u: &[f64]) -> Vec<usize> {
    u.iter().map(|&v| usize::from(v > 0.0)).collect()
}

/// One-vs-rest Lipschitz learning over `classes` classes.
///
/// For each class `c`, solves with `g = 1` on the class-`c` labels and `g = 0`
/// on the others, then predicts the class of largest score (ties go to the
/// lowest class id). With two classes a single solve with labels `-1`
/// (class 0) and `+1` (class 1) is used, `scores[1] = (u + 1) / 2` and
/// `scores[0] = 1 - scores[1]`, so predictions coincide with
/// [`binary_threshold`] of that solve.
pub fn one_vs_rest(
    graph: &WeightedGraph<f64>,
    labels: &[(usize, usize)],
    classes: usize,
    opts: &SolveOptions,
) -> Result<MulticlassOutput> {
    if classes < 2 {
        return Err(Error::param(format!("need at least two classes, got {classes}")));
    }
    if let Some(&(i, c)) = labels.iter().find(|l| l.1 >= classes) {
        return Err(Error::Labels(format!("vertex {i} has class {c} but there are {classes} classes")));
    }
    if let Some(class) = (0..classes).find(|&c| !labels.iter().any(|l| l.1 == c)) {
        return Err(Error::EmptyClass { class });
    }
    if classes == 2 {
        let problem =
            LabelProblem::new(graph, labels.iter().map(|&(i, c)| (i, if c == 1 { 1.0 } else { -1.0 })).collect())?;
        let sol = solve(&problem, opts)?;
        let s1: Vec<f64> = sol.u.iter().map(|v| 0.5 * (v + 1.0)).collect();
        let s0: Vec<f64> = s1.iter().map(|v| 1.0 - v).collect();
        return Ok(MulticlassOutput {
            scores: vec![s0, s1],
            predictions: binary_threshold(&sol.u),
            iterations: sol.iterations,
        });
    }
    let sols = (0..classes)
        .into_par_iter()
        .map(|c| {
            let problem =
                LabelProblem::new(graph, labels.iter().map(|&(i, k)| (i, if k == c { 1.0 } else { 0.0 })).collect())?;
            solve(&problem, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = graph.n_vertices();
    let predictions = (0..n)
        .map(|x| {
            let mut best = 0;
            for c in 1..classes {
                if sols[c].u[x] > sols[best].u[x] {
                    best = c;
                }
            }
            best
        })
        .collect();
    Ok(MulticlassOutput {
        iterations: sols.iter().map(|s| s.iterations).sum(),
        scores: sols.into_iter().map(|s| s.u).collect(),
        predictions,
    })
}

/// Writes `index,class,predicted,score_0,..` (empty `class` when unknown).
pub fn write_multiclass_csv<W: Write>(out: &MulticlassOutput, truth: Option<&[usize]>, w: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    let mut header = vec!["index".to_string(), "class".to_string(), "predicted".to_string()];
    header.extend((0..out.scores.len()).map(|c| format!("score_{c}")));
    w.write_record(&header)?;
    for (x, &p) in out.predictions.iter().enumerate() {
        let mut rec = vec![x.to_string(), truth.map(|t| t[x].to_string()).unwrap_or_default(), p.to_string()];
        rec.extend(out.scores.iter().map(|s| s[x].to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Labeled synthetic data.
#[derive(Debug, Clone, PartialEq)]
pub struct Blobs {
    pub cloud: PointCloud<f64>,
    pub classes: Vec<usize>,
}

/// `per_class` points around each of `classes` centres spaced evenly on the
/// circle of radius `radius` in the first two coordinates, isotropic normal
/// noise with standard deviation `spread`.
pub fn gaussian_blobs(
    classes: usize,
    per_class: usize,
    dim: usize,
    radius: f64,
    spread: f64,
    seed: u64,
    stream: u64,
) -> Result<Blobs> {
    if dim < 2 || classes == 0 || per_class == 0 {
        return Err(Error::param("blobs need dim >= 2 and at least one class and point"));
    }
    let normal = Normal::new(0.0, spread).map_err(|e| Error::param(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut coords = Vec::with_capacity(classes * per_class * dim);
    let mut labels = Vec::with_capacity(classes * per_class);
    for c in 0..classes {
        let angle = TAU * c as f64 / classes as f64;
        let mut centre = vec![0.0; dim];
        centre[0] = radius * angle.cos();
        centre[1] = radius * angle.sin();
        for _ in 0..per_class {
            coords.extend(centre.iter().map(|m| m + normal.sample(&mut rng)));
            labels.push(c);
        }
    }
    Ok(Blobs { cloud: PointCloud::from_flat(coords, dim, Metric::Euclidean)?, classes: labels })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MulticlassRun {
    pub alpha: f64,
    pub trial: usize,
    pub accuracy: f64,
}

// Blob geometry: centres 3 apart from the origin, unit spread.
const BLOB_RADIUS: f64 = 3.0;
const BLOB_SPREAD: f64 = 1.0;

/// One-vs-rest on a symmetrised k-NN graph with Gaussian (5th neighbour)
/// weights and self-tuning exponent alpha.
///
/// Data are Gaussian blobs (`n` points split over `classes`, fresh per trial)
/// or, with `idx_images`/`idx_labels`, an IDX dataset shared by all trials.
/// Each trial draws `labels_per_class` labeled points per class. Returns one
/// [`ClassificationResult`] per alpha (accuracy over unlabeled points) and
/// writes `multiclass_summary.csv` plus `multiclass_predictions.csv` for
/// trial 0 of the first alpha.
pub fn run_multiclass(config: &ExperimentConfig) -> Result<(Vec<ClassificationResult>, Vec<MulticlassRun>)> {
    config.validate()?;
    let shared = match (&config.idx_images, &config.idx_labels) {
        (Some(images), Some(labels)) => {
            let (cloud, classes) = ingest_idx(images, labels, config.idx_limit)?;
            Some(Blobs { cloud, classes })
        }
        _ => None,
    };
    let classes = match &shared {
        Some(b) => b.classes.iter().max().map_or(0, |m| m + 1),
        None => config.classes,
    };
    let jobs: Vec<(usize, usize)> =
        (0..config.trials).flat_map(|t| (0..config.alphas.len()).map(move |a| (t, a))).collect();
    let outcomes: Vec<(MulticlassRun, Option<(MulticlassOutput, Vec<usize>)>)> = jobs
        .par_iter()
        .map(|&(trial, a)| {
            let alpha = config.alphas[a];
            let data = match &shared {
                Some(b) => b.clone(),
                None => gaussian_blobs(
                    classes,
                    (config.n / classes.max(1)).max(1),
                    config.dim.max(2),
                    BLOB_RADIUS,
                    BLOB_SPREAD,
                    config.seed,
                    trial as u64,
                )?,
            };
            let labels = draw_labels(&data.classes, classes, config.labels_per_class, config.seed, trial)?;
            let graph = knn_self_tuning_weights(&data.cloud, config.knn, alpha, KnnWeightRule::Gaussian5th)?;
            let out = one_vs_rest(&graph, &labels, classes, &config.solver.options())?;
            let labeled: Vec<bool> = {
                let mut m = vec![false; data.classes.len()];
                labels.iter().for_each(|&(i, _)| m[i] = true);
                m
            };
            let unlabeled = labeled.iter().filter(|&&l| !l).count();
            let correct =
                (0..data.classes.len()).filter(|&i| !labeled[i] && out.predictions[i] == data.classes[i]).count();
            let run = MulticlassRun { alpha, trial, accuracy: correct as f64 / unlabeled.max(1) as f64 };
            let keep = (trial == 0 && a == 0).then_some((out, data.classes));
            Ok((run, keep))
        })
        .collect::<Result<_>>()?;

    let runs: Vec<MulticlassRun> = outcomes.iter().map(|o| o.0.clone()).collect();
    let results: Vec<ClassificationResult> = config
        .alphas
        .iter()
        .map(|&alpha| {
            ClassificationResult::new(
                alpha,
                None,
                runs.iter().filter(|r| r.alpha == alpha).map(|r| r.accuracy).collect(),
            )
        })
        .collect();
    if let Some(dir) = &config.output_dir {
        let path = output_file(dir, "multiclass_summary.csv")?;
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["alpha", "trials", "mean", "std", "min", "max"])?;
        for r in &results {
            w.write_record([
                r.alpha.to_string(),
                r.accuracies.len().to_string(),
                r.mean.to_string(),
                r.std.to_string(),
                r.min.to_string(),
                r.max.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        if let Some((out, truth)) = outcomes.into_iter().find_map(|o| o.1) {
            let path = output_file(dir, "multiclass_predictions.csv")?;
            write_multiclass_csv(&out, Some(&truth), create(&path)?)?;
        }
    }
    Ok((results, runs))
}

// `per_class` distinct random members of every class.
fn draw_labels(
    truth: &[usize],
    classes: usize,
    per_class: usize,
    seed: u64,
    trial: usize,
) -> Result<Vec<(usize, usize)>> {
    let mut rng = aux_rng(seed, trial);
    let mut labels = Vec::new();
    for c in 0..classes {
        let members: Vec<usize> = (0..truth.len()).filter(|&i| truth[i] == c).collect();
        if members.is_empty() || per_class == 0 {
            return Err(Error::EmptyClass { class: c });
        }
        let take = per_class.min(members.len());
        labels.extend(index::sample(&mut rng, members.len(), take).into_iter().map(|k| (members[k], c)));
    }
    Ok(labels)
}
