use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use lipschitz_core::graph::Profile;
use lipschitz_core::harness::{self, Experiment, ExperimentConfig, Level};
use lipschitz_core::Error;

/// Lipschitz learning experiments on random geometric graphs.
#[derive(Debug, Parser)]
#[command(name = "lipschitz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learned surface on the unit square with two labels.
    Surface2d(Common),
    /// One-dimensional dip model against its closed-form solution.
    Oracle1d(Common),
    /// Dip-density classification accuracy over alpha and mu.
    Classify(Common),
    /// Graph operator against the continuum operator on torus grids.
    Consistency(Common),
    /// Degree (kernel density) error on the torus.
    Kde(Common),
    /// One-vs-rest classification on blobs or an IDX dataset.
    Multiclass(MulticlassArgs),
    /// Convert an IDX image/label pair to CSV.
    IngestIdx(IngestArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a named parameter set instead of the subcommand default.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Unlabeled sample size.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Self-tuning exponents (comma separated).
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Dip strengths (comma separated).
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    #[arg(long)]
    delta: Option<f64>,
    /// Kernel bandwidth h.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// smooth_bump, indicator or gaussian.
    #[arg(long)]
    kernel: Option<String>,
    /// Refinement levels as n:h pairs (comma separated), e.g. 4000:0.05,16000:0.03.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<String>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Solve from the default start only (no coarse warm start).
    #[arg(long)]
    no_multilevel: bool,
    /// Directory for CSV (and SVG) output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG figures.
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Args)]
struct MulticlassArgs {
    #[command(flatten)]
    common: Common,
    /// IDX image file (use with --labels).
    #[arg(long, requires = "labels")]
    images: Option<PathBuf>,
    /// IDX label file.
    #[arg(long, requires = "images")]
    labels: Option<PathBuf>,
    /// Keep at most this many images.
    #[arg(long)]
    limit: Option<usize>,
    /// Number of blob classes.
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    labels_per_class: Option<usize>,
    /// Nearest neighbours per vertex.
    #[arg(long)]
    knn: Option<usize>,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    limit: Option<usize>,
    /// Output directory for points.csv and labels.csv.
    #[arg(long)]
    out: PathBuf,
}

fn default_preset(experiment: Experiment) -> &'static str {
    match experiment {
        Experiment::Surface2d => "surface-uniform",
        Experiment::Oracle1d => "oracle1d",
        Experiment::SynthClassify => "fig4",
        Experiment::ConsistencySweep => "consistency",
        Experiment::KdeSweep => "kde",
        Experiment::MultiClass => "blobs",
    }
}

fn parse_profile(name: &str) -> Result<Profile> {
    Ok(match name {
        "smooth_bump" | "bump" => Profile::SmoothBump,
        "indicator" => Profile::Indicator,
        "gaussian" => Profile::Gaussian,
        other => bail!("unknown kernel '{other}' (smooth_bump, indicator, gaussian)"),
    })
}

fn parse_level(s: &str) -> Result<Level> {
    let (n, h) = s.split_once(':').with_context(|| format!("level '{s}' is not of the form n:h"))?;
    Ok(Level { n: n.trim().parse().context("level n")?, h: h.trim().parse().context("level h")? })
}

fn resolve(common: &Common, experiment: Experiment) -> Result<ExperimentConfig> {
    let mut cfg = match (&common.config, &common.preset) {
        (Some(path), _) => ExperimentConfig::from_path(path)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => ExperimentConfig::preset(default_preset(experiment))?,
    };
    if common.config.is_some() && cfg.experiment != experiment {
        bail!("config describes experiment {:?}, not {:?}", cfg.experiment, experiment);
    }
    cfg.experiment = experiment;
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.trials {
        cfg.trials = v;
    }
    if let Some(v) = common.n {
        cfg.n = v;
    }
    if let Some(v) = common.dim {
        cfg.dim = v;
    }
    if let Some(v) = &common.alpha {
        cfg.alphas = v.clone();
    }
    if let Some(v) = &common.mu {
        cfg.mu_values = v.clone();
    }
    if let Some(v) = common.delta {
        cfg.delta = v;
    }
    if let Some(h) = common.bandwidth {
        cfg.kernel.bandwidth = h;
    }
    if let Some(k) = &common.kernel {
        cfg.kernel.profile = parse_profile(k)?;
    }
    if let Some(levels) = &common.levels {
        cfg.levels = levels.iter().map(|s| parse_level(s)).collect::<Result<_>>()?;
    }
    if let Some(v) = common.tol {
        cfg.solver.tol = v;
    }
    if let Some(v) = common.max_iter {
        cfg.solver.max_iter = v;
    }
    if common.no_multilevel {
        cfg.solver.multilevel = false;
    }
    if common.out.is_some() {
        cfg.output_dir = common.out.clone();
    }
    cfg.svg |= common.svg;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Surface2d(c) => {
            let out = harness::run_surface2d(&resolve(&c, Experiment::Surface2d)?)?;
            println!("alpha,mean_u,iterations");
            for r in &out.runs {
                println!("{},{:.6},{}", r.alpha, r.mean_u, r.iterations);
            }
        }
        Command::Oracle1d(c) => {
            let cfg = resolve(&c, Experiment::Oracle1d)?;
            let out = harness::run_oracle1d_validation(&cfg)?;
            println!("n,h,alpha,mu,median_sup_error,mean_accuracy_gap");
            for level in cfg.levels() {
                for &mu in &cfg.mu_values {
                    for &alpha in &cfg.alphas {
                        println!(
                            "{},{},{},{},{:.6},{:.6}",
                            level.n,
                            level.h,
                            alpha,
                            mu,
                            out.median_sup_error(level.n, level.h, alpha, mu),
                            out.mean_accuracy_gap(level.n, level.h, alpha, mu)
                        );
                    }
                }
            }
        }
        Command::Classify(c) => {
            let out = harness::run_synth_classify(&resolve(&c, Experiment::SynthClassify)?)?;
            println!("alpha,mu,mean,std,min,max");
            for r in &out.results {
                println!(
                    "{},{},{:.4},{:.4},{:.4},{:.4}",
                    r.alpha,
                    r.mu.unwrap_or(f64::NAN),
                    r.mean,
                    r.std,
                    r.min,
                    r.max
                );
            }
        }
        Command::Consistency(c) => {
            let out = harness::run_consistency_sweep(&resolve(&c, Experiment::ConsistencySweep)?)?;
            println!("h,discrete,continuum,error");
            for r in &out.levels {
                let err = r.error.map(|e| format!("{e:.6}")).unwrap_or_default();
                println!("{},{:.6},{:.6},{}", r.h, r.discrete, r.continuum, err);
            }
            let judged = out.sign_trials.iter().filter(|t| t.agrees.is_some()).count();
            let agree = out.sign_trials.iter().filter(|t| t.agrees == Some(true)).count();
            if !out.sign_trials.is_empty() {
                println!("sign trials: {agree}/{judged} agree ({} not judged)", out.sign_trials.len() - judged);
            }
        }
        Command::Kde(c) => {
            let cfg = resolve(&c, Experiment::KdeSweep)?;
            let out = harness::run_kde_sweep(&cfg)?;
            println!("n,h,median_r_n_over_c_phi");
            for l in cfg.levels() {
                println!("{},{},{:.6}", l.n, l.h, out.median_r_n(l.n, l.h));
            }
        }
        Command::Multiclass(m) => {
            let mut cfg = resolve(&m.common, Experiment::MultiClass)?;
            cfg.idx_images = m.images;
            cfg.idx_labels = m.labels;
            if m.limit.is_some() {
                cfg.idx_limit = m.limit;
            }
            if let Some(c) = m.classes {
                cfg.classes = c;
            }
            if let Some(l) = m.labels_per_class {
                cfg.labels_per_class = l;
            }
            if let Some(k) = m.knn {
                cfg.knn = k;
            }
            cfg.validate()?;
            let (results, _) = harness::run_multiclass(&cfg)?;
            println!("alpha,mean,std,min,max");
            for r in &results {
                println!("{},{:.4},{:.4},{:.4},{:.4}", r.alpha, r.mean, r.std, r.min, r.max);
            }
        }
        Command::IngestIdx(a) => {
            let (cloud, labels) = harness::ingest_idx(&a.images, &a.labels, a.limit)?;
            std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
            cloud.write_csv_path(a.out.join("points.csv"))?;
            let labels_csv: String = std::iter::once("class".to_string())
                .chain(labels.iter().map(|c| c.to_string()))
                .collect::<Vec<_>>()
                .join("\n");
            std::fs::write(a.out.join("labels.csv"), labels_csv + "\n")
                .with_context(|| format!("writing {}", a.out.join("labels.csv").display()))?;
            println!("{} images of dimension {}", cloud.len(), cloud.dim());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::NotConverged { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
