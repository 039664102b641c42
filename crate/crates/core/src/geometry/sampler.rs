//! Random and deterministic point samplers for the experiment distributions.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), a counter-based
//! stream cipher generator: seed it with the 64-bit `seed` and select the
//! stream with `stream`, so independent trials use `(seed, trial)` pairs.
//! Sequences are bit-reproducible within this crate; other implementations
//! using ChaCha8 with the same draw order agree statistically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Metric, PointCloud};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Distribution to draw a point cloud from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// Uniform on the box `[lower, upper]^d` (per-axis bounds broadcast when of length 1).
    UniformBox {
        #[serde(default = "zero_vec")]
        lower: Vec<f64>,
        #[serde(default = "one_vec")]
        upper: Vec<f64>,
    },
    /// Density `A` on `delta <= |x| <= 1`, `mu * A` on `|x| < delta`, over `[-1, 1]`.
    DipDensity1D { mu: f64, delta: f64 },
    /// The dip in the first coordinate on `[-1, 1] x [0, 1]^(d-1)`.
    DipDensityBox { mu: f64, delta: f64 },
    /// Density `1/4 + 3/2 x_1` on the unit box `[0, 1]^d`.
    LinearRamp,
    /// All ordered sums `Y_i + Y_j`, `i != j`, of `m` i.i.d. uniform base draws in `[lower, upper]^d`.
    PairStatistic {
        m: usize,
        #[serde(default)]
        lower: f64,
        #[serde(default = "one")]
        upper: f64,
    },
    /// Regular grid `lower + k (upper - lower) / per_axis`, `k = 0..per_axis`, on each axis.
    DeterministicGrid {
        per_axis: usize,
        #[serde(default)]
        lower: f64,
        #[serde(default = "one")]
        upper: f64,
    },
}

fn zero_vec() -> Vec<f64> {
    vec![0.0]
}
fn one_vec() -> Vec<f64> {
    vec![1.0]
}
fn one() -> f64 {
    1.0
}

/// A distribution plus the RNG seed and stream used to draw from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    #[serde(flatten)]
    pub kind: SamplerKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, seed: u64) -> Self {
        SamplerSpec { kind, seed, stream: 0 }
    }

    /// Same distribution on an independent RNG stream.
    pub fn with_stream(&self, stream: u64) -> Self {
        SamplerSpec { stream, ..self.clone() }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Number of points [`sample`] produces when asked for `n`.
    pub fn point_count(&self, n: usize, dim: usize) -> usize {
        match self.kind {
            SamplerKind::PairStatistic { m, .. } => m * m.saturating_sub(1),
            SamplerKind::DeterministicGrid { per_axis, .. } => per_axis.pow(dim as u32),
            _ => n,
        }
    }
}

/// Normalisation `A = 1 / (2 (delta mu + 1 - delta))` of the dip density.
pub fn dip_normalization(mu: f64, delta: f64) -> f64 {
    1.0 / (2.0 * (delta * mu + 1.0 - delta))
}

fn check_dip(mu: f64, delta: f64) -> Result<()> {
    // mu = 1 is accepted: it is the dip-free reference distribution.
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::param(format!("dip depth mu = {mu} outside (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("dip half-width delta = {delta} outside (0, 1)")));
    }
    Ok(())
}

/// Inverse CDF of the 1D dip density on `[-1, 1]`.
fn dip_inverse_cdf(mu: f64, delta: f64, u: f64) -> f64 {
    let a = dip_normalization(mu, delta);
    let side = a * (1.0 - delta);
    let middle = 2.0 * delta * mu * a;
    if u < side {
        -1.0 + u / a
    } else if u < side + middle {
        -delta + (u - side) / (mu * a)
    } else {
        (delta + (u - side - middle) / a).min(1.0)
    }
}

/// Draws a point cloud of dimension `dim`.
///
/// `n` is the sample size for the i.i.d. kinds; `PairStatistic` and
/// `DeterministicGrid` determine their own size (see [`SamplerSpec::point_count`]).
/// The returned cloud uses the Euclidean metric; re-tag it with
/// [`PointCloud::with_metric`] for torus experiments.
pub fn sample<T: Scalar>(spec: &SamplerSpec, n: usize, dim: usize) -> Result<PointCloud<T>> {
    if dim == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    let mut rng = spec.rng();
    let mut coords: Vec<f64> = Vec::new();
    match &spec.kind {
        SamplerKind::UniformBox { lower, upper } => {
            check_iid(n)?;
            let bound = |v: &Vec<f64>, k: usize| -> Result<f64> {
                match v.len() {
                    1 => Ok(v[0]),
                    l if l == dim => Ok(v[k]),
                    l => Err(Error::param(format!("box bound has {l} entries for dimension {dim}"))),
                }
            };
            let mut lo = Vec::with_capacity(dim);
            let mut hi = Vec::with_capacity(dim);
            for k in 0..dim {
                let (a, b) = (bound(lower, k)?, bound(upper, k)?);
                if !(b > a) {
                    return Err(Error::param(format!("empty box on axis {k}: [{a}, {b}]")));
                }
                lo.push(a);
                hi.push(b);
            }
            coords.reserve(n * dim);
            for _ in 0..n {
                for k in 0..dim {
                    coords.push(lo[k] + (hi[k] - lo[k]) * rng.gen::<f64>());
                }
            }
        }
        SamplerKind::DipDensity1D { mu, delta } => {
            check_iid(n)?;
            check_dip(*mu, *delta)?;
            if dim != 1 {
                return Err(Error::param("DipDensity1D is one-dimensional"));
            }
            coords.extend((0..n).map(|_| dip_inverse_cdf(*mu, *delta, rng.gen::<f64>())));
        }
        SamplerKind::DipDensityBox { mu, delta } => {
            check_iid(n)?;
            check_dip(*mu, *delta)?;
            coords.reserve(n * dim);
            for _ in 0..n {
                coords.push(dip_inverse_cdf(*mu, *delta, rng.gen::<f64>()));
                for _ in 1..dim {
                    coords.push(rng.gen::<f64>());
                }
            }
        }
        SamplerKind::LinearRamp => {
            check_iid(n)?;
            // F(x) = x/4 + 3x^2/4 on [0, 1]; invert the quadratic.
            coords.reserve(n * dim);
            for _ in 0..n {
                let u: f64 = rng.gen();
                coords.push(((1.0 + 48.0 * u).sqrt() - 1.0) / 6.0);
                for _ in 1..dim {
                    coords.push(rng.gen::<f64>());
                }
            }
        }
        SamplerKind::PairStatistic { m, lower, upper } => {
            if *m < 2 {
                return Err(Error::param("PairStatistic needs m >= 2 base samples"));
            }
            if !(upper > lower) {
                return Err(Error::param("PairStatistic base box is empty"));
            }
            let base: Vec<f64> = (0..m * dim).map(|_| lower + (upper - lower) * rng.gen::<f64>()).collect();
            coords.reserve(m * (m - 1) * dim);
            for i in 0..*m {
                for j in 0..*m {
                    if i != j {
                        for k in 0..dim {
                            coords.push(base[i * dim + k] + base[j * dim + k]);
                        }
                    }
                }
            }
        }
        SamplerKind::DeterministicGrid { per_axis, lower, upper } => {
            if *per_axis == 0 || !(upper > lower) {
                return Err(Error::param("grid needs per_axis >= 1 and a nonempty interval"));
            }
            let total = per_axis
                .checked_pow(dim as u32)
                .filter(|&t| t <= 1 << 28)
                .ok_or_else(|| Error::param("grid too large"))?;
            coords.reserve(total * dim);
            let mut idx = vec![0usize; dim];
            for _ in 0..total {
                for &k in &idx {
                    // k / per_axis is correctly rounded, so grid points coincide with decimal literals.
                    coords.push(lower + (upper - lower) * (k as f64 / *per_axis as f64));
                }
                for a in idx.iter_mut() {
                    *a += 1;
                    if *a < *per_axis {
                        break;
                    }
                    *a = 0;
                }
            }
        }
    }
    PointCloud::from_flat(coords.into_iter().map(T::of).collect(), dim, Metric::Euclidean)
}

fn check_iid(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("sample size must be at least 1"))
    } else {
        Ok(())
    }
}
