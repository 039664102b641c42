use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::dip_normalization;
use crate::graph::Kernel;
use crate::scalar::Scalar;

/// One-dimensional base density of the pair data `Y_i + Y_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseDensity {
    Uniform {
        lower: f64,
        upper: f64,
    },
    /// Density `A` on `[-1, 1]` with `mu A` on `(-delta, delta)`.
    Dip {
        mu: f64,
        delta: f64,
    },
}

impl BaseDensity {
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            BaseDensity::Uniform { lower, upper } => {
                if (lower..=upper).contains(&y) {
                    1.0 / (upper - lower)
                } else {
                    0.0
                }
            }
            BaseDensity::Dip { mu, delta } => {
                let a = dip_normalization(mu, delta);
                if !(-1.0..=1.0).contains(&y) {
                    0.0
                } else if y.abs() < delta {
                    mu * a
                } else {
                    a
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            BaseDensity::Uniform { lower, upper } => vec![lower, upper],
            BaseDensity::Dip { delta, .. } => vec![-1.0, -delta, delta, 1.0],
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            BaseDensity::Uniform { lower, upper } => (lower, upper),
            BaseDensity::Dip { .. } => (-1.0, 1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            BaseDensity::Uniform { lower, upper } if !(upper > lower) => {
                Err(Error::param(format!("uniform density needs lower < upper, got [{lower}, {upper}]")))
            }
            BaseDensity::Dip { mu, delta } if !(mu > 0.0 && mu <= 1.0 && delta > 0.0 && delta < 1.0) => {
                Err(Error::param(format!("dip density needs mu in (0, 1], delta in (0, 1), got {mu}, {delta}")))
            }
            _ => Ok(()),
        }
    }
}

/// `C_Phi (rho * rho)(z)`, the degree limit for pair-sum data in one dimension.
///
/// The convolution integral is split at every breakpoint of `rho(y)` and
/// `rho(z - y)`, and each piece is integrated with Simpson's rule (exact here,
/// since both factors are piecewise constant).
pub fn pair_density_oracle<T: Scalar>(base: &BaseDensity, kernel: &Kernel<T>, z: f64) -> Result<f64> {
    base.validate()?;
    let (lo, hi) = base.support();
    if !(z > 2.0 * lo && z < 2.0 * hi) {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = base.breakpoints();
    cuts.extend(base.breakpoints().into_iter().map(|b| z - b));
    cuts.retain(|&c| c >= lo && c <= hi);
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let f = |y: f64| base.eval(y) * base.eval(z - y);
    let mut conv = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        // evaluate slightly inside so piece endpoints do not pick up the neighbour's value
        let eps = (b - a) * 1e-12;
        let (fa, fm, fb) = (f(a + eps), f(0.5 * (a + b)), f(b - eps));
        conv += (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    }
    Ok(kernel.integral(1) * conv)
}
