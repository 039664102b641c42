use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positive density with analytic log-gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityModel {
    Constant {
        value: f64,
    },
    /// Level `level` with a dip to `mu * level` along the first axis around
    /// `center`. The dip is flat on `|x_1 - center| <= delta - width` and
    /// leaves through a quintic (C^2) ramp ending at `delta + width`.
    /// Distances wrap when `periodic` is set.
    SmoothDip {
        level: f64,
        mu: f64,
        delta: f64,
        width: f64,
        center: f64,
        periodic: bool,
    },
    /// `level (1 + amplitude sin(2 pi k . x))`, `|amplitude| < 1`.
    Trig {
        level: f64,
        amplitude: f64,
        wavevector: Vec<i32>,
    },
}

impl DensityModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DensityModel::Constant { value } => *value > 0.0,
            DensityModel::SmoothDip { level, mu, delta, width, .. } => {
                *level > 0.0 && *mu > 0.0 && *mu <= 1.0 && *width > 0.0 && *delta >= *width
            }
            DensityModel::Trig { level, amplitude, .. } => *level > 0.0 && amplitude.abs() < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("density is not bounded away from zero: {self:?}")))
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            DensityModel::Constant { value } => *value,
            DensityModel::SmoothDip { level, mu, .. } => {
                let (s, _) = self.dip_profile(x[0]);
                level * (1.0 - (1.0 - mu) * s)
            }
            DensityModel::Trig { level, amplitude, wavevector } => {
                level * (1.0 + amplitude * angle(wavevector, x).sin())
            }
        }
    }

    pub fn log_gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        match self {
            DensityModel::Constant { .. } => {}
            DensityModel::SmoothDip { mu, .. } => {
                let (s, ds) = self.dip_profile(x[0]);
                g[0] = -(1.0 - mu) * ds / (1.0 - (1.0 - mu) * s);
            }
            DensityModel::Trig { amplitude, wavevector, .. } => {
                let a = angle(wavevector, x);
                let c = amplitude * TAU * a.cos() / (1.0 + amplitude * a.sin());
                for (gi, &k) in g.iter_mut().zip(wavevector) {
                    *gi = c * k as f64;
                }
            }
        }
        g
    }

    // Dip indicator S in [0, 1] and its derivative along the first axis.
    fn dip_profile(&self, x1: f64) -> (f64, f64) {
        let DensityModel::SmoothDip { delta, width, center, periodic, .. } = *self else {
            return (0.0, 0.0);
        };
        let mut t = x1 - center;
        if periodic {
            t -= t.round();
        }
        let r = t.abs();
        let (inner, outer) = (delta - width, delta + width);
        if r <= inner {
            (1.0, 0.0)
        } else if r >= outer {
            (0.0, 0.0)
        } else {
            // quintic smoothstep from 1 at `inner` to 0 at `outer`
            let z = (r - inner) / (outer - inner);
            let s = 1.0 - z * z * z * (10.0 - 15.0 * z + 6.0 * z * z);
            let dz = -30.0 * z * z * (1.0 - z) * (1.0 - z) / (outer - inner);
            (s, dz * t.signum())
        }
    }
}

fn angle(k: &[i32], x: &[f64]) -> f64 {
    TAU * k.iter().zip(x).map(|(&k, &x)| k as f64 * x).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dip() -> DensityModel {
        DensityModel::SmoothDip { level: 1.0, mu: 0.3, delta: 0.15, width: 0.05, center: 0.5, periodic: true }
    }

    #[test]
    fn log_gradient_matches_finite_difference() {
        let models = [
            dip(),
            DensityModel::Trig { level: 2.0, amplitude: 0.4, wavevector: vec![1, 2] },
            DensityModel::Constant { value: 3.0 },
        ];
        for m in &models {
            m.validate().unwrap();
            for i in 0..200 {
                let x = [i as f64 / 200.0 + 1e-3, 0.37];
                let g = m.log_gradient(&x);
                for k in 0..2 {
                    let mut a = x;
                    let mut b = x;
                    a[k] += 1e-6;
                    b[k] -= 1e-6;
                    let fd = (m.value(&a).ln() - m.value(&b).ln()) / 2e-6;
                    assert!((fd - g[k]).abs() < 1e-5, "{m:?} {x:?} {fd} {}", g[k]);
                }
            }
        }
    }

    #[test]
    fn dip_levels_and_smoothness() {
        let m = dip();
        assert!((m.value(&[0.5, 0.0]) - 0.3).abs() < 1e-15);
        assert_eq!(m.value(&[0.0, 0.0]), 1.0);
        assert_eq!(m.value(&[0.99, 0.0]), 1.0);
        // second differences stay bounded across the ramp ends (C^2, no kinks)
        let h = 1e-4;
        for &e in &[0.3, 0.4, 0.6, 0.7] {
            let d2 = (m.value(&[e + h]) - 2.0 * m.value(&[e]) + m.value(&[e - h])) / (h * h);
            assert!(d2.abs() < 1e3);
        }
        // periodic wrap: centre at 0 behaves symmetrically across the seam
        let w = DensityModel::SmoothDip { level: 1.0, mu: 0.5, delta: 0.1, width: 0.05, center: 0.0, periodic: true };
        assert!((w.value(&[0.02]) - w.value(&[0.98])).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(DensityModel::Constant { value: 0.0 }.validate().is_err());
        assert!(DensityModel::Trig { level: 1.0, amplitude: 1.0, wavevector: vec![1] }.validate().is_err());
        assert!(DensityModel::SmoothDip {
            level: 1.0,
            mu: 0.5,
            delta: 0.01,
            width: 0.05,
            center: 0.0,
            periodic: false
        }
        .validate()
        .is_err());
    }
}
