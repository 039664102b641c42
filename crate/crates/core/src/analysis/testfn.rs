use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// Smooth function with analytic gradient and Hessian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothTestFunction {
    /// `p . x`
    Linear { p: Vec<f64> },
    /// `p . x + x . Q x / 2` with `Q` symmetric (row-major).
    Quadratic { p: Vec<f64>, q: Vec<Vec<f64>> },
    /// `sum_m a_m sin(2 pi k_m . x + phase_m)`, 1-periodic in every coordinate.
    Trig { terms: Vec<TrigTerm> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub wavevector: Vec<i32>,
    pub phase: f64,
}

impl SmoothTestFunction {
    /// `x_1 + x_1^2` in dimension `d`.
    pub fn x1_plus_x1_squared(d: usize) -> Self {
        let mut p = vec![0.0; d];
        p[0] = 1.0;
        let mut q = vec![vec![0.0; d]; d];
        q[0][0] = 2.0;
        SmoothTestFunction::Quadratic { p, q }
    }

    pub fn dim(&self) -> usize {
        match self {
            SmoothTestFunction::Linear { p } | SmoothTestFunction::Quadratic { p, .. } => p.len(),
            SmoothTestFunction::Trig { terms } => terms.first().map_or(0, |t| t.wavevector.len()),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            SmoothTestFunction::Linear { p } => dot(p, x),
            SmoothTestFunction::Quadratic { p, q } => {
                let qx = matvec(q, x);
                dot(p, x) + 0.5 * dot(x, &qx)
            }
            SmoothTestFunction::Trig { terms } => terms.iter().map(|t| t.amplitude * (t.angle(x)).sin()).sum(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            SmoothTestFunction::Linear { p } => p.clone(),
            SmoothTestFunction::Quadratic { p, q } => matvec(q, x).iter().zip(p).map(|(a, b)| a + b).collect(),
            SmoothTestFunction::Trig { terms } => {
                let mut g = vec![0.0; x.len()];
                for t in terms {
                    let c = t.amplitude * TAU * t.angle(x).cos();
                    for (gi, &k) in g.iter_mut().zip(&t.wavevector) {
                        *gi += c * k as f64;
                    }
                }
                g
            }
        }
    }

    pub fn hessian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = x.len();
        match self {
            SmoothTestFunction::Linear { .. } => vec![vec![0.0; d]; d],
            SmoothTestFunction::Quadratic { q, .. } => q.clone(),
            SmoothTestFunction::Trig { terms } => {
                let mut h = vec![vec![0.0; d]; d];
                for t in terms {
                    let c = -t.amplitude * TAU * TAU * t.angle(x).sin();
                    for i in 0..d {
                        for j in 0..d {
                            h[i][j] += c * (t.wavevector[i] * t.wavevector[j]) as f64;
                        }
                    }
                }
                h
            }
        }
    }

    /// Largest deviation of the analytic gradient and Hessian from central
    /// differences of [`Self::value`] at `x` with step `step`.
    pub fn finite_difference_error(&self, x: &[f64], step: f64) -> f64 {
        let d = x.len();
        let g = self.gradient(x);
        let h = self.hessian(x);
        let at = |dx: &[(usize, f64)]| {
            let mut y = x.to_vec();
            for &(i, s) in dx {
                y[i] += s;
            }
            self.value(&y)
        };
        let mut worst: f64 = 0.0;
        for i in 0..d {
            let fd = (at(&[(i, step)]) - at(&[(i, -step)])) / (2.0 * step);
            worst = worst.max((fd - g[i]).abs());
            for j in 0..d {
                let fd2 = (at(&[(i, step), (j, step)]) - at(&[(i, step), (j, -step)]) - at(&[(i, -step), (j, step)])
                    + at(&[(i, -step), (j, -step)]))
                    / (4.0 * step * step);
                worst = worst.max((fd2 - h[i][j]).abs());
            }
        }
        worst
    }
}

impl TrigTerm {
    fn angle(&self, x: &[f64]) -> f64 {
        TAU * self.wavevector.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>() + self.phase
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}
