//! Closed-form and independent numerical references.
//!
//! [`OneDModel`] is the two-label problem on `[-1, 1]` with a density dip on
//! `(-delta, delta)`, whose continuum solution is piecewise linear.
//! [`pair_density_oracle`] gives the kernel density limit of pair-sum data.

mod pair;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use pair::{pair_density_oracle, BaseDensity};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Density `A` off the dip and `mu A` on `(-delta, delta)`, labels
/// `u(-x1) = -1` and `u(x2) = 1`, self-tuning exponent `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneDModel<T> {
    pub mu: T,
    pub delta: T,
    pub x1: T,
    pub x2: T,
    pub alpha: T,
}

/// How [`OneDModel::accuracy_quadrature`] integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// Exact integration of each linear piece, zero crossings located from
    /// endpoint values.
    Exact,
    /// Composite Simpson with this many panels per piece, split at the
    /// breakpoints and at the zero crossing (found by bisection).
    Simpson(usize),
}

impl<T: Scalar> OneDModel<T> {
    /// `mu in (0, 1]`, `delta in (0, 1)`, `x1, x2 in [delta, 1]`.
    pub fn new(mu: T, delta: T, x1: T, x2: T, alpha: T) -> Result<Self> {
        let (zero, one) = (T::zero(), T::one());
        if !(mu > zero && mu <= one) {
            return Err(Error::param(format!("mu must lie in (0, 1], got {mu}")));
        }
        if !(delta > zero && delta < one) {
            return Err(Error::param(format!("delta must lie in (0, 1), got {delta}")));
        }
        for (name, x) in [("x1", x1), ("x2", x2)] {
            if !(x >= delta && x <= one) {
                return Err(Error::param(format!("{name} must lie in [delta, 1], got {x}")));
            }
        }
        if !alpha.is_finite() {
            return Err(Error::param("alpha must be finite"));
        }
        Ok(OneDModel { mu, delta, x1, x2, alpha })
    }

    /// Density level off the dip, `A = 1 / (2 (delta mu + 1 - delta))`.
    pub fn a(&self) -> T {
        T::one() / (T::of(2.0) * (self.delta * self.mu + T::one() - self.delta))
    }

    pub fn density(&self, x: T) -> T {
        if x.abs() < self.delta {
            self.mu * self.a()
        } else {
            self.a()
        }
    }

    /// `mu^(-2 alpha)`, the slope ratio between the dip and the outer pieces.
    fn dip_ratio(&self) -> T {
        self.mu.powf(T::of(-2.0) * self.alpha)
    }

    /// Slope off the dip, `m = 2 / (x1 + x2 - 2 delta + 2 delta mu^(-2 alpha))`.
    pub fn slope(&self) -> T {
        let d = self.delta;
        T::of(2.0) / (self.x1 + self.x2 - T::of(2.0) * d + T::of(2.0) * d * self.dip_ratio())
    }

    /// Breakpoints `-x1 <= -delta <= delta <= x2` of the profile.
    pub fn breakpoints(&self) -> [T; 4] {
        [-self.x1, -self.delta, self.delta, self.x2]
    }

    /// Continuum solution at `x in [-1, 1]`.
    pub fn eval_u_alpha(&self, x: T) -> Result<T> {
        if !(x >= -T::one() && x <= T::one()) {
            return Err(Error::param(format!("x = {x} outside [-1, 1]")));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: T) -> T {
        let m = self.slope();
        let (d, one) = (self.delta, T::one());
        if x <= -self.x1 {
            -one
        } else if x <= -d {
            -one + m * (x + self.x1)
        } else if x <= d {
            -one + m * (self.x1 - d) + self.dip_ratio() * m * (x + d)
        } else if x <= self.x2 {
            one - m * (self.x2 - x)
        } else {
            one
        }
    }

    /// Fraction of `[-1, 1]` where `sign(u)` matches `sign(x)`, closed form.
    pub fn closed_form_accuracy(&self) -> T {
        let gap = (self.x2 - self.x1).abs();
        let dip = T::of(2.0) * self.delta * self.dip_ratio();
        let quarter = T::of(0.25);
        if dip <= gap {
            T::one() - T::of(0.5) * self.delta - quarter * (gap - dip)
        } else {
            T::one() - quarter * self.mu.powf(T::of(2.0) * self.alpha) * gap
        }
    }

    /// Same quantity as [`Self::closed_form_accuracy`], by integrating the
    /// indicator of correct classification over `[-1, 1]` using
    /// [`Self::eval_u_alpha`] only.
    pub fn accuracy_quadrature(&self, method: Quadrature) -> T {
        let mut cuts: Vec<T> = vec![-T::one(), T::zero(), T::one()];
        cuts.extend(self.breakpoints());
        cuts.sort_by(crate::scalar::cmp);
        cuts.dedup();
        let mut correct = T::zero();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            // the true class is constant on each piece because 0 is a cut
            let positive = a >= T::zero();
            correct += match method {
                Quadrature::Exact => self.correct_measure_exact(a, b, positive),
                Quadrature::Simpson(panels) => self.correct_measure_simpson(a, b, positive, panels.max(2)),
            };
        }
        correct / T::of(2.0)
    }

    fn correct_measure_exact(&self, a: T, b: T, positive: bool) -> T {
        let (ua, ub) = (self.eval_unchecked(a), self.eval_unchecked(b));
        let (ua, ub) = if positive { (ua, ub) } else { (-ua, -ub) };
        // measure of {t in [a, b] : u(t) > 0} for linear u on the piece
        match (ua > T::zero(), ub > T::zero()) {
            (true, true) => b - a,
            (false, false) => T::zero(),
            (true, false) => (b - a) * ua / (ua - ub),
            (false, true) => (b - a) * ub / (ub - ua),
        }
    }

    fn correct_measure_simpson(&self, a: T, b: T, positive: bool, panels: usize) -> T {
        let sign = if positive { T::one() } else { -T::one() };
        let good = |t: T| if sign * self.eval_unchecked(t) > T::zero() { T::one() } else { T::zero() };
        let (fa, fb) = (sign * self.eval_unchecked(a), sign * self.eval_unchecked(b));
        let mut pieces = vec![(a, b)];
        if (fa > T::zero()) != (fb > T::zero()) {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..200 {
                let mid = (lo + hi) / T::of(2.0);
                if (sign * self.eval_unchecked(mid) > T::zero()) == (fa > T::zero()) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = (lo + hi) / T::of(2.0);
            pieces = vec![(a, root), (root, b)];
        }
        pieces
            .into_iter()
            .map(|(p, q)| {
                // evaluate the indicator strictly inside the piece, where it is constant
                let n = panels + panels % 2;
                let h = (q - p) / T::of_usize(n);
                let eps = h * T::of(1e-9);
                let mut s = good(p + eps) + good(q - eps);
                for i in 1..n {
                    let w = if i % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
                    s += w * good(p + T::of_usize(i) * h);
                }
                s * h / T::of(3.0)
            })
            .sum()
    }

    /// Samples the profile at `points` evenly spaced `x` in `[-1, 1]`.
    pub fn profile(&self, points: usize) -> Vec<(T, T)> {
        let points = points.max(2);
        (0..points)
            .map(|k| {
                let x = -T::one() + T::of(2.0) * T::of_usize(k) / T::of_usize(points - 1);
                (x, self.eval_unchecked(x))
            })
            .collect()
    }
}

/// Writes `x,u_alpha` rows.
pub fn write_profile_csv<T: Scalar, W: Write>(profile: &[(T, T)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "u_alpha"])?;
    for (x, u) in profile {
        w.write_record([x.to_string(), u.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Independent solution of the one-dimensional model on `grid_n` evenly
/// spaced points of `[-1, 1]`.
///
/// Imposes equal `f^(2 alpha) |u'|` on the three inner intervals and
/// `u(x2) - u(-x1) = 2` as a linear system in the three slopes, solved by
/// Gaussian elimination, then integrates the slopes from `u(-x1) = -1`.
pub fn variational_grid_oracle<T: Scalar>(model: &OneDModel<T>, grid_n: usize) -> Result<Vec<(T, T)>> {
    if grid_n < 100 {
        return Err(Error::param(format!("grid needs at least 100 points, got {grid_n}")));
    }
    let d = model.delta;
    if model.x1 == d || model.x2 == d {
        return Err(Error::DegenerateModel("a label sits on the dip edge, leaving an empty interval".into()));
    }
    let two_alpha = T::of(2.0) * model.alpha;
    let fa = model.a().powf(two_alpha);
    let fd = (model.mu * model.a()).powf(two_alpha);
    let mut sys = [
        [T::one(), T::zero(), -T::one(), T::zero()],
        [fa, -fd, T::zero(), T::zero()],
        [model.x1 - d, T::of(2.0) * d, model.x2 - d, T::of(2.0)],
    ];
    let s = solve3(&mut sys)?;
    let at = |x: T| -> T {
        let one = T::one();
        if x <= -model.x1 {
            -one
        } else if x <= -d {
            -one + s[0] * (x + model.x1)
        } else if x <= d {
            -one + s[0] * (model.x1 - d) + s[1] * (x + d)
        } else if x <= model.x2 {
            -one + s[0] * (model.x1 - d) + s[1] * T::of(2.0) * d + s[2] * (x - d)
        } else {
            one
        }
    };
    Ok((0..grid_n)
        .map(|k| {
            let x = -T::one() + T::of(2.0) * T::of_usize(k) / T::of_usize(grid_n - 1);
            (x, at(x))
        })
        .collect())
}

// Gaussian elimination with partial pivoting on an augmented 3x4 system.
fn solve3<T: Scalar>(m: &mut [[T; 4]; 3]) -> Result<[T; 3]> {
    for col in 0..3 {
        let pivot =
            (col..3).max_by(|&a, &b| crate::scalar::cmp(&m[a][col].abs(), &m[b][col].abs())).expect("nonempty range");
        if m[pivot][col].abs() < T::of(1e-300) {
            return Err(Error::DegenerateModel("singular slope system".into()));
        }
        m.swap(col, pivot);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    let mut x = [T::zero(); 3];
    for r in (0..3).rev() {
        let mut acc = m[r][3];
        for c in r + 1..3 {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    Ok(x)
}
