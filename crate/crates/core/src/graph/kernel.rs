use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Radial profile `Phi(s)` of the edge kernel, evaluated at `s = |x - y| / h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `Phi(s) = exp(4/3 - 1 / (1 - s^2/4))` for `s < 2`, zero otherwise.
    ///
    /// Smooth (C-infinity), decreasing, `Phi(1) = 1` so `Phi >= 1` on `[0, 1]`,
    /// and identically zero on `[2, inf)`.
    #[default]
    SmoothBump,
    /// `Phi(s) = 1` for `s <= 1`, zero otherwise.
    ///
    /// The comparison allows a few ulps of slack so that points at distance
    /// exactly `h` on a lattice are not dropped by rounding in `|x - y| / h`.
    Indicator,
    /// `Phi(s) = exp(-s^2)` truncated to `s < 2`.
    Gaussian,
}

#[inline]
fn indicator_slack<T: Scalar>() -> T {
    T::epsilon() * T::of(8.0)
}

impl Profile {
    #[inline]
    pub fn eval<T: Scalar>(self, s: T) -> T {
        match self {
            Profile::Indicator => {
                if s <= T::one() + indicator_slack::<T>() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Profile::SmoothBump => {
                if s < T::of(2.0) {
                    let q = T::one() - s * s / T::of(4.0);
                    (T::of(4.0 / 3.0) - T::one() / q).exp()
                } else {
                    T::zero()
                }
            }
            Profile::Gaussian => {
                if s < T::of(2.0) {
                    (-s * s).exp()
                } else {
                    T::zero()
                }
            }
        }
    }

    // Profile on [0, 2] continued from the left at 2, so the quadrature does not
    // see the truncation jump.
    fn inner(self, s: f64) -> f64 {
        match self {
            Profile::Indicator => f64::from(u8::from(s <= 1.0)),
            Profile::SmoothBump if s >= 2.0 => 0.0,
            Profile::SmoothBump => self.eval(s),
            Profile::Gaussian => (-s * s).exp(),
        }
    }

    /// Largest `s` with possibly nonzero `Phi(s)`.
    pub fn support(self) -> f64 {
        match self {
            Profile::Indicator => 1.0,
            Profile::SmoothBump | Profile::Gaussian => 2.0,
        }
    }

    /// `C_Phi = int_{B(0,2)} Phi(|z|) dz` in dimension `d`.
    ///
    /// Closed form (the unit-ball volume) for the indicator, radial
    /// quadrature `d omega_d int_0^2 Phi(r) r^(d-1) dr` otherwise.
    pub fn integral(self, d: usize) -> f64 {
        let omega = unit_ball_volume(d);
        match self {
            Profile::Indicator => omega,
            _ => {
                let radial = simpson(|r| self.inner(r) * r.powi(d as i32 - 1), 0.0, 2.0, 4000);
                d as f64 * omega * radial
            }
        }
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let mut v = [1.0, 2.0];
    if d < 2 {
        return v[d];
    }
    let mut cur = 0.0;
    for k in 2..=d {
        cur = v[k % 2] * 2.0 * std::f64::consts::PI / k as f64;
        v[k % 2] = cur;
    }
    cur
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Radial profile with a bandwidth `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel<T> {
    pub profile: Profile,
    pub bandwidth: T,
}

impl<T: Scalar> Kernel<T> {
    pub fn new(profile: Profile, bandwidth: T) -> Result<Self> {
        if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
            return Err(Error::param(format!("bandwidth must be positive, got {bandwidth}")));
        }
        Ok(Kernel { profile, bandwidth })
    }

    pub fn indicator(bandwidth: T) -> Result<Self> {
        Self::new(Profile::Indicator, bandwidth)
    }

    pub fn smooth_bump(bandwidth: T) -> Result<Self> {
        Self::new(Profile::SmoothBump, bandwidth)
    }

    /// `sigma = Phi(dist / h)`.
    #[inline]
    pub fn weight(&self, dist: T) -> T {
        self.profile.eval(dist / self.bandwidth)
    }

    /// Distance beyond which the weight vanishes.
    pub fn support_radius(&self) -> T {
        let s = match self.profile {
            Profile::Indicator => T::one() + indicator_slack::<T>(),
            p => T::of(p.support()),
        };
        s * self.bandwidth
    }

    pub fn integral(&self, d: usize) -> f64 {
        self.profile.integral(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_bump_constraints() {
        let p = Profile::SmoothBump;
        for i in 0..=1000 {
            let s = i as f64 / 1000.0;
            assert!(p.eval(s) >= 1.0 - 1e-15, "s={s}");
        }
        for s in [2.0f64, 2.1, 3.0, 100.0] {
            assert_eq!(p.eval(s), 0.0);
        }
        assert!((p.eval(1.0f64) - 1.0).abs() < 1e-15);
        assert!(p.eval(1.999f64) >= 0.0 && p.eval(1.999) < 1e-100);
    }

    #[test]
    fn smooth_bump_second_derivative_continuous_at_support_edge() {
        // Central second differences shrink to zero approaching s = 2 from inside.
        let p = Profile::SmoothBump;
        let h = 1e-3;
        let d2 = |s: f64| (p.eval(s + h) - 2.0 * p.eval(s) + p.eval(s - h)) / (h * h);
        assert!(d2(1.98).abs() < 1e-9);
        assert!(d2(1.9).abs() > d2(1.98).abs());
        assert!(d2(2.5) == 0.0);
    }

    #[test]
    fn indicator_values() {
        let k = Kernel::indicator(0.1f64).unwrap();
        assert_eq!(k.weight(0.15), 0.0);
        assert_eq!(k.weight(0.05), 1.0);
        assert_eq!(k.weight(0.1), 1.0);
        let b = Kernel::smooth_bump(0.1f64).unwrap();
        assert_eq!(b.weight(0.21), 0.0);
        assert!(b.weight(0.05) >= 1.0);
    }

    #[test]
    fn bandwidth_must_be_positive() {
        assert!(Kernel::indicator(0.0f64).is_err());
        assert!(Kernel::indicator(-1.0f64).is_err());
    }

    #[test]
    fn unit_ball_volumes() {
        let pi = std::f64::consts::PI;
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - pi).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * pi / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - pi * pi / 2.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_integrals() {
        assert_eq!(Profile::Indicator.integral(2), std::f64::consts::PI);
        // Gaussian in 1D: int_{-2}^{2} exp(-s^2) ds = sqrt(pi) erf(2)
        let erf2 = 0.995_322_265_018_952_7;
        assert!((Profile::Gaussian.integral(1) - std::f64::consts::PI.sqrt() * erf2).abs() < 1e-10);
        // Bump integral agrees between the 1D radial form and a direct Cartesian quadrature in 2D.
        let direct: f64 = {
            let n = 800;
            let h = 4.0 / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let x = -2.0 + (i as f64 + 0.5) * h;
                    let y = -2.0 + (j as f64 + 0.5) * h;
                    s += Profile::SmoothBump.eval((x * x + y * y).sqrt());
                }
            }
            s * h * h
        };
        assert!((Profile::SmoothBump.integral(2) - direct).abs() < 1e-4, "{direct}");
    }
}
