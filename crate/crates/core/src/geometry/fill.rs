use super::{Metric, PointCloud, SpatialIndex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_PROBES: usize = 50_000_000;

/// Grid estimate of the fill distance `sup_x dist(x, cloud)`.
///
/// The supremum is taken over a regular probe grid of step `resolution`
/// covering the torus (Torus metric) or the cloud's bounding box (Euclidean).
/// Any domain point lies within `resolution * sqrt(d) / 2` of a probe, so the
/// estimate is below the true value by at most that amount.
pub fn fill_distance<T: Scalar>(cloud: &PointCloud<T>, resolution: T) -> Result<T> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if !(resolution > T::zero()) {
        return Err(Error::param("resolution must be positive"));
    }
    let d = cloud.dim();
    let (lo, hi): (Vec<T>, Vec<T>) = match cloud.metric() {
        Metric::Torus => (vec![T::zero(); d], vec![T::one(); d]),
        Metric::Euclidean => {
            let mut lo = vec![T::infinity(); d];
            let mut hi = vec![T::neg_infinity(); d];
            for p in cloud.points() {
                for k in 0..d {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            (lo, hi)
        }
    };
    let steps: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(&a, &b)| {
            let s = ((b - a) / resolution).ceil().to_usize().unwrap_or(0);
            match cloud.metric() {
                // torus probes k * step for k < s cover [0, 1) periodically
                Metric::Torus => s.max(1),
                Metric::Euclidean => s + 1,
            }
        })
        .collect();
    let total = steps
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .filter(|&t| t <= MAX_PROBES)
        .ok_or_else(|| Error::param("fill-distance probe grid too large for this resolution"))?;

    let index = SpatialIndex::for_knn(cloud, 1);
    let mut idx = vec![0usize; d];
    let mut probe = vec![T::zero(); d];
    let mut worst = T::zero();
    for _ in 0..total {
        for k in 0..d {
            let span = hi[k] - lo[k];
            probe[k] = match cloud.metric() {
                Metric::Torus => T::of_usize(idx[k]) / T::of_usize(steps[k]),
                Metric::Euclidean if steps[k] > 1 => lo[k] + span * T::of_usize(idx[k]) / T::of_usize(steps[k] - 1),
                Metric::Euclidean => lo[k],
            };
        }
        let nearest = index.k_nearest_point(&probe, None, 1);
        worst = worst.max(nearest[0].distance);
        for k in 0..d {
            idx[k] += 1;
            if idx[k] < steps[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(worst)
}

/// Fill distance with the default probe resolution `bandwidth / 10`.
pub fn fill_distance_default_resolution<T: Scalar>(cloud: &PointCloud<T>, bandwidth: T) -> Result<T> {
    fill_distance(cloud, bandwidth / T::of(10.0))
}
