//! Point clouds, metrics, samplers and neighbour search.
//!
//! A [`PointCloud`] stores `n` points of dimension `d` contiguously. Distances
//! are either Euclidean or measured on the flat torus `R^d / Z^d`, where each
//! coordinate difference is wrapped to `min(|dx|, 1 - |dx|)`.

mod fill;
mod index;
mod sampler;

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use fill::{fill_distance, fill_distance_default_resolution};
pub use index::{Neighbor, SpatialIndex};
pub use sampler::{dip_normalization, sample, SamplerKind, SamplerSpec};

/// Distance used between points of a cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    /// Flat torus `R^d / Z^d`; coordinates live in `[0, 1)`.
    Torus,
}

impl Metric {
    /// Signed displacement `b - a` in the metric's local chart.
    ///
    /// On the torus this is the minimal-image displacement, each component in
    /// `[-1/2, 1/2]`.
    #[inline]
    pub fn delta<T: Scalar>(self, a: T, b: T) -> T {
        let d = b - a;
        match self {
            Metric::Euclidean => d,
            Metric::Torus => {
                let half = T::of(0.5);
                if d > half {
                    d - T::one()
                } else if d < -half {
                    d + T::one()
                } else {
                    d
                }
            }
        }
    }

    /// Absolute per-coordinate separation.
    #[inline]
    pub fn coord_gap<T: Scalar>(self, a: T, b: T) -> T {
        let d = (a - b).abs();
        match self {
            Metric::Euclidean => d,
            Metric::Torus => d.min(T::one() - d),
        }
    }

    /// Squared distance between two coordinate slices.
    #[inline]
    pub fn dist2<T: Scalar>(self, a: &[T], b: &[T]) -> T {
        let mut s = T::zero();
        for (&x, &y) in a.iter().zip(b) {
            let g = self.coord_gap(x, y);
            s += g * g;
        }
        s
    }

    #[inline]
    pub fn dist<T: Scalar>(self, a: &[T], b: &[T]) -> T {
        self.dist2(a, b).sqrt()
    }
}

/// Immutable set of `d`-dimensional points with an associated metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    coords: Vec<T>,
    dim: usize,
    metric: Metric,
}

impl<T: Scalar> PointCloud<T> {
    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(coords: Vec<T>, dim: usize, metric: Metric) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dimension must be positive"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { index: coords.len() / dim, got: coords.len() % dim, expected: dim });
        }
        let cloud = PointCloud { coords, dim, metric };
        cloud.check_metric_domain()?;
        Ok(cloud)
    }

    /// Builds a cloud from a list of points, each with exactly `dim` coordinates.
    pub fn new(points: Vec<Vec<T>>, dim: usize, metric: Metric) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { index, got: p.len(), expected: dim });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(coords, dim, metric)
    }

    fn check_metric_domain(&self) -> Result<()> {
        if self.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("non-finite coordinate"));
        }
        if self.metric == Metric::Torus {
            if let Some(pos) = self.coords.iter().position(|&c| c < T::zero() || c >= T::one()) {
                return Err(Error::param(format!(
                    "torus coordinate {} of point {} outside [0, 1)",
                    self.coords[pos],
                    pos / self.dim
                )));
            }
        }
        Ok(())
    }

    /// Re-interprets the same coordinates under another metric.
    pub fn with_metric(self, metric: Metric) -> Result<Self> {
        Self::from_flat(self.coords, self.dim, metric)
    }

    /// New cloud holding these points followed by `extra` (used to append labeled points).
    pub fn concat(&self, extra: &[Vec<T>]) -> Result<Self> {
        let mut coords = self.coords.clone();
        for (k, p) in extra.iter().enumerate() {
            if p.len() != self.dim {
                return Err(Error::DimensionMismatch { index: self.len() + k, got: p.len(), expected: self.dim });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(coords, self.dim, self.metric)
    }

    /// Sub-cloud of the first `n` points.
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.len());
        PointCloud { coords: self.coords[..n * self.dim].to_vec(), dim: self.dim, metric: self.metric }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// Coordinates of point `i`. Panics if out of range.
    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.len() })
        }
    }

    /// Distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> Result<T> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.dist_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn dist_unchecked(&self, i: usize, j: usize) -> T {
        self.metric.dist(self.point(i), self.point(j))
    }

    /// Distance from point `i` to an arbitrary location.
    pub fn distance_to(&self, i: usize, p: &[T]) -> Result<T> {
        self.check_index(i)?;
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { index: i, got: p.len(), expected: self.dim });
        }
        Ok(self.metric.dist(self.point(i), p))
    }

    /// Displacement from point `i` to point `j` in the metric's chart.
    pub fn displacement(&self, i: usize, j: usize) -> Vec<T> {
        self.point(i).iter().zip(self.point(j)).map(|(&a, &b)| self.metric.delta(a, b)).collect()
    }

    /// All `j != i` with `distance(i, j) < radius`, sorted by index.
    pub fn neighbors_within(&self, i: usize, radius: T) -> Result<Vec<Neighbor<T>>> {
        self.check_index(i)?;
        if !(radius > T::zero()) {
            return Err(Error::param("radius must be positive"));
        }
        let index = SpatialIndex::build(self, radius);
        Ok(index.within(i, radius))
    }

    /// The `k` nearest points to `i` (excluding `i`), ascending by distance, ties by index.
    pub fn k_nearest(&self, i: usize, k: usize) -> Result<Vec<Neighbor<T>>> {
        self.check_index(i)?;
        if k >= self.len() {
            return Err(Error::TooFewPoints { k, n: self.len() });
        }
        let index = SpatialIndex::for_knn(self, k);
        Ok(index.k_nearest(i, k))
    }

    /// Writes one CSV row per point, no header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for p in self.points() {
            wtr.write_record(p.iter().map(|c| c.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Reads a CSV with one point per row; a non-numeric first row is treated as a header.
    pub fn read_csv<R: Read>(r: R, metric: Metric) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(r);
        let mut coords = Vec::new();
        let mut dim = 0usize;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<T>, _> = rec.iter().map(|f| f.parse::<T>()).collect();
            let row = match parsed {
                Ok(row) => row,
                Err(_) if line == 0 => continue,
                Err(_) => return Err(Error::Parse { line: line + 1, message: "non-numeric field".into() }),
            };
            if dim == 0 {
                dim = row.len();
            } else if row.len() != dim {
                return Err(Error::Parse {
                    line: line + 1,
                    message: format!("expected {dim} columns, found {}", row.len()),
                });
            }
            coords.extend(row);
        }
        if dim == 0 {
            return Err(Error::EmptyCloud);
        }
        Self::from_flat(coords, dim, metric)
    }

    pub fn read_csv_path(path: impl AsRef<Path>, metric: Metric) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(f), metric)
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}
