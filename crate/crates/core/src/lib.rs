//! Lipschitz learning on point clouds.
//!
//! Builds self-tuning kernel graphs from samples, solves the graph
//! infinity-Laplacian with labels as boundary data, and checks the results
//! against closed-form and continuum references.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod instances;
pub mod oracle;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Metric, PointCloud};
pub use graph::{Kernel, Profile, WeightedGraph};
pub use oracle::OneDModel;
pub use scalar::Scalar;
pub use solver::{solve, Init, LabelProblem, Solution, SolveOptions};

pub type PointCloud64 = PointCloud<f64>;
pub type PointCloud32 = PointCloud<f32>;
pub type WeightedGraph64 = WeightedGraph<f64>;
pub type WeightedGraph32 = WeightedGraph<f32>;
pub type Solution64 = Solution<f64>;
pub type OneDModel64 = OneDModel<f64>;
