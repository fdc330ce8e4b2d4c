//! Semi-supervised cluster growing from sparse seed labels.
//!
//! Each seeded cluster is summarised by a [`PerceptionModel`]: the median of
//! its members, and a kernel over the Euclidean distance to that median that
//! estimates how many times a point at that distance is expected to occur.
//! Points expected less than once are anomalies. [`run`] repeatedly ejects
//! anomalies from each cluster and absorbs accepted points from the pool.

pub mod engine;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod io;
pub mod perception;
pub mod synth;
pub mod types;

pub use engine::{
    assign_new, order_clusters, run, ClusterAssignment, ClusterStats, Convergence, RunReport,
    SeedAssignment, DEFAULT_MAX_ITERATIONS,
};
pub use error::{Error, Result};
pub use evaluation::{cluster_recovery, evaluate, ClassScore, EvalReport};
pub use geometry::{coordinate_median, euclidean_distance, mean_squared_deviation};
pub use perception::{Fit, PerceptionModel, Verdict};
pub use synth::{benchmark, gen_1d, gen_2d, sample_seeds, Bench, BenchmarkSpec};
pub use types::{ClusterId, Dataset, FeatureVector, Label};
