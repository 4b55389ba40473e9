//! Software effort estimation toolkit.
//!
//! `effortnet` bundles three effort estimators and the machinery to compare
//! them on historical project data:
//!
//! - [`cocomo`]: the Intermediate COCOMO model with three development modes,
//!   fifteen cost drivers, and the closed-form effort equations.
//! - [`rbnn`]: an exact-design radial basis network, one hidden neuron per
//!   training vector with the second layer solved so every training target is
//!   reproduced.
//! - [`grnn`]: a generalized regression network, the same radial layer with a
//!   second layer that averages stored targets by kernel weight.
//!
//! Supporting modules: [`radial`] (the shared first layer), [`metrics`]
//! (MARE, VARE, BRE, MMRE, Pred), [`dataset`] (CSV ingestion and seeded
//! train/test splits), and [`experiment`] (the end-to-end comparison runner
//! behind the `effortnet` binary).
//!
//! ```
//! use effortnet::cocomo::{estimate_effort, CocomoInput, DevelopmentMode, DriverValues, RatingSet};
//!
//! let input = CocomoInput {
//!     mode: DevelopmentMode::Organic,
//!     size: 10.0,
//!     drivers: DriverValues::Ratings(RatingSet::all_nominal()),
//! };
//! let effort = estimate_effort(&input).unwrap();
//! assert!((effort - 35.9046).abs() < 1e-3);
//! ```
//!
//! A narrative guide with runnable examples lives in the `book/` directory of
//! the repository; its chapters double as doctests via the `effortnet-guide`
//! crate.

pub mod cocomo;
pub mod dataset;
pub mod experiment;
pub mod grnn;
mod linalg;
pub mod metrics;
pub mod radial;
pub mod rbnn;
pub mod report;

pub use cocomo::{CocomoError, DevelopmentMode};
pub use dataset::{Dataset, DatasetError, FeatureEncoding, ProjectRecord, SplitPlan};
pub use experiment::{ExperimentConfig, ExperimentError, ModelKind, RunArtifacts};
pub use grnn::FittedGrnn;
pub use metrics::{EvaluationPair, EvaluationReport, MetricsError};
pub use radial::{RadialError, RadialLayer, Spread};
pub use rbnn::{FittedRbnn, SolveStrategy};
