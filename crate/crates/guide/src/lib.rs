//! Doctest harness for the guide in `book/`.
//!
//! mdbook renders the chapters; this crate makes them *run*. Each chapter is
//! included as rustdoc, so `cargo test --doc -p effortnet-guide` compiles and
//! executes every fenced Rust block in the book. A module per chapter keeps
//! failures attributable to their source file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/cocomo.md")]
pub mod cocomo {}

#[doc = include_str!("../../../book/src/radial-layer.md")]
pub mod radial_layer {}

#[doc = include_str!("../../../book/src/exact-design.md")]
pub mod exact_design {}

#[doc = include_str!("../../../book/src/grnn.md")]
pub mod grnn {}

#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[doc = include_str!("../../../book/src/data-and-splits.md")]
pub mod data_and_splits {}

#[doc = include_str!("../../../book/src/running-experiments.md")]
pub mod running_experiments {}
