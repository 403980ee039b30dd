//! Semi-supervised federated multi-label feature selection.
//!
//! Clients hold unlabeled shards and share only fuzzy similarity relations of
//! their normalized features; a server with a small labeled set scores every
//! feature's relevance and redundancy and ranks features with a weighted
//! PageRank over the feature graph. The crate also contains the data loaders,
//! the non-IID partitioner, an MLKNN evaluator and the cost model.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod experiment;
pub mod federation;
pub mod fuzzy;
pub mod graph;
pub mod matrix;
pub mod presets;
pub mod relevance;
pub mod synthetic;

pub use error::{Error, ErrorKind, Result};
pub use exec::Execution;
pub use matrix::Matrix;
