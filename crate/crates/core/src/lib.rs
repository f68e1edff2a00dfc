//! Half-space proximal (HSP) neighborhoods and the parameter-free
//! instance-based classifiers built on them.
//!
//! The HSP test picks the nearest candidate to a query, discards every
//! candidate that lies strictly closer to that pick than to the query, and
//! repeats until nothing is left. The surviving set is small, close to the
//! query and spread out in direction, and its size is not a parameter.
//!
//! Modules:
//!
//! - [`metric`]: vectors, labeled datasets, the Euclidean kernel
//! - [`hsp`]: the HSP test, HSP graphs and checks of their graph properties
//! - [`knn`]: exact k-nearest-neighbor search
//! - [`index`]: a layered small-world graph index for approximate k-NN
//! - [`classify`]: kNN, probabilistic kNN, HSP, asymptotic HSP and
//!   probabilistic asymptotic HSP classifiers under majority, Dudani and
//!   inverse-distance voting
//! - [`bench`]: fvecs/labels/CSV ingestion, synthetic data, k-sweep runner

pub mod bench;
pub mod classify;
pub mod error;
pub mod hsp;
pub mod index;
pub mod knn;
pub mod metric;

pub use classify::{ClassifierKind, ClassifierSpec, Prediction, VoteRule};
pub use error::{Error, Result};
pub use hsp::{build_hsp_graph, hsp_neighbors, HspGraph, Neighbor, Neighborhood};
pub use index::{IndexParams, SmallWorldIndex};
pub use knn::{knn_search, KnnResult};
pub use metric::{distance, FeatureVector, LabeledDataset};
