//! Graph-based features and tabular predictors for neural architecture benchmarks.
//!
//! The crate covers the full pipeline from raw cell graphs to performance
//! prediction studies:
//!
//! * [`space`] — search-space descriptions, cell graphs, validation,
//!   unreachable-element pruning, and exhaustive enumeration;
//! * [`features`] — interpretable graph features (operation counts, per-subset
//!   path lengths and degree statistics, macro-level cumulative features);
//! * [`encoding`] — baseline one-hot and path encodings;
//! * [`data`] — benchmark datasets (JSONL), feature recipes, and assembly of
//!   model-ready matrices;
//! * [`metrics`] — rank-correlation metrics and grouped correlation reports;
//! * [`forest`] — from-scratch CART trees, random forests, and gradient
//!   boosting with fully deterministic training;
//! * [`analysis`] — redundancy elimination, permutation importance, and
//!   Monte-Carlo Shapley attribution;
//! * [`synth`] — synthetic benchmark generators with known ground truth;
//! * [`search`] — a predictor-guided evolutionary-free search loop plus a
//!   random-search baseline;
//! * [`harness`] — experiment orchestration: train/evaluate sweeps, reports,
//!   and run manifests.
//!
//! Everything that consumes randomness takes an explicit `u64` seed and
//! derives independent ChaCha8 streams from it (see [`seed`]), so all results
//! are reproducible bit-for-bit across runs and platforms.

pub mod analysis;
pub mod data;
pub mod encoding;
pub mod error;
pub mod features;
pub mod forest;
pub mod harness;
pub mod metrics;
pub mod search;
pub mod seed;
pub mod space;
pub mod synth;

pub use error::Error;
