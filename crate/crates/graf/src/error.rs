//! Crate-level error type.
//!
//! Each module defines its own focused error enum; this umbrella type exists
//! for callers (like the CLI) that thread several stages together.

use crate::features::FeatureError;
use crate::space::SpaceError;

/// Any error this crate produces.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Encoding(#[from] crate::encoding::EncodingError),
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
    #[error(transparent)]
    Metric(#[from] crate::metrics::MetricError),
    #[error(transparent)]
    Model(#[from] crate::forest::ModelError),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
    #[error(transparent)]
    Synth(#[from] crate::synth::SynthError),
    #[error(transparent)]
    Search(#[from] crate::search::SearchError),
    #[error(transparent)]
    Harness(#[from] crate::harness::HarnessError),
}
