//! Normalized, balanced training material built from labeled feature frames.

pub mod compress;
pub mod histogram;
pub mod io;
pub mod normalize;
pub mod sequences;
pub mod split;

pub use compress::compress_frame;
pub use histogram::{class_histogram, ClassHistogram};
pub use io::{deserialize_dataset, serialize_dataset};
pub use normalize::{apply_normalizer, fit_normalizer, NormStats};
pub use sequences::{balance_upsample, frame_sequences, SequenceSample, SequenceSet, StoredFrame};
pub use split::{split_scenes, SceneAssignment};

/// Train/validation/test sequences plus the scenes each came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: SequenceSet,
    pub validation: SequenceSet,
    pub test: SequenceSet,
    pub scenes: SceneAssignment,
}
