//! Synthetic acoustic scenes with per-block ground-truth SINR.

pub mod geometry;
pub mod mix;
pub mod propagate;
pub mod signal;
pub mod sinr;
pub mod wav;

pub use geometry::{ArrayGeometry, Side};
pub use mix::{mix_scene, Echo, MixedScene, MultichannelRecording, OracleComponents, SceneSpec};
pub use propagate::propagate_to_array;
pub use signal::{synthesize_source_signal, SourceKind, SourceSignal};
pub use sinr::{label_blocks, oracle_sinr_per_block, DEFAULT_THRESHOLD_DB};
pub use wav::{ingest_wav, write_wav};
