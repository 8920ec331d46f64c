//! Per-block spatial feature vectors from a 4-channel recording.

pub mod beamformer;
pub mod block;
pub mod correlation;
pub mod extract;
pub mod nullformer;
pub mod smooth;

pub use beamformer::f_snr;
pub use block::BlockParams;
pub use correlation::{cross_correlation, doa_to_lag, f_corr};
pub use extract::{assemble_feature, extract_scene, f_phi, f_var, FeatureFrame, CSV_HEADER, FEATURE_DIM};
pub use nullformer::{nullformer_step, side_select, NullformerCalibration, NullformerState};
pub use smooth::smooth_features;
