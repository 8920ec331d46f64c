use crate::features::beamformer;
use crate::features::block::BlockParams;
use crate::features::correlation;
use crate::features::nullformer::{nullformer_step, side_select, NullformerCalibration, NullformerState};
use crate::scene::geometry::ArrayGeometry;
use crate::scene::mix::MultichannelRecording;

pub const FEATURE_DIM: usize = 8;

/// CSV header for frame dumps, in feature-vector order.
pub const CSV_HEADER: &str = "snr,corr,diff_c,diff_s,var1,var3,phi_c,phi_s,label";

/// One block's feature vector. `to_array` stacks the fields in network input order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureFrame {
    pub f_snr: f64,
    pub f_corr: f64,
    pub f_diff: [f64; 2],
    pub f_var: [f64; 2],
    pub f_phi: [f64; 2],
    pub label: bool,
}

impl FeatureFrame {
    pub fn to_array(&self) -> [f64; FEATURE_DIM] {
        [
            self.f_snr,
            self.f_corr,
            self.f_diff[0],
            self.f_diff[1],
            self.f_var[0],
            self.f_var[1],
            self.f_phi[0],
            self.f_phi[1],
        ]
    }

    pub fn csv_row(&self) -> String {
        let v = self.to_array();
        let mut row: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
        row.push(u8::from(self.label).to_string());
        row.join(",")
    }
}

/// Mean-square power of mics 1 and 3 over block `t`.
pub fn f_var(recording: &MultichannelRecording, t: usize, block: &BlockParams) -> [f64; 2] {
    let r = block.range(t);
    let power = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    [power(&recording.channels[0][r.clone()]), power(&recording.channels[2][r])]
}

pub fn f_phi(target_doa: f64) -> [f64; 2] {
    let (s, c) = target_doa.to_radians().sin_cos();
    [c, s]
}

/// Builds the feature vector for block `t`. The nullformer is fed the samples
/// that are new in this block: the whole window for `t == 0`, the last hop
/// afterwards, so it must be driven with consecutive `t`.
pub fn assemble_feature(
    recording: &MultichannelRecording,
    t: usize,
    target_doa: f64,
    geometry: &ArrayGeometry,
    block: &BlockParams,
    nullformer: &mut NullformerState,
    calibration: &NullformerCalibration,
) -> FeatureFrame {
    let range = block.range(t);
    let fresh = if t == 0 { range.clone() } else { range.end - block.hop..range.end };
    let (fi, bi) = nullformer.side.pair();
    let phi_diff = nullformer_step(
        nullformer,
        &recording.channels[fi][fresh.clone()],
        &recording.channels[bi][fresh],
        calibration,
    );
    FeatureFrame {
        f_snr: beamformer::f_snr(recording, t, target_doa, geometry, block),
        f_corr: correlation::f_corr(recording, t, target_doa, geometry, block),
        f_diff: f_phi(phi_diff),
        f_var: f_var(recording, t, block),
        f_phi: f_phi(target_doa),
        label: false,
    }
}

/// Extracts every block of a recording. Labels are left false.
pub fn extract_scene(
    recording: &MultichannelRecording,
    target_doa: f64,
    geometry: &ArrayGeometry,
    block: &BlockParams,
    calibration: &NullformerCalibration,
) -> Vec<FeatureFrame> {
    let mut state = NullformerState::new(side_select(target_doa), geometry);
    (0..block.frame_count(recording.len()))
        .map(|t| assemble_feature(recording, t, target_doa, geometry, block, &mut state, calibration))
        .collect()
}
