//! End-to-end corpus construction: scene plan, simulation, feature
//! extraction, labeling, compression, normalization, sequencing, balancing.

use rand::Rng;

use crate::config::{DatasetConfig, FeaturesConfig, RunConfig, ScenesConfig};
use crate::dataset::{
    balance_upsample, compress_frame, fit_normalizer, frame_sequences, split_scenes, DatasetSplit, NormStats, SceneAssignment,
    SequenceSet,
};
use crate::error::{Result, TadError};
use crate::features::{extract_scene, NullformerCalibration, FEATURE_DIM};
use crate::rng::{substream, substream_seed};
use crate::scene::mix::MAX_DOA_DEG;
use crate::scene::{label_blocks, mix_scene, oracle_sinr_per_block, ArrayGeometry, MultichannelRecording, SceneSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneRole {
    /// Training pool; later split into train and validation.
    Train,
    Test,
}

impl SceneRole {
    pub fn as_str(self) -> &'static str {
        match self {
            SceneRole::Train => "train",
            SceneRole::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedScene {
    pub id: u32,
    pub role: SceneRole,
    pub spec: SceneSpec,
}

/// A simulated scene with its oracle SINR and labels per block.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedScene {
    pub plan: PlannedScene,
    pub recording: MultichannelRecording,
    pub sinr_db: Vec<f64>,
    pub labels: Vec<bool>,
}

/// Compressed (not yet normalized) feature frames of one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFeatures {
    pub id: u32,
    pub role: SceneRole,
    pub frames: Vec<[f64; FEATURE_DIM]>,
    pub labels: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltDataset {
    pub split: DatasetSplit,
    pub norm: NormStats,
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Draws target and interferer directions for every scene. Train-pool scenes
/// get IDs `0..train_scenes`, test scenes follow.
pub fn plan_scenes(cfg: &ScenesConfig, seed: u64) -> Result<Vec<PlannedScene>> {
    let roles = std::iter::repeat_n((SceneRole::Train, cfg.train_duration_s), cfg.train_scenes)
        .chain(std::iter::repeat_n((SceneRole::Test, cfg.test_duration_s), cfg.test_scenes));
    let mut plans = Vec::new();
    for (id, (role, duration)) in roles.enumerate() {
        let id = id as u32;
        let mut rng = substream(seed, &format!("scene{id}-plan"));
        let target = if cfg.target_max_doa_deg > 0.0 {
            rng.random_range(-cfg.target_max_doa_deg..=cfg.target_max_doa_deg)
        } else {
            0.0
        };
        let count = rng.random_range(cfg.min_interferers..=cfg.max_interferers);
        let mut interferers = Vec::with_capacity(count);
        while interferers.len() < count {
            let d: f64 = rng.random_range(-MAX_DOA_DEG..=MAX_DOA_DEG);
            if angular_distance(d, target) >= cfg.min_separation_deg {
                interferers.push(d);
            }
        }
        let mut spec = SceneSpec::new(target, interferers, duration, substream_seed(seed, &format!("scene{id}-audio")));
        spec.noise_level_db = cfg.noise_level_db;
        spec.validate()?;
        plans.push(PlannedScene { id, role, spec });
    }
    Ok(plans)
}

pub fn simulate_scene(plan: &PlannedScene, geometry: &ArrayGeometry, features: &FeaturesConfig) -> Result<SimulatedScene> {
    let mixed = mix_scene(&plan.spec, geometry)?;
    let sinr_db = oracle_sinr_per_block(&mixed.components, &features.block()?);
    let labels = label_blocks(&sinr_db, features.threshold_db);
    Ok(SimulatedScene { plan: plan.clone(), recording: mixed.recording, sinr_db, labels })
}

/// Extracts and compresses the feature frames of one recording.
pub fn scene_features(
    id: u32,
    role: SceneRole,
    recording: &MultichannelRecording,
    target_doa: f64,
    labels: &[bool],
    geometry: &ArrayGeometry,
    features: &FeaturesConfig,
    calibration: &NullformerCalibration,
) -> Result<SceneFeatures> {
    let block = features.block()?;
    let raw = extract_scene(recording, target_doa, geometry, &block, calibration);
    if raw.len() != labels.len() {
        return Err(TadError::Integrity { expected: raw.len() as u64, found: labels.len() as u64 });
    }
    let frames = raw.iter().map(|f| compress_frame(&f.to_array())).collect();
    Ok(SceneFeatures { id, role, frames, labels: labels.to_vec() })
}

/// Splits the training pool into train/validation scenes, normalizes with
/// statistics of the training scenes only, frames sequences and balances the
/// training split.
pub fn build_dataset(scenes: &[SceneFeatures], cfg: &DatasetConfig, seed: u64) -> Result<BuiltDataset> {
    let pool: Vec<u32> = scenes.iter().filter(|s| s.role == SceneRole::Train).map(|s| s.id).collect();
    let tv = split_scenes(&pool, (1.0 - cfg.validation_fraction, cfg.validation_fraction, 0.0), substream_seed(seed, "split"))?;
    let assignment = SceneAssignment {
        train: tv.train,
        validation: tv.validation,
        test: scenes.iter().filter(|s| s.role == SceneRole::Test).map(|s| s.id).collect(),
    };
    if assignment.train.is_empty() || assignment.validation.is_empty() || assignment.test.is_empty() {
        return Err(TadError::invalid("every split needs at least one scene"));
    }
    let find = |id: u32| scenes.iter().find(|s| s.id == id).expect("assigned scene exists");
    let train_frames: Vec<[f64; FEATURE_DIM]> = assignment.train.iter().flat_map(|&id| find(id).frames.iter().copied()).collect();
    let norm = fit_normalizer(&train_frames);
    let collect = |ids: &[u32], stride: usize| -> Result<SequenceSet> {
        let mut set = SequenceSet::new(cfg.sequence_length);
        // Scene order within a split is by ID so the file does not depend on
        // the shuffled assignment order.
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        for id in ids {
            let s = find(id);
            let normed: Vec<[f64; FEATURE_DIM]> = s.frames.iter().map(|f| norm.apply(f)).collect();
            set.extend(&frame_sequences(&normed, &s.labels, cfg.sequence_length, stride)?);
        }
        Ok(set)
    };
    let train = balance_upsample(&collect(&assignment.train, cfg.train_stride)?, substream_seed(seed, "balance"));
    let validation = collect(&assignment.validation, cfg.eval_stride)?;
    let test = collect(&assignment.test, cfg.eval_stride)?;
    Ok(BuiltDataset { split: DatasetSplit { train, validation, test, scenes: assignment }, norm })
}

/// Simulates every planned scene and builds the dataset in memory.
pub fn run_pipeline(cfg: &RunConfig) -> Result<(Vec<SimulatedScene>, BuiltDataset)> {
    let geometry = ArrayGeometry::behind_the_ear().with_sample_rate(cfg.scenes.sample_rate)?;
    let calibration = NullformerCalibration::build(&geometry)?;
    let plans = plan_scenes(&cfg.scenes, cfg.seed)?;
    let mut sims = Vec::with_capacity(plans.len());
    let mut feats = Vec::with_capacity(plans.len());
    for plan in &plans {
        let sim = simulate_scene(plan, &geometry, &cfg.features)?;
        feats.push(scene_features(
            plan.id,
            plan.role,
            &sim.recording,
            plan.spec.target_doa,
            &sim.labels,
            &geometry,
            &cfg.features,
            &calibration,
        )?);
        sims.push(sim);
    }
    let built = build_dataset(&feats, &cfg.dataset, cfg.seed)?;
    Ok((sims, built))
}
