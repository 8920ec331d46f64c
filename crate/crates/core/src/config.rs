//! Run configuration: TOML with sections `[scenes]`, `[features]`,
//! `[dataset]`, `[train]` and `[grid]`. Unknown keys are rejected; missing
//! keys take their defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TadError};
use crate::eval::grid::GridConfig;
use crate::features::BlockParams;
use crate::rng::substream_seed;
use crate::scene::mix::{MAX_DOA_DEG, MAX_INTERFERERS};
use crate::training::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenesConfig {
    pub train_scenes: usize,
    pub train_duration_s: f64,
    pub test_scenes: usize,
    pub test_duration_s: f64,
    pub min_interferers: usize,
    pub max_interferers: usize,
    /// Targets are drawn uniformly from `[-target_max_doa_deg, target_max_doa_deg]`.
    pub target_max_doa_deg: f64,
    /// Minimum angular distance between the target and any interferer.
    pub min_separation_deg: f64,
    /// May be `-inf` to disable diffuse noise.
    pub noise_level_db: f64,
    pub sample_rate: u32,
}

impl Default for ScenesConfig {
    fn default() -> Self {
        ScenesConfig {
            train_scenes: 8,
            train_duration_s: 20.0,
            test_scenes: 3,
            test_duration_s: 10.0,
            min_interferers: 0,
            max_interferers: 2,
            target_max_doa_deg: 135.0,
            min_separation_deg: 30.0,
            noise_level_db: -10.0,
            sample_rate: 16_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    pub window_length: usize,
    pub hop: usize,
    pub threshold_db: f64,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        FeaturesConfig { window_length: 256, hop: 16, threshold_db: 10.0 }
    }
}

impl FeaturesConfig {
    pub fn block(&self) -> Result<BlockParams> {
        BlockParams::new(self.window_length, self.hop)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub sequence_length: usize,
    pub train_stride: usize,
    /// Stride for validation and test sequences.
    pub eval_stride: usize,
    /// Share of the training scenes held out for validation.
    pub validation_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig { sequence_length: 20, train_stride: 1, eval_stride: 1, validation_fraction: 0.25 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every random stream derives from it.
    pub seed: u64,
    pub scenes: ScenesConfig,
    pub features: FeaturesConfig,
    pub dataset: DatasetConfig,
    pub train: TrainConfig,
    pub grid: GridConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| TadError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config always serializes")
    }

    /// Training settings with the seed derived from the master seed.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: substream_seed(self.seed, "train"),
            sequence_length: self.dataset.sequence_length,
            ..self.train.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TadError::Config(m));
        let s = &self.scenes;
        if s.train_scenes < 2 {
            return bad("scenes.train_scenes must be at least 2 (train and validation)".into());
        }
        if !(s.train_duration_s > 0.0 && s.test_duration_s > 0.0) {
            return bad("scene durations must be positive".into());
        }
        if s.min_interferers > s.max_interferers || s.max_interferers > MAX_INTERFERERS {
            return bad(format!("interferer counts must satisfy min <= max <= {MAX_INTERFERERS}"));
        }
        if !(0.0..=MAX_DOA_DEG).contains(&s.target_max_doa_deg) {
            return bad(format!("scenes.target_max_doa_deg must lie in [0, {MAX_DOA_DEG}]"));
        }
        if !(0.0..=90.0).contains(&s.min_separation_deg) {
            return bad("scenes.min_separation_deg must lie in [0, 90]".into());
        }
        if s.noise_level_db.is_nan() || s.noise_level_db == f64::INFINITY {
            return bad("scenes.noise_level_db must be finite or -inf".into());
        }
        if s.sample_rate == 0 {
            return bad("scenes.sample_rate must be positive".into());
        }
        self.features.block().map_err(|e| TadError::Config(e.to_string()))?;
        let d = &self.dataset;
        if d.sequence_length == 0 || d.train_stride == 0 || d.eval_stride == 0 {
            return bad("dataset.sequence_length and strides must be at least 1".into());
        }
        if !(0.0..1.0).contains(&d.validation_fraction) {
            return bad("dataset.validation_fraction must lie in [0, 1)".into());
        }
        self.train.validate().map_err(|e| TadError::Config(e.to_string()))?;
        if !(0.0..1.0).contains(&self.grid.smoothing) {
            return bad("grid.smoothing must lie in [0, 1)".into());
        }
        if self.grid.layers.is_empty() || self.grid.neurons.is_empty() {
            return bad("grid.layers and grid.neurons must not be empty".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("[train]\nbatchsize = 3\n").unwrap_err();
        assert!(err.to_string().contains("batchsize"), "{err}");
        assert!(RunConfig::from_toml("colour = 1\n").is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let text = "seed = 9\n[scenes]\nnoise_level_db = -inf\nmax_interferers = 1\n[train]\nepochs = 3\noptimizer = \"sgd\"\nmax_batches_per_epoch = 5\n[grid]\nlayers = [1, 2]\n";
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.scenes.noise_level_db, f64::NEG_INFINITY);
        assert_eq!(cfg.train.max_batches_per_epoch, Some(5));
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(RunConfig::from_toml("[scenes]\nmax_interferers = 9\n").is_err());
        assert!(RunConfig::from_toml("[dataset]\nsequence_length = 0\n").is_err());
        assert!(RunConfig::from_toml("[grid]\nsmoothing = 1.0\n").is_err());
    }
}
