use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::SequenceSet;
use crate::error::{Result, TadError};
use crate::eval::evaluate::score_set;
use crate::eval::metrics::{confusion, mcc, roc_auc};
use crate::eval::mode::InputMode;
use crate::nets::{init_params, Kind, NetworkSpec, ParamSet};
use crate::rng::substream;
use crate::training::backward::{batch_gradient, check_finite, Example};
use crate::training::optim::{adam_update, clip_global_norm, sgd_update, AdamConfig, AdamState, Optimizer};
use crate::training::regularize::apply_synaptic_noise;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    /// Expected window length of the training sequences.
    #[serde(skip)]
    pub sequence_length: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub epochs: usize,
    /// FNN hidden layers only.
    pub dropout_rate: f64,
    /// Recurrent kinds only.
    pub synaptic_noise_std: f64,
    /// Derived from the master seed in run configurations.
    #[serde(skip)]
    pub seed: u64,
    /// Epochs without validation-MCC improvement before stopping.
    pub patience: usize,
    pub optimizer: Optimizer,
    /// Global gradient-norm limit for recurrent kinds.
    pub clip_norm: f64,
    /// Caps the number of batches drawn per epoch (all when unset).
    pub max_batches_per_epoch: Option<usize>,
    /// Scores at most this many evenly spaced validation sequences per epoch.
    pub max_validation_samples: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 128,
            sequence_length: 20,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            epochs: 20,
            dropout_rate: 0.2,
            synaptic_noise_std: 0.05,
            seed: 0,
            patience: 10,
            optimizer: Optimizer::Adam,
            clip_norm: 5.0,
            max_batches_per_epoch: None,
            max_validation_samples: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TadError::invalid(m.to_string()));
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.sequence_length == 0 {
            return bad("sequence_length must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.eps <= 0.0 {
            return bad("adam betas must lie in [0, 1) and eps be positive");
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad("dropout_rate must lie in [0, 1)");
        }
        if !(self.synaptic_noise_std >= 0.0 && self.synaptic_noise_std.is_finite()) {
            return bad("synaptic_noise_std must be non-negative");
        }
        if self.clip_norm <= 0.0 {
            return bad("clip_norm must be positive");
        }
        if self.max_batches_per_epoch == Some(0) || self.max_validation_samples == Some(0) {
            return bad("batch and validation caps must be positive when set");
        }
        Ok(())
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig { learning_rate: self.learning_rate, beta1: self.beta1, beta2: self.beta2, eps: self.eps }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_mcc: f64,
    pub val_auc: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpochLog {
    pub records: Vec<EpochRecord>,
}

impl EpochLog {
    /// Reproducible columns only; wall-clock times go to [`EpochLog::timing_csv`].
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,val_mcc,val_auc\n");
        for r in &self.records {
            s.push_str(&format!("{},{:.12},{:.12},{:.12}\n", r.epoch, r.train_loss, r.val_mcc, r.val_auc));
        }
        s
    }

    pub fn timing_csv(&self) -> String {
        let mut s = String::from("epoch,wall_ms\n");
        for r in &self.records {
            s.push_str(&format!("{},{:.3}\n", r.epoch, r.wall_ms));
        }
        s
    }

    pub fn mean_epoch_ms(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.wall_ms).sum::<f64>() / self.records.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    EarlyStopped,
    /// Loss became non-finite; the best finite checkpoint is returned.
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters of the best epoch on validation MCC.
    pub params: ParamSet,
    pub log: EpochLog,
    pub best_epoch: usize,
    pub best_val_mcc: f64,
    pub stop: StopReason,
}

pub fn project_examples(set: &SequenceSet, indices: &[usize], mode: InputMode) -> Vec<Example> {
    indices.iter().map(|&i| Example { inputs: mode.project(set.frames(i)), label: set.label(i) }).collect()
}

/// Evenly spaced subset of `0..len` of at most `limit` indices.
pub fn spread_indices(len: usize, limit: Option<usize>) -> Vec<usize> {
    match limit {
        Some(k) if k < len => (0..k).map(|i| i * len / k).collect(),
        _ => (0..len).collect(),
    }
}

/// Trains `spec` on `train`, selecting the epoch with the best validation MCC.
pub fn train(spec: &NetworkSpec, mode: InputMode, train: &SequenceSet, validation: &SequenceSet, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    spec.validate()?;
    if train.is_empty() || validation.is_empty() {
        return Err(TadError::invalid("training and validation sets must be non-empty"));
    }
    if train.m() != cfg.sequence_length || validation.m() != cfg.sequence_length {
        return Err(TadError::invalid(format!(
            "sequence length mismatch: config says {}, data has {}",
            cfg.sequence_length,
            train.m()
        )));
    }
    if mode.input_dim(train.m()) != spec.input_dim {
        return Err(TadError::invalid("input mode does not match the network input dimension"));
    }
    let recurrent = spec.kind.is_recurrent();
    let mut params = init_params(spec, cfg.seed)?;
    let mut adam = AdamState::new(&params);
    let mut noise_rng = substream(cfg.seed, "synaptic-noise");
    let mut dropout_rng = substream(cfg.seed, "dropout");
    let val_idx = spread_indices(validation.len(), cfg.max_validation_samples);
    let val_labels: Vec<bool> = val_idx.iter().map(|&i| validation.label(i)).collect();

    let mut log = EpochLog::default();
    let mut best: Option<(ParamSet, usize, f64)> = None;
    let mut stale = 0;
    let mut step = 0;
    let mut stop = StopReason::Completed;
    'epochs: for epoch in 1..=cfg.epochs {
        let start = Instant::now();
        let mut order: Vec<usize> = (0..train.len()).collect();
        order.shuffle(&mut substream(cfg.seed, &format!("epoch{epoch}")));
        let max_batches = cfg.max_batches_per_epoch.unwrap_or(usize::MAX);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(cfg.batch_size).take(max_batches) {
            step += 1;
            let batch = project_examples(train, chunk, mode);
            let noisy;
            let forward_params = if recurrent && cfg.synaptic_noise_std > 0.0 {
                noisy = apply_synaptic_noise(&params, cfg.synaptic_noise_std, &mut noise_rng);
                &noisy
            } else {
                &params
            };
            let dropout = (spec.kind == Kind::Fnn && cfg.dropout_rate > 0.0).then_some((cfg.dropout_rate, &mut dropout_rng));
            let (loss, mut grads) = batch_gradient(spec, forward_params, &batch, dropout)?;
            if !loss.is_finite() {
                stop = StopReason::Diverged;
                break 'epochs;
            }
            check_finite(&grads, step)?;
            if recurrent {
                clip_global_norm(&mut grads, cfg.clip_norm);
            }
            match cfg.optimizer {
                Optimizer::Adam => adam_update(&mut params, &grads, &mut adam, &cfg.adam()),
                Optimizer::Sgd => sgd_update(&mut params, &grads, cfg.learning_rate),
            }
            loss_sum += loss;
            batches += 1;
        }
        let scores = score_set(spec, &params, validation, mode, &val_idx)?;
        let preds: Vec<bool> = scores.iter().map(|p| p.label).collect();
        let probs: Vec<f64> = scores.iter().map(|p| p.score).collect();
        let val_mcc = mcc(&confusion(&val_labels, &preds));
        let val_auc = roc_auc(&val_labels, &probs).auc;
        log.records.push(EpochRecord {
            epoch,
            train_loss: loss_sum / batches.max(1) as f64,
            val_mcc,
            val_auc,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        if best.as_ref().is_none_or(|b| val_mcc > b.2) {
            best = Some((params.clone(), epoch, val_mcc));
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                stop = StopReason::EarlyStopped;
                break;
            }
        }
    }
    match best {
        Some((params, best_epoch, best_val_mcc)) => Ok(TrainOutcome { params, log, best_epoch, best_val_mcc, stop }),
        None if stop == StopReason::Diverged => Err(TadError::Diverged { epoch: 1 }),
        None => Err(TadError::invalid("no epochs were run")),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dataset::StoredFrame;
    use rand::Rng;
    use rand_distr::StandardNormal;

    /// Label = sign of dimension 2 at the final frame, other dims noise.
    pub(crate) fn separable(n: usize, m: usize, seed: u64) -> SequenceSet {
        let mut rng = crate::rng::rng(seed);
        let mut set = SequenceSet::new(m);
        for i in 0..n {
            let label = i % 2 == 0;
            let frames: Vec<StoredFrame> = (0..m)
                .map(|_| {
                    let mut f: StoredFrame = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal) as f32);
                    f[2] = if label { 1.0 } else { -1.0 } * (0.5 + rng.random::<f32>());
                    f
                })
                .collect();
            set.push(&frames, label);
        }
        set
    }

    fn quick_cfg() -> TrainConfig {
        TrainConfig { batch_size: 16, sequence_length: 4, epochs: 8, learning_rate: 1e-2, seed: 3, ..TrainConfig::default() }
    }

    #[test]
    fn learns_separable_toy_and_reduces_loss() {
        let tr = separable(256, 4, 1);
        let va = separable(128, 4, 2);
        let spec = NetworkSpec::new(Kind::Gru, 1, 4, 8).unwrap();
        let out = train(&spec, InputMode::Sequential, &tr, &va, &quick_cfg()).unwrap();
        assert!(out.best_val_mcc > 0.95, "{}", out.best_val_mcc);
        let first = out.log.records.first().unwrap().train_loss;
        let last = out.log.records.last().unwrap().train_loss;
        assert!(last < first);
    }

    #[test]
    fn epoch_logs_are_reproducible() {
        let tr = separable(64, 4, 1);
        let va = separable(32, 4, 2);
        let spec = NetworkSpec::new(Kind::Fnn, 2, 4, 8).unwrap();
        let cfg = TrainConfig { epochs: 3, ..quick_cfg() };
        let a = train(&spec, InputMode::LastFrame, &tr, &va, &cfg).unwrap();
        let b = train(&spec, InputMode::LastFrame, &tr, &va, &cfg).unwrap();
        assert_eq!(a.log.to_csv(), b.log.to_csv());
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn patience_stops_early() {
        let tr = separable(64, 4, 1);
        let va = separable(32, 4, 2);
        let spec = NetworkSpec::new(Kind::Fnn, 1, 4, 8).unwrap();
        let cfg = TrainConfig { epochs: 50, patience: 2, ..quick_cfg() };
        let out = train(&spec, InputMode::LastFrame, &tr, &va, &cfg).unwrap();
        assert_eq!(out.stop, StopReason::EarlyStopped);
        assert!(out.log.records.len() < 50);
        assert_eq!(out.log.records.len(), out.best_epoch + 2);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let tr = separable(16, 4, 1);
        let spec = NetworkSpec::new(Kind::Fnn, 1, 4, 8).unwrap();
        assert!(train(&spec, InputMode::Concatenated, &tr, &tr, &quick_cfg()).is_err());
        let cfg = TrainConfig { sequence_length: 20, ..quick_cfg() };
        assert!(train(&spec, InputMode::LastFrame, &tr, &tr, &cfg).is_err());
        let cfg = TrainConfig { batch_size: 0, ..quick_cfg() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn spread_indices_are_even() {
        assert_eq!(spread_indices(10, Some(4)), vec![0, 2, 5, 7]);
        assert_eq!(spread_indices(3, Some(4)), vec![0, 1, 2]);
    }
}
