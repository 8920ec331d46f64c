use std::time::Instant;

use crate::dataset::SequenceSet;
use crate::error::Result;
use crate::eval::evaluate::score_set;
use crate::eval::mode::InputMode;
use crate::nets::{NetworkSpec, ParamSet};
use crate::training::backward::batch_gradient;
use crate::training::optim::{adam_update, AdamConfig, AdamState};
use crate::training::train::{project_examples, spread_indices, TrainConfig};

/// Mean and standard deviation of repeated wall-clock measurements, in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub mean_ms: f64,
    pub std_ms: f64,
    pub repeats: usize,
}

impl Timing {
    pub fn from_samples(samples: &[f64]) -> Timing {
        let n = samples.len().max(1) as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
        Timing { mean_ms: mean, std_ms: var.sqrt(), repeats: samples.len() }
    }

    /// Ratio of means against a baseline measurement.
    pub fn relative_to(&self, baseline: &Timing) -> f64 {
        self.mean_ms / baseline.mean_ms
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingReport {
    /// One training epoch (capped as in the config).
    pub train_epoch: Timing,
    /// Scoring the full test set.
    pub test: Timing,
}

/// Times one training epoch and one test-set pass, `repeats` times each.
/// Training runs on a scratch copy of `params`.
pub fn measure_times(
    spec: &NetworkSpec,
    mode: InputMode,
    params: &ParamSet,
    train: &SequenceSet,
    test: &SequenceSet,
    cfg: &TrainConfig,
    repeats: usize,
) -> Result<TimingReport> {
    let repeats = repeats.max(1);
    let order: Vec<usize> = (0..train.len()).collect();
    let max_batches = cfg.max_batches_per_epoch.unwrap_or(usize::MAX);
    let adam = AdamConfig { learning_rate: cfg.learning_rate, beta1: cfg.beta1, beta2: cfg.beta2, eps: cfg.eps };
    let mut train_ms = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let mut scratch = params.clone();
        let mut state = AdamState::new(&scratch);
        let start = Instant::now();
        for chunk in order.chunks(cfg.batch_size).take(max_batches) {
            let batch = project_examples(train, chunk, mode);
            let (_, grads) = batch_gradient(spec, &scratch, &batch, None)?;
            adam_update(&mut scratch, &grads, &mut state, &adam);
        }
        train_ms.push(start.elapsed().as_secs_f64() * 1e3);
    }
    let idx = spread_indices(test.len(), None);
    let mut test_ms = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        score_set(spec, params, test, mode, &idx)?;
        test_ms.push(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(TimingReport { train_epoch: Timing::from_samples(&train_ms), test: Timing::from_samples(&test_ms) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{init_params, Kind};
    use crate::training::train::tests::separable;

    #[test]
    fn baseline_ratio_is_one_and_spread_reported() {
        let set = separable(64, 20, 1);
        let spec = NetworkSpec::new(Kind::Fnn, 2, 32, 8).unwrap();
        let p = init_params(&spec, 0).unwrap();
        let cfg = TrainConfig { batch_size: 16, ..TrainConfig::default() };
        let r = measure_times(&spec, InputMode::Smoothed { a: 0.7 }, &p, &set, &set, &cfg, 3).unwrap();
        assert_eq!(r.train_epoch.relative_to(&r.train_epoch), 1.0);
        assert_eq!(r.test.repeats, 3);
        assert!(r.test.std_ms >= 0.0);
    }

    #[test]
    fn recurrent_inference_is_slower_than_feed_forward() {
        let set = separable(200, 20, 1);
        let fnn = NetworkSpec::new(Kind::Fnn, 2, 32, 8).unwrap();
        let lstm = NetworkSpec::new(Kind::Lstm, 2, 32, 8).unwrap();
        let cfg = TrainConfig { batch_size: 50, max_batches_per_epoch: Some(1), ..TrainConfig::default() };
        let a = measure_times(&fnn, InputMode::Smoothed { a: 0.7 }, &init_params(&fnn, 0).unwrap(), &set, &set, &cfg, 2).unwrap();
        let b = measure_times(&lstm, InputMode::Sequential, &init_params(&lstm, 0).unwrap(), &set, &set, &cfg, 2).unwrap();
        assert!(b.test.relative_to(&a.test) > 1.0);
    }
}
