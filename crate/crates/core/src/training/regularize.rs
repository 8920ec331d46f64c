use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::nets::{ParamSet, Role};

/// Inverted dropout in place: each unit is zeroed with probability `rate`,
/// survivors are scaled by `1 / (1 - rate)`. Returns the multipliers applied.
pub fn apply_dropout(activations: &mut [f64], rate: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    assert!((0.0..1.0).contains(&rate), "dropout rate must lie in [0, 1), got {rate}");
    if rate == 0.0 {
        return vec![1.0; activations.len()];
    }
    let keep = 1.0 - rate;
    activations
        .iter_mut()
        .map(|a| {
            let m = if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 };
            *a *= m;
            m
        })
        .collect()
}

/// Copy of `params` with zero-mean Gaussian noise added to every weight
/// matrix. The clean set is left untouched.
pub fn apply_synaptic_noise(params: &ParamSet, std: f64, rng: &mut ChaCha8Rng) -> ParamSet {
    let mut noisy = params.clone();
    if std == 0.0 {
        return noisy;
    }
    let normal = Normal::new(0.0, std).expect("finite noise std");
    for t in noisy.tensors.iter_mut().filter(|t| t.role == Role::Weight) {
        for v in &mut t.data {
            *v += normal.sample(rng);
        }
    }
    noisy
}
