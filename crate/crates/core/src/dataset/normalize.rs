use crate::features::FEATURE_DIM;

/// Per-dimension z-score statistics fitted on training frames.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub mean: [f64; FEATURE_DIM],
    pub std: [f64; FEATURE_DIM],
    /// Dimensions whose variance was zero; their std is forced to 1.
    pub degenerate: [bool; FEATURE_DIM],
}

impl NormStats {
    pub fn apply(&self, frame: &[f64; FEATURE_DIM]) -> [f64; FEATURE_DIM] {
        std::array::from_fn(|i| (frame[i] - self.mean[i]) / self.std[i])
    }

    /// `key=value` text form, one line per statistic.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        let flags = self.degenerate.iter().map(|&d| u8::from(d).to_string()).collect::<Vec<_>>().join(",");
        format!("mean={}\nstd={}\ndegenerate={}\n", join(&self.mean), join(&self.std), flags)
    }
}

/// Mean and population standard deviation of each dimension.
pub fn fit_normalizer(frames: &[[f64; FEATURE_DIM]]) -> NormStats {
    let n = frames.len().max(1) as f64;
    let mut mean = [0.0; FEATURE_DIM];
    for f in frames {
        for i in 0..FEATURE_DIM {
            mean[i] += f[i];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; FEATURE_DIM];
    for f in frames {
        for i in 0..FEATURE_DIM {
            var[i] += (f[i] - mean[i]).powi(2);
        }
    }
    let mut std = [1.0; FEATURE_DIM];
    let mut degenerate = [false; FEATURE_DIM];
    for i in 0..FEATURE_DIM {
        let s = (var[i] / n).sqrt();
        if s > 0.0 && s.is_finite() {
            std[i] = s;
        } else {
            degenerate[i] = true;
        }
    }
    NormStats { mean, std, degenerate }
}

pub fn apply_normalizer(frames: &[[f64; FEATURE_DIM]], stats: &NormStats) -> Vec<[f64; FEATURE_DIM]> {
    frames.iter().map(|f| stats.apply(f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn random_frames(n: usize, seed: u64, offset: f64) -> Vec<[f64; 8]> {
        let mut r = rng::rng(seed);
        (0..n).map(|_| std::array::from_fn(|i| offset + i as f64 + r.random_range(-3.0..3.0) * (i + 1) as f64)).collect()
    }

    #[test]
    fn fitted_training_set_is_standardized() {
        let train = random_frames(5000, 1, 0.0);
        let stats = fit_normalizer(&train);
        let z = apply_normalizer(&train, &stats);
        for i in 0..8 {
            let m = z.iter().map(|f| f[i]).sum::<f64>() / z.len() as f64;
            let s = (z.iter().map(|f| (f[i] - m).powi(2)).sum::<f64>() / z.len() as f64).sqrt();
            assert!(m.abs() < 1e-9, "dim {i} mean {m}");
            assert!((s - 1.0).abs() < 1e-9, "dim {i} std {s}");
        }
    }

    #[test]
    fn constant_dimension_gets_unit_std() {
        let frames: Vec<[f64; 8]> = (0..10).map(|k| [3.0, k as f64, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).collect();
        let stats = fit_normalizer(&frames);
        assert!(stats.degenerate[0] && !stats.degenerate[1]);
        assert_eq!(stats.std[0], 1.0);
        assert!(apply_normalizer(&frames, &stats).iter().all(|f| f[0] == 0.0));
    }

    #[test]
    fn held_out_data_uses_training_statistics() {
        let train = random_frames(1000, 2, 0.0);
        let test = random_frames(1000, 3, 50.0);
        let stats = fit_normalizer(&train);
        let z = apply_normalizer(&test, &stats);
        for (f, g) in test.iter().zip(&z) {
            for i in 0..8 {
                assert_eq!(g[i], (f[i] - stats.mean[i]) / stats.std[i]);
            }
        }
        // Fitting on train + test would have given different statistics.
        let mut both = train.clone();
        both.extend_from_slice(&test);
        assert_ne!(fit_normalizer(&both), stats);
    }
}
