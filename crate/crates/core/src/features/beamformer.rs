use crate::features::block::BlockParams;
use crate::features::correlation::doa_to_lag;
use crate::scene::geometry::ArrayGeometry;
use crate::scene::mix::MultichannelRecording;
use crate::scene::sinr::POWER_GUARD;

/// Output powers of the delay-and-sum beamformer and delay-and-subtract
/// nullformer on mics 1 and 3, aligned to the integer target lag. Only samples
/// where both aligned signals fall inside the block contribute.
pub fn pair_powers(v1: &[f64], v3: &[f64], target_lag: i64) -> (f64, f64) {
    let n = v1.len() as i64;
    let lo = target_lag.max(0);
    let hi = n + target_lag.min(0);
    if hi <= lo {
        return (0.0, 0.0);
    }
    let (mut sum, mut diff) = (0.0, 0.0);
    for k in lo..hi {
        let a = v1[k as usize];
        let b = v3[(k - target_lag) as usize];
        sum += (0.5 * (a + b)).powi(2);
        diff += (0.5 * (a - b)).powi(2);
    }
    let count = (hi - lo) as f64;
    (sum / count, diff / count)
}

/// Ratio of beamformer to nullformer output power, both guarded.
pub fn f_snr(
    recording: &MultichannelRecording,
    t: usize,
    target_doa: f64,
    geometry: &ArrayGeometry,
    block: &BlockParams,
) -> f64 {
    let range = block.range(t);
    let (s, n) = pair_powers(
        &recording.channels[0][range.clone()],
        &recording.channels[2][range],
        doa_to_lag(target_doa, geometry),
    );
    (POWER_GUARD + s) / (POWER_GUARD + n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::scene::propagate_to_array;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn aligned_plane_wave_is_nulled() {
        let g = ArrayGeometry::behind_the_ear();
        // azimuth whose 1-3 lag is exactly 8 samples
        let doa = (8.0 * g.speed_of_sound() / (g.fs() * g.d13())).asin().to_degrees();
        assert_eq!(doa_to_lag(doa, &g), 8);
        let mut r = rng::rng(9);
        let src: Vec<f64> = (0..4000).map(|_| StandardNormal.sample(&mut r)).collect();
        let ch = propagate_to_array(&src, doa, &g).unwrap();
        let rec = MultichannelRecording::new(ch, 16_000).unwrap();
        let block = BlockParams::default();
        for t in [40, 80, 120] {
            let v = f_snr(&rec, t, doa, &g, &block);
            assert!(v >= 1e6, "block {t}: {v}");
        }
    }

    #[test]
    fn uncorrelated_noise_gives_unit_ratio_on_average() {
        let mut r = rng::rng(4);
        let blocks = 2000;
        let mut total = 0.0;
        for _ in 0..blocks {
            let a: Vec<f64> = (0..256).map(|_| StandardNormal.sample(&mut r)).collect();
            let b: Vec<f64> = (0..256).map(|_| StandardNormal.sample(&mut r)).collect();
            let (s, n) = pair_powers(&a, &b, 5);
            total += (POWER_GUARD + s) / (POWER_GUARD + n);
        }
        let mean = total / blocks as f64;
        assert!((mean - 1.0).abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn silence_gives_one() {
        let z = [vec![0.0; 512], vec![0.0; 512], vec![0.0; 512], vec![0.0; 512]];
        let rec = MultichannelRecording::new(z, 16_000).unwrap();
        assert_eq!(f_snr(&rec, 3, 45.0, &ArrayGeometry::default(), &BlockParams::default()), 1.0);
    }
}
