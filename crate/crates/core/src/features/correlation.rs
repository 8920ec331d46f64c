//! Inter-pair cross-correlation and the target-lag peak ratio.
//!
//! Lags are positive when mic 1 lags mic 3, i.e. for sources on the right
//! (positive azimuth): `r13(lag) = sum_k v3(k) * v1(k + lag)`.

use crate::features::block::BlockParams;
use crate::scene::geometry::ArrayGeometry;
use crate::scene::mix::MultichannelRecording;
use crate::scene::sinr::POWER_GUARD;

/// Integer lag (samples) at which the target's cross-correlation peak is expected.
pub fn doa_to_lag(doa_deg: f64, geometry: &ArrayGeometry) -> i64 {
    (geometry.fs() * geometry.d13() * doa_deg.to_radians().sin() / geometry.speed_of_sound()).round() as i64
}

/// Largest lag a plane wave can produce across mics 1 and 3, plus two samples.
pub fn default_max_lag(geometry: &ArrayGeometry) -> usize {
    (geometry.fs() * geometry.d13() / geometry.speed_of_sound()).ceil() as usize + 2
}

/// Biased cross-correlation `r(lag) = sum_k a(k) b(k + lag)` for
/// `lag in -max_lag..=max_lag`; element `i` holds lag `i - max_lag`.
///
/// Panics if the blocks differ in length or are not longer than `2 * max_lag`.
pub fn cross_correlation(a: &[f64], b: &[f64], max_lag: usize) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "blocks must have equal length");
    assert!(a.len() > 2 * max_lag, "block too short for max_lag {max_lag}");
    let n = a.len();
    let l = max_lag as i64;
    (-l..=l)
        .map(|lag| {
            let (a_start, b_start) = if lag >= 0 { (0, lag as usize) } else { ((-lag) as usize, 0) };
            let len = n - lag.unsigned_abs() as usize;
            a[a_start..a_start + len].iter().zip(&b[b_start..b_start + len]).map(|(x, y)| x * y).sum()
        })
        .collect()
}

/// Ratio of the correlation at the target lag to the largest correlation at
/// any other lag. Both terms are floored at zero and guarded by `POWER_GUARD`,
/// so silent blocks give exactly 1.
pub fn f_corr_from_correlation(r: &[f64], max_lag: usize, target_lag: i64) -> f64 {
    let idx = (target_lag + max_lag as i64).clamp(0, r.len() as i64 - 1) as usize;
    let others = r
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    (POWER_GUARD + r[idx].max(0.0)) / (POWER_GUARD + others.max(0.0))
}

pub fn f_corr(
    recording: &MultichannelRecording,
    t: usize,
    target_doa: f64,
    geometry: &ArrayGeometry,
    block: &BlockParams,
) -> f64 {
    let range = block.range(t);
    let max_lag = default_max_lag(geometry);
    let r = cross_correlation(&recording.channels[2][range.clone()], &recording.channels[0][range], max_lag);
    f_corr_from_correlation(&r, max_lag, doa_to_lag(target_doa, geometry))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    #[test]
    fn lag_of_broadside_and_ninety() {
        let g = ArrayGeometry::behind_the_ear();
        assert_eq!(doa_to_lag(0.0, &g), 0);
        assert_eq!(doa_to_lag(90.0, &g), 8);
        for doa in [10.0, 33.0, 71.0, 90.0, 135.0] {
            assert_eq!(doa_to_lag(-doa, &g), -doa_to_lag(doa, &g));
        }
        assert_eq!(default_max_lag(&g), 11);
    }

    #[test]
    fn identical_blocks_peak_at_zero() {
        let mut r = rng::rng(1);
        let a: Vec<f64> = (0..128).map(|_| r.random_range(-1.0..1.0)).collect();
        let c = cross_correlation(&a, &a, 10);
        let best = c.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).unwrap().0;
        assert_eq!(best, 10);
    }

    #[test]
    fn delayed_copy_peaks_at_its_delay() {
        let mut r = rng::rng(2);
        let src: Vec<f64> = (0..260).map(|_| r.random_range(-1.0..1.0)).collect();
        let a = src[3..259].to_vec();
        let b = src[0..256].to_vec(); // b(k + 3) = a(k)
        let c = cross_correlation(&a, &b, 10);
        let best = c.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).unwrap().0 as i64 - 10;
        assert_eq!(best, 3);
    }

    #[test]
    fn matches_double_loop_oracle() {
        let mut r = rng::rng(3);
        let a: Vec<f64> = (0..200).map(|_| r.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..200).map(|_| r.random_range(-1.0..1.0)).collect();
        let max_lag = 13;
        let c = cross_correlation(&a, &b, max_lag);
        for lag in -(max_lag as i64)..=max_lag as i64 {
            let mut oracle = 0.0;
            for k in 0..200i64 {
                let m = k + lag;
                if (0..200).contains(&m) {
                    oracle += a[k as usize] * b[m as usize];
                }
            }
            assert!((c[(lag + max_lag as i64) as usize] - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn silent_block_ratio_is_one() {
        let z = vec![0.0; 64];
        let c = cross_correlation(&z, &z, 5);
        assert_eq!(f_corr_from_correlation(&c, 5, 2), 1.0);
    }
}
