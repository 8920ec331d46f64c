//! Far-field free-field propagation onto the four microphones.
//!
//! Fractional delays use a Blackman-windowed sinc interpolator with
//! `SINC_HALF_WIDTH` taps on each side. Integer delays are exact shifts.
//! Samples outside the source signal are treated as zero.

use std::f64::consts::PI;

use crate::error::{Result, TadError};
use crate::scene::geometry::ArrayGeometry;

pub const SINC_HALF_WIDTH: usize = 24;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn blackman(u: f64, half: f64) -> f64 {
    if u.abs() >= half {
        return 0.0;
    }
    0.42 + 0.5 * (PI * u / half).cos() + 0.08 * (2.0 * PI * u / half).cos()
}

/// Interpolation taps `(j, w(j - frac))` for `j` in `(-half, half]`; applying
/// them as `sum_j w * x[k - j]` delays `x` by `frac` samples.
pub(crate) fn windowed_sinc_taps(frac: f64, half: usize) -> Vec<(i64, f64)> {
    let h = half as i64;
    (-h + 1..=h)
        .map(|j| {
            let u = j as f64 - frac;
            (j, sinc(u) * blackman(u, half as f64))
        })
        .collect()
}

/// Delays `source` by `delay` samples (may be negative or fractional).
pub fn fractional_delay(source: &[f64], delay: f64) -> Vec<f64> {
    let n = source.len();
    let whole = delay.floor();
    let frac = delay - whole;
    let shift = whole as i64;
    let mut out = vec![0.0; n];
    if frac == 0.0 {
        for (k, y) in out.iter_mut().enumerate() {
            let m = k as i64 - shift;
            if m >= 0 && (m as usize) < n {
                *y = source[m as usize];
            }
        }
        return out;
    }
    // y[k] = sum_j w(j - frac) * x[k - shift - j], j in (-h, h]
    let taps = windowed_sinc_taps(frac, SINC_HALF_WIDTH);
    for (k, y) in out.iter_mut().enumerate() {
        let base = k as i64 - shift;
        let mut acc = 0.0;
        for &(j, w) in &taps {
            let m = base - j;
            if m >= 0 && (m as usize) < n {
                acc += w * source[m as usize];
            }
        }
        *y = acc;
    }
    out
}

/// Renders a plane wave from `doa_deg` onto all four microphones.
pub fn propagate_to_array(source: &[f64], doa_deg: f64, geometry: &ArrayGeometry) -> Result<[Vec<f64>; 4]> {
    if !doa_deg.is_finite() || doa_deg.abs() > 180.0 {
        return Err(TadError::invalid(format!("doa must lie within +/-180 degrees, got {doa_deg}")));
    }
    Ok(std::array::from_fn(|mic| fractional_delay(source, geometry.arrival_delay_samples(mic, doa_deg))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::signal::{synthesize_source_signal, SourceKind};

    fn xcorr_peak(a: &[f64], b: &[f64], max_lag: i64) -> f64 {
        // Peak of sum_k a(k) b(k + lag), refined by a parabola through the
        // three samples around the maximum.
        let r = |lag: i64| -> f64 {
            (0..a.len() as i64)
                .filter_map(|k| {
                    let m = k + lag;
                    (m >= 0 && (m as usize) < b.len()).then(|| a[k as usize] * b[m as usize])
                })
                .sum()
        };
        let vals: Vec<f64> = (-max_lag..=max_lag).map(r).collect();
        let (i, _) = vals.iter().enumerate().fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let (ym, y0, yp) = (vals[i - 1], vals[i], vals[i + 1]);
        (i as i64 - max_lag) as f64 + 0.5 * (ym - yp) / (ym - 2.0 * y0 + yp)
    }

    #[test]
    fn broadside_impulse_is_symmetric_across_sides() {
        let g = ArrayGeometry::behind_the_ear();
        let imp = synthesize_source_signal(0.05, SourceKind::Impulse, 0, 16_000).unwrap();
        let ch = propagate_to_array(&imp.samples, 0.0, &g).unwrap();
        assert_eq!(ch[0], ch[2]);
        assert_eq!(ch[1], ch[3]);
        let peak = |v: &[f64]| v.iter().enumerate().fold((0, 0.0), |a, (i, &x)| if x > a.1 { (i, x) } else { a }).0;
        assert_eq!(peak(&ch[0]), peak(&ch[1]));
        assert_eq!(peak(&ch[0]), 0);
    }

    #[test]
    fn lateral_lag_at_ninety_degrees() {
        let g = ArrayGeometry::behind_the_ear();
        let src = synthesize_source_signal(0.25, SourceKind::SpeechSurrogate, 5, 16_000).unwrap();
        let ch = propagate_to_array(&src.samples, 90.0, &g).unwrap();
        // mic 1 lags mic 3 by 0.18 * 16000 / 343 samples
        let lag = xcorr_peak(&ch[2], &ch[0], 12);
        assert!((lag - 8.397).abs() < 0.1, "lag {lag}");
    }

    #[test]
    fn negated_doa_swaps_sides() {
        let g = ArrayGeometry::behind_the_ear();
        let src = synthesize_source_signal(0.1, SourceKind::SpeechSurrogate, 2, 16_000).unwrap();
        for doa in [17.0, 45.0, 90.0, 133.3] {
            let a = propagate_to_array(&src.samples, doa, &g).unwrap();
            let b = propagate_to_array(&src.samples, -doa, &g).unwrap();
            assert_eq!(a[0], b[2]);
            assert_eq!(a[1], b[3]);
            assert_eq!(a[2], b[0]);
            assert_eq!(a[3], b[1]);
        }
    }

    #[test]
    fn integer_delay_is_exact_shift() {
        let x: Vec<f64> = (0..32).map(|i| i as f64).collect();
        let y = fractional_delay(&x, 3.0);
        assert_eq!(&y[..3], &[0.0, 0.0, 0.0]);
        assert_eq!(&y[3..], &x[..29]);
    }

    #[test]
    fn rejects_out_of_range_doa() {
        let g = ArrayGeometry::behind_the_ear();
        assert!(propagate_to_array(&[1.0], 181.0, &g).is_err());
    }
}
