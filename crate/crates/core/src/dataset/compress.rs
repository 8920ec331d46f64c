use crate::features::FEATURE_DIM;

pub const SNR_LOG_CLIP: f64 = 6.0;
pub const CORR_CLIP: f64 = 10.0;
pub const VAR_FLOOR: f64 = 1e-12;

/// Maps unbounded ratios into ranges a tanh layer can use:
/// `log10(f_snr)` clipped to +/-6, `f_corr` clipped to +/-10,
/// `log10(f_var + 1e-12)`. The unit-circle dimensions pass through.
pub fn compress_frame(frame: &[f64; FEATURE_DIM]) -> [f64; FEATURE_DIM] {
    let mut out = *frame;
    out[0] = frame[0].max(0.0).log10().clamp(-SNR_LOG_CLIP, SNR_LOG_CLIP);
    out[1] = frame[1].clamp(-CORR_CLIP, CORR_CLIP);
    out[4] = (frame[4] + VAR_FLOOR).log10();
    out[5] = (frame[5] + VAR_FLOOR).log10();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn snr_cases() {
        let mut f = [1.0, 0.5, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        assert_eq!(compress_frame(&f)[0], 0.0);
        f[0] = 1e9;
        assert_eq!(compress_frame(&f)[0], 6.0);
        f[0] = 0.0;
        assert_eq!(compress_frame(&f)[0], -6.0);
        assert_eq!(compress_frame(&f)[5], -12.0);
        assert_eq!(compress_frame(&f)[1], 0.5);
        assert_eq!(&compress_frame(&f)[6..], &[0.0, 1.0]);
    }

    proptest! {
        #[test]
        fn clipping_is_idempotent(corr in -1e6f64..1e6, snr in 1e-20f64..1e20) {
            let f = [snr, corr, 0.6, 0.8, 0.3, 0.2, 1.0, 0.0];
            let once = compress_frame(&f);
            prop_assert!(once[0].abs() <= SNR_LOG_CLIP);
            prop_assert_eq!(once[1], once[1].clamp(-CORR_CLIP, CORR_CLIP));
            prop_assert_eq!(once[1].clamp(-CORR_CLIP, CORR_CLIP), once[1]);
        }
    }
}
