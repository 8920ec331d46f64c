//! Adaptive first-order differential nullformer on one microphone pair.
//!
//! Back-to-back cardioids are formed from the front/back pair with the
//! acoustic travel time `T = d / c` across the pair (windowed-sinc fractional
//! delay):
//!
//! ```text
//! c_f(k) = front(k) - back(k - T)
//! c_b(k) = back(k)  - front(k - T)
//! y(k)   = c_f(k) - beta * (c_f(k) + c_b(k))
//! ```
//!
//! For a single plane wave arriving at angle `psi` from the front, `y` is
//! nulled near `beta = (1 + cos psi) / 2`, so `beta` in [0, 1] sweeps the null
//! over the whole half plane. `beta` is adapted per hop with normalized LMS and
//! mapped to an azimuth through a table measured by simulation.

use crate::error::Result;
use crate::rng;
use crate::scene::geometry::{ArrayGeometry, Side};
use crate::scene::propagate::{propagate_to_array, windowed_sinc_taps};
use crate::scene::signal::speech_band_noise;

pub const DEFAULT_STEP_SIZE: f64 = 0.05;
pub const NLMS_REGULARIZER: f64 = 1e-9;
pub const CALIBRATION_STEP_DEG: f64 = 5.0;
pub const CALIBRATION_MAX_DEG: f64 = 135.0;

/// Picks the pair on the target's side; broadside goes left.
pub fn side_select(target_doa: f64) -> Side {
    if target_doa > 0.0 {
        Side::Right
    } else {
        Side::Left
    }
}

// Half-width of the interpolator realizing the fractional travel time; both
// cardioid inputs carry this much extra latency so the filter stays causal.
const DELAY_HALF_WIDTH: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct NullformerState {
    pub beta: f64,
    pub step_size: f64,
    pub side: Side,
    /// Whole-sample part of the inter-mic travel time.
    whole: usize,
    taps: Vec<(i64, f64)>,
    /// Most recent samples, oldest first; long enough for the interpolator.
    front_hist: Vec<f64>,
    back_hist: Vec<f64>,
}

impl NullformerState {
    pub fn new(side: Side, geometry: &ArrayGeometry) -> Self {
        Self::with_step_size(side, geometry, DEFAULT_STEP_SIZE)
    }

    pub fn with_step_size(side: Side, geometry: &ArrayGeometry, step_size: f64) -> Self {
        let delay = geometry.pair_spacing(side) / geometry.speed_of_sound() * geometry.fs();
        let whole = delay.floor() as usize;
        let hist = DELAY_HALF_WIDTH + whole + DELAY_HALF_WIDTH;
        NullformerState {
            beta: 0.5,
            step_size,
            side,
            whole,
            taps: windowed_sinc_taps(delay - whole as f64, DELAY_HALF_WIDTH),
            front_hist: vec![0.0; hist],
            back_hist: vec![0.0; hist],
        }
    }

    /// Forward and backward cardioid outputs for a run of new pair samples.
    fn cardioids(&mut self, front: &[f64], back: &[f64]) -> Vec<(f64, f64)> {
        assert_eq!(front.len(), back.len());
        let hist = self.front_hist.len();
        let mut f_buf = self.front_hist.clone();
        f_buf.extend_from_slice(front);
        let mut b_buf = self.back_hist.clone();
        b_buf.extend_from_slice(back);

        let lat = DELAY_HALF_WIDTH;
        let base = lat + self.whole;
        let delayed = |buf: &[f64], i: usize| -> f64 {
            self.taps.iter().map(|&(j, w)| w * buf[(i as i64 - base as i64 - j) as usize]).sum()
        };
        let out = (hist..f_buf.len())
            .map(|i| (f_buf[i - lat] - delayed(&b_buf, i), b_buf[i - lat] - delayed(&f_buf, i)))
            .collect();

        let keep = f_buf.len() - hist;
        self.front_hist.copy_from_slice(&f_buf[keep..]);
        self.back_hist.copy_from_slice(&b_buf[keep..]);
        out
    }

    /// Runs one NLMS update over a hop of pair samples and returns the new beta.
    pub fn update(&mut self, front: &[f64], back: &[f64]) -> f64 {
        let (mut cross, mut power) = (0.0, 0.0);
        for (cf, cb) in self.cardioids(front, back) {
            let u = cf + cb;
            let y = cf - self.beta * u;
            cross += y * u;
            power += u * u;
        }
        self.beta = (self.beta + self.step_size * cross / (power + NLMS_REGULARIZER)).clamp(0.0, 1.0);
        self.beta
    }
}

/// Converged beta for each calibration azimuth, per side.
#[derive(Debug, Clone, PartialEq)]
pub struct NullformerCalibration {
    /// (azimuth in degrees, beta), right side: 0..=135.
    right: Vec<(f64, f64)>,
    /// Left side: 0..=-135.
    left: Vec<(f64, f64)>,
}

const CALIBRATION_SECONDS: f64 = 2.0;
const CALIBRATION_SEED: u64 = 0x7ad_ca1;

/// Point the NLMS converges to in the mean: `E[c_f u] / E[u^2]`, clipped.
pub fn converged_beta(state: &mut NullformerState, front: &[f64], back: &[f64]) -> f64 {
    let (mut cross, mut power) = (0.0, 0.0);
    for (cf, cb) in state.cardioids(front, back) {
        let u = cf + cb;
        cross += cf * u;
        power += u * u;
    }
    (cross / (power + NLMS_REGULARIZER)).clamp(0.0, 1.0)
}

impl NullformerCalibration {
    /// Simulates a speech-band noise plane wave at every grid azimuth and
    /// records the beta the adaptation converges to.
    pub fn build(geometry: &ArrayGeometry) -> Result<Self> {
        let n = (CALIBRATION_SECONDS * geometry.fs()) as usize;
        let mut noise_rng = rng::substream(CALIBRATION_SEED, "calibration");
        let source = speech_band_noise(n, geometry.fs(), &mut noise_rng);
        let steps = (CALIBRATION_MAX_DEG / CALIBRATION_STEP_DEG).round() as i64;
        let measure = |doa: f64, side: Side| -> Result<f64> {
            let ch = propagate_to_array(&source, doa, geometry)?;
            let (fi, bi) = side.pair();
            let mut state = NullformerState::new(side, geometry);
            Ok(converged_beta(&mut state, &ch[fi], &ch[bi]))
        };
        let mut right = Vec::new();
        let mut left = Vec::new();
        for i in 0..=steps {
            let deg = i as f64 * CALIBRATION_STEP_DEG;
            right.push((deg, measure(deg, Side::Right)?));
            left.push((-deg, measure(-deg, Side::Left)?));
        }
        Ok(NullformerCalibration { right, left })
    }

    pub fn table(&self, side: Side) -> &[(f64, f64)] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Azimuth whose calibrated beta is nearest to `beta` (first on ties).
    pub fn doa_for_beta(&self, side: Side, beta: f64) -> f64 {
        self.table(side)
            .iter()
            .fold((f64::INFINITY, 0.0), |best, &(deg, b)| {
                let d = (b - beta).abs();
                if d < best.0 {
                    (d, deg)
                } else {
                    best
                }
            })
            .1
    }
}

/// One nullformer hop: updates the state and returns the azimuth estimate.
pub fn nullformer_step(
    state: &mut NullformerState,
    front: &[f64],
    back: &[f64],
    calibration: &NullformerCalibration,
) -> f64 {
    let beta = state.update(front, back);
    calibration.doa_for_beta(state.side, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn side_selection() {
        assert_eq!(side_select(-45.0), Side::Left);
        assert_eq!(side_select(45.0), Side::Right);
        assert_eq!(side_select(0.0), Side::Left);
    }

    #[test]
    fn zero_input_leaves_beta_unchanged() {
        let g = ArrayGeometry::default();
        let mut s = NullformerState::new(Side::Right, &g);
        s.beta = 0.37;
        s.update(&[0.0; 16], &[0.0; 16]);
        assert_eq!(s.beta, 0.37);
    }

    #[test]
    fn beta_stays_clipped_under_random_input() {
        let g = ArrayGeometry::default();
        let mut s = NullformerState::with_step_size(Side::Left, &g, 1.5);
        let mut r = rng::rng(5);
        let mut f = [0.0; 16];
        let mut b = [0.0; 16];
        // 10^6 samples of adversarial-scale input
        for _ in 0..62_500 {
            let scale = 10f64.powf(r.random_range(-6.0..6.0));
            f.iter_mut().for_each(|v| *v = scale * r.random_range(-1.0..1.0));
            b.iter_mut().for_each(|v| *v = scale * r.random_range(-1.0..1.0));
            let beta = s.update(&f, &b);
            assert!((0.0..=1.0).contains(&beta));
        }
    }

    #[test]
    fn calibration_table_is_monotone() {
        let cal = NullformerCalibration::build(&ArrayGeometry::default()).unwrap();
        for side in [Side::Left, Side::Right] {
            let t = cal.table(side);
            assert_eq!(t.len(), 28);
            // beta falls as the source moves from the front towards the back;
            // within ~10 degrees of the front the curve is flat.
            for w in t[2..].windows(2) {
                let (a, b) = (w[0], w[1]);
                assert!(b.1 < a.1, "{side:?} not monotone at {a:?} -> {b:?}");
            }
        }
    }

    #[test]
    fn converged_estimate_tracks_grid_azimuths() {
        let g = ArrayGeometry::default();
        let cal = NullformerCalibration::build(&g).unwrap();
        let mut r = rng::substream(99, "src");
        let src = speech_band_noise(32_000, g.fs(), &mut r);
        for i in -27..=27 {
            let doa = 5.0 * i as f64;
            let ch = propagate_to_array(&src, doa, &g).unwrap();
            let side = side_select(doa);
            let (fi, bi) = side.pair();
            let mut s = NullformerState::new(side, &g);
            let hops = src.len() / 16;
            let mut mean_beta = 0.0;
            for h in 0..hops {
                let range = h * 16..(h + 1) * 16;
                let beta = s.update(&ch[fi][range.clone()], &ch[bi][range]);
                if h >= hops / 2 {
                    mean_beta += beta / (hops - hops / 2) as f64;
                }
            }
            let est = cal.doa_for_beta(side, mean_beta);
            assert!((est - doa).abs() <= 5.0, "doa {doa}: estimate {est} (beta {mean_beta})");
        }
    }
}

