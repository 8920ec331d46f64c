//! Single-channel source signals.

use std::f64::consts::PI;
use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, TadError};
use crate::rng;

/// Kind of source waveform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// Band-limited noise carrier, gently modulated, gated by random pauses.
    SpeechSurrogate,
    /// Unit-amplitude sinusoid.
    Tone { freq_hz: f64 },
    /// A single unit sample at t = 0.
    Impulse,
}

/// A mono source plus the sample ranges where it is active.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSignal {
    pub samples: Vec<f64>,
    pub active: Vec<Range<usize>>,
}

impl SourceSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn active_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let active: usize = self.active.iter().map(|r| r.len()).sum();
        active as f64 / self.samples.len() as f64
    }

    /// True if every sample of `range` lies inside one active segment.
    pub fn is_active_over(&self, range: Range<usize>) -> bool {
        self.active.iter().any(|seg| seg.start <= range.start && range.end <= seg.end)
    }
}

// Duty-cycle band enforced on generated schedules. It sits inside [0.4, 0.8]
// and keeps the active-segment level well above the default noise floor.
const DUTY_MIN: f64 = 0.45;
const DUTY_MAX: f64 = 0.65;
const RAMP_SECONDS: f64 = 0.01;

pub fn synthesize_source_signal(
    duration: f64,
    kind: SourceKind,
    seed: u64,
    sample_rate: u32,
) -> Result<SourceSignal> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(TadError::invalid(format!("duration must be positive, got {duration}")));
    }
    if sample_rate == 0 {
        return Err(TadError::invalid("sample_rate must be positive"));
    }
    let fs = f64::from(sample_rate);
    let n = ((duration * fs).round() as usize).max(1);
    match kind {
        SourceKind::Tone { freq_hz } => {
            let samples = (0..n).map(|k| (2.0 * PI * freq_hz * k as f64 / fs).sin()).collect();
            Ok(SourceSignal { samples, active: vec![0..n] })
        }
        SourceKind::Impulse => {
            let mut samples = vec![0.0; n];
            samples[0] = 1.0;
            Ok(SourceSignal { samples, active: vec![0..1] })
        }
        SourceKind::SpeechSurrogate => Ok(speech_surrogate(n, fs, seed)),
    }
}

/// Gaussian noise band-limited to roughly 100 Hz - 3.5 kHz (one-pole
/// high-pass followed by a two-stage one-pole low-pass).
pub fn speech_band_noise(n: usize, fs: f64, rng: &mut impl Rng) -> Vec<f64> {
    let hp_pole = (-2.0 * PI * 100.0 / fs).exp();
    let lp_pole = (-2.0 * PI * 3500.0 / fs).exp();
    let (mut hp_in, mut hp_out, mut lp1, mut lp2) = (0.0, 0.0, 0.0, 0.0);
    (0..n)
        .map(|_| {
            let w: f64 = StandardNormal.sample(rng);
            hp_out = hp_pole * (hp_out + w - hp_in);
            hp_in = w;
            lp1 = (1.0 - lp_pole) * hp_out + lp_pole * lp1;
            lp2 = (1.0 - lp_pole) * lp1 + lp_pole * lp2;
            lp2
        })
        .collect()
}

fn activity_schedule(n: usize, fs: f64, rng: &mut impl Rng) -> Vec<Range<usize>> {
    let secs = |s: f64| (s * fs).round() as usize;
    for _ in 0..1000 {
        let mut segments = Vec::new();
        let mut pos = if rng.random_bool(0.5) { secs(rng.random_range(0.05..0.5)) } else { 0 };
        while pos < n {
            let talk = secs(rng.random_range(0.4..1.6));
            let end = (pos + talk).min(n);
            if end > pos {
                segments.push(pos..end);
            }
            pos = end + secs(rng.random_range(0.25..0.9));
        }
        let active: usize = segments.iter().map(|r| r.len()).sum();
        let duty = active as f64 / n as f64;
        if (DUTY_MIN..=DUTY_MAX).contains(&duty) {
            return segments;
        }
    }
    // Too short for a random schedule to land in the band: one centered burst.
    let len = ((0.55 * n as f64).round() as usize).max(1);
    let start = (n - len) / 2;
    vec![start..start + len]
}

fn speech_surrogate(n: usize, fs: f64, seed: u64) -> SourceSignal {
    let mut sched_rng = rng::substream(seed, "schedule");
    let mut carrier_rng = rng::substream(seed, "carrier");
    let active = activity_schedule(n, fs, &mut sched_rng);
    let carrier = speech_band_noise(n, fs, &mut carrier_rng);

    let mut samples = vec![0.0; n];
    let ramp = ((RAMP_SECONDS * fs).round() as usize).max(1);
    for seg in &active {
        let rate = sched_rng.random_range(3.0..6.0);
        let phase = sched_rng.random_range(0.0..2.0 * PI);
        let len = seg.len();
        for (i, k) in seg.clone().enumerate() {
            let t = k as f64 / fs;
            let syllabic = 0.9 + 0.1 * (2.0 * PI * rate * t + phase).sin();
            let edge = i.min(len - 1 - i);
            let gate = if edge < ramp { 0.5 - 0.5 * (PI * (edge as f64 + 0.5) / ramp as f64).cos() } else { 1.0 };
            samples[k] = carrier[k] * syllabic * gate;
        }
    }

    let active_len: usize = active.iter().map(|r| r.len()).sum();
    let energy: f64 = active.iter().flat_map(|r| samples[r.clone()].iter()).map(|v| v * v).sum();
    if energy > 0.0 {
        let gain = (active_len as f64 / energy).sqrt();
        samples.iter_mut().for_each(|v| *v *= gain);
    }
    SourceSignal { samples, active }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tone_rms_is_peak_over_sqrt2() {
        let s = synthesize_source_signal(1.0, SourceKind::Tone { freq_hz: 1000.0 }, 3, 16_000).unwrap();
        let peak = s.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rms = (s.samples.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt();
        assert!((peak - 1.0).abs() < 1e-9);
        assert!((rms - peak / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn impulse_is_single_unit_sample() {
        let s = synthesize_source_signal(1.0, SourceKind::Impulse, 0, 16_000).unwrap();
        assert_eq!(s.len(), 16_000);
        assert_eq!(s.samples[0], 1.0);
        assert!(s.samples[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn non_positive_duration_is_rejected() {
        assert!(matches!(
            synthesize_source_signal(0.0, SourceKind::Impulse, 0, 16_000),
            Err(TadError::InvalidArgument(_))
        ));
        assert!(synthesize_source_signal(-1.0, SourceKind::SpeechSurrogate, 0, 16_000).is_err());
    }

    #[test]
    fn speech_surrogate_envelope_duty_cycle() {
        let s = synthesize_source_signal(20.0, SourceKind::SpeechSurrogate, 7, 16_000).unwrap();
        // Envelope: RMS over 10 ms windows centred on each sample; count
        // samples whose envelope exceeds -40 dBFS.
        let half = 80;
        let n = s.len();
        let mut prefix = vec![0.0; n + 1];
        for (i, v) in s.samples.iter().enumerate() {
            prefix[i + 1] = prefix[i] + v * v;
        }
        let above = (0..n)
            .filter(|&k| {
                let lo = k.saturating_sub(half);
                let hi = (k + half).min(n);
                ((prefix[hi] - prefix[lo]) / (hi - lo) as f64).sqrt() > 0.01
            })
            .count();
        let fraction = above as f64 / n as f64;
        assert!((0.4..=0.8).contains(&fraction), "active fraction {fraction}");
    }

    #[test]
    fn speech_surrogate_unit_rms_over_active_and_deterministic() {
        let a = synthesize_source_signal(5.0, SourceKind::SpeechSurrogate, 11, 16_000).unwrap();
        let b = synthesize_source_signal(5.0, SourceKind::SpeechSurrogate, 11, 16_000).unwrap();
        assert_eq!(a, b);
        let (mut e, mut m) = (0.0, 0usize);
        for r in &a.active {
            e += a.samples[r.clone()].iter().map(|v| v * v).sum::<f64>();
            m += r.len();
        }
        assert!(((e / m as f64) - 1.0).abs() < 1e-9);
        let c = synthesize_source_signal(5.0, SourceKind::SpeechSurrogate, 12, 16_000).unwrap();
        assert_ne!(a.samples, c.samples);
    }
}
