use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, TadError};
use crate::rng;
use crate::scene::geometry::ArrayGeometry;
use crate::scene::propagate::{fractional_delay, propagate_to_array};
use crate::scene::signal::{synthesize_source_signal, SourceKind, SourceSignal};

pub const MAX_INTERFERERS: usize = 4;
pub const MAX_DOA_DEG: f64 = 135.0;

/// A single discrete reflection added to every source (off by default).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Echo {
    pub delay_s: f64,
    pub gain: f64,
}

/// One static synthetic scene: a target, up to four interferers, diffuse noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub target_doa: f64,
    pub interferer_doas: Vec<f64>,
    pub duration: f64,
    /// Informational only: propagation is far-field.
    pub source_distance: f64,
    /// Diffuse noise level per channel, dB relative to a speech source.
    /// `f64::NEG_INFINITY` disables noise.
    pub noise_level_db: f64,
    pub seed: u64,
    /// When false the target is left out of the mix (interferer-only scene).
    pub target_active: bool,
    pub echo: Option<Echo>,
}

impl SceneSpec {
    pub fn new(target_doa: f64, interferer_doas: Vec<f64>, duration: f64, seed: u64) -> Self {
        SceneSpec {
            target_doa,
            interferer_doas,
            duration,
            source_distance: 1.0,
            noise_level_db: -10.0,
            seed,
            target_active: true,
            echo: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_doa = |d: f64| {
            if d.is_finite() && d.abs() <= MAX_DOA_DEG {
                Ok(())
            } else {
                Err(TadError::invalid(format!("DOA {d} outside +/-{MAX_DOA_DEG} degrees")))
            }
        };
        check_doa(self.target_doa)?;
        for &d in &self.interferer_doas {
            check_doa(d)?;
        }
        if self.interferer_doas.len() > MAX_INTERFERERS {
            return Err(TadError::invalid(format!(
                "at most {MAX_INTERFERERS} interferers, got {}",
                self.interferer_doas.len()
            )));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(TadError::invalid("duration must be positive"));
        }
        if self.noise_level_db.is_nan() || self.noise_level_db == f64::INFINITY {
            return Err(TadError::invalid("noise_level_db must be finite or -inf"));
        }
        if let Some(echo) = self.echo {
            if !(echo.delay_s >= 0.0) || !echo.gain.is_finite() {
                return Err(TadError::invalid("echo needs a non-negative delay and finite gain"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultichannelRecording {
    pub channels: [Vec<f64>; 4],
    pub sample_rate: u32,
}

impl MultichannelRecording {
    pub fn new(channels: [Vec<f64>; 4], sample_rate: u32) -> Result<Self> {
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(TadError::invalid("all channels must have equal length"));
        }
        if channels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(TadError::invalid("recording contains non-finite samples"));
        }
        Ok(MultichannelRecording { channels, sample_rate })
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ground-truth split of a mixture into target and everything else.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComponents {
    pub target: [Vec<f64>; 4],
    pub interference_plus_noise: [Vec<f64>; 4],
}

/// Everything `mix_scene` produces.
#[derive(Debug, Clone)]
pub struct MixedScene {
    pub recording: MultichannelRecording,
    pub components: OracleComponents,
    /// The target's dry signal (with its activity segments), even when the
    /// target is muted in the mix.
    pub target_source: SourceSignal,
}

fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn diffuse_noise_channel(n: usize, seed: u64, channel: usize, fs: f64, level: f64) -> Vec<f64> {
    let mut rng = rng::substream(seed, &format!("noise{channel}"));
    // One-pole low-pass at 1 kHz gives a babble-like spectral tilt.
    let pole = (-2.0 * PI * 1000.0 / fs).exp();
    let mut state = 0.0;
    let mut out: Vec<f64> = (0..n)
        .map(|_| {
            let w: f64 = StandardNormal.sample(&mut rng);
            state = (1.0 - pole) * w + pole * state;
            state
        })
        .collect();
    let r = rms(&out);
    if r > 0.0 {
        let g = level / r;
        out.iter_mut().for_each(|v| *v *= g);
    }
    out
}

fn render_source(signal: &[f64], doa: f64, geometry: &ArrayGeometry, echo: Option<Echo>) -> Result<[Vec<f64>; 4]> {
    let mut out = propagate_to_array(signal, doa, geometry)?;
    if let Some(echo) = echo {
        let delay = echo.delay_s * geometry.fs();
        for ch in out.iter_mut() {
            let reflected = fractional_delay(ch, delay);
            ch.iter_mut().zip(reflected).for_each(|(v, r)| *v += echo.gain * r);
        }
    }
    Ok(out)
}

/// Mixes a scene. Every speech source is scaled to unit long-term RMS before
/// propagation; noise is independent per channel at `noise_level_db` below
/// that level.
pub fn mix_scene(spec: &SceneSpec, geometry: &ArrayGeometry) -> Result<MixedScene> {
    spec.validate()?;
    let fs = geometry.sample_rate();
    let unit_rms = |mut s: SourceSignal| {
        let r = rms(&s.samples);
        if r > 0.0 {
            s.samples.iter_mut().for_each(|v| *v /= r);
        }
        s
    };
    let target_source = unit_rms(synthesize_source_signal(
        spec.duration,
        SourceKind::SpeechSurrogate,
        rng::substream_seed(spec.seed, "target"),
        fs,
    )?);
    let n = target_source.len();

    let mut target: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
    if spec.target_active {
        target = render_source(&target_source.samples, spec.target_doa, geometry, spec.echo)?;
    }

    let mut rest: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
    for (i, &doa) in spec.interferer_doas.iter().enumerate() {
        let src = unit_rms(synthesize_source_signal(
            spec.duration,
            SourceKind::SpeechSurrogate,
            rng::substream_seed(spec.seed, &format!("interferer{i}")),
            fs,
        )?);
        let rendered = render_source(&src.samples, doa, geometry, spec.echo)?;
        for (acc, ch) in rest.iter_mut().zip(rendered) {
            acc.iter_mut().zip(ch).for_each(|(a, v)| *a += v);
        }
    }
    if spec.noise_level_db > f64::NEG_INFINITY {
        let level = 10f64.powf(spec.noise_level_db / 20.0);
        for (c, acc) in rest.iter_mut().enumerate() {
            let noise = diffuse_noise_channel(n, spec.seed, c, geometry.fs(), level);
            acc.iter_mut().zip(noise).for_each(|(a, v)| *a += v);
        }
    }

    let channels: [Vec<f64>; 4] =
        std::array::from_fn(|c| target[c].iter().zip(&rest[c]).map(|(t, r)| t + r).collect());
    Ok(MixedScene {
        recording: MultichannelRecording::new(channels, fs)?,
        components: OracleComponents { target, interference_plus_noise: rest },
        target_source,
    })
}
