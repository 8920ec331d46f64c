//! 4-channel 16-bit PCM WAV input and output.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Result, TadError};
use crate::scene::mix::MultichannelRecording;

const CHANNELS: u16 = 4;
const BITS: u16 = 16;

fn wav_error(e: hound::Error) -> TadError {
    match e {
        hound::Error::IoError(io) => TadError::Io(io),
        other => TadError::format("header", other.to_string()),
    }
}

/// Writes `rec` as PCM16. Samples are clipped to [-1, 1) and rounded.
pub fn write_wav(path: &Path, rec: &MultichannelRecording) -> Result<()> {
    let spec = WavSpec {
        channels: CHANNELS,
        sample_rate: rec.sample_rate,
        bits_per_sample: BITS,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_error)?;
    for k in 0..rec.len() {
        for ch in &rec.channels {
            let q = (ch[k] * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
            writer.write_sample(q).map_err(wav_error)?;
        }
    }
    writer.finalize().map_err(wav_error)
}

pub fn ingest_wav(path: &Path) -> Result<MultichannelRecording> {
    let reader = WavReader::open(path).map_err(wav_error)?;
    let spec = reader.spec();
    if spec.channels != CHANNELS {
        return Err(TadError::format("channels", format!("expected 4 channels, found {}", spec.channels)));
    }
    if spec.sample_format != SampleFormat::Int || spec.bits_per_sample != BITS {
        return Err(TadError::format(
            "bits_per_sample",
            format!("expected 16-bit integer PCM, found {}-bit {:?}", spec.bits_per_sample, spec.sample_format),
        ));
    }
    let mut channels: [Vec<f64>; 4] = Default::default();
    for (i, s) in reader.into_samples::<i16>().enumerate() {
        let s = s.map_err(wav_error)?;
        channels[i % 4].push(f64::from(s) / 32768.0);
    }
    if channels.iter().any(|c| c.len() != channels[0].len()) {
        return Err(TadError::format("data", "sample count is not a multiple of the channel count"));
    }
    MultichannelRecording::new(channels, spec.sample_rate)
}
