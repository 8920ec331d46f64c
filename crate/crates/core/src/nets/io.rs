//! TADM model files.
//!
//! ```text
//! "TADM" | version u16 | kind u8 (0 FNN, 1 RNN, 2 LSTM, 3 GRU)
//! layers u16 | neurons u16 | input_dim u16 | output_dim u16
//! learned_init u8 | peepholes u8 | parameter count u64
//! parameters: float64, tensors in canonical `ParamSet` order, row-major
//! ```
//!
//! All integers and floats are little-endian.

use std::fs;
use std::path::Path;

use crate::error::{Result, TadError};
use crate::nets::params::{zero_params, ParamSet};
use crate::nets::spec::{count_params, Kind, NetworkSpec};

pub const MODEL_MAGIC: &[u8; 4] = b"TADM";
pub const MODEL_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 2 * 4 + 1 + 1 + 8;

fn kind_code(kind: Kind) -> u8 {
    match kind {
        Kind::Fnn => 0,
        Kind::Rnn => 1,
        Kind::Lstm => 2,
        Kind::Gru => 3,
    }
}

pub fn encode_model(spec: &NetworkSpec, params: &ParamSet) -> Result<Vec<u8>> {
    params.check(spec)?;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * params.count());
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.push(kind_code(spec.kind));
    for v in [spec.layers, spec.neurons, spec.input_dim, spec.output_dim] {
        let v = u16::try_from(v).map_err(|_| TadError::invalid("network dimension exceeds u16"))?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.push(u8::from(spec.learned_init));
    out.push(u8::from(spec.peepholes));
    out.extend_from_slice(&(params.count() as u64).to_le_bytes());
    for v in params.iter_values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_model(bytes: &[u8]) -> Result<(NetworkSpec, ParamSet)> {
    if bytes.len() < HEADER_LEN {
        return Err(TadError::format("header", "file too short for a TADM header"));
    }
    if &bytes[..4] != MODEL_MAGIC {
        return Err(TadError::format("magic", "expected \"TADM\""));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let version = u16_at(4);
    if version != MODEL_VERSION {
        return Err(TadError::format("version", format!("unsupported version {version}")));
    }
    let kind = match bytes[6] {
        0 => Kind::Fnn,
        1 => Kind::Rnn,
        2 => Kind::Lstm,
        3 => Kind::Gru,
        k => return Err(TadError::format("kind", format!("unknown network kind code {k}"))),
    };
    let flag = |o: usize, field: &str| match bytes[o] {
        0 => Ok(false),
        1 => Ok(true),
        v => Err(TadError::format(field, format!("expected 0 or 1, found {v}"))),
    };
    let spec = NetworkSpec {
        kind,
        layers: usize::from(u16_at(7)),
        neurons: usize::from(u16_at(9)),
        input_dim: usize::from(u16_at(11)),
        output_dim: usize::from(u16_at(13)),
        learned_init: flag(15, "learned_init")?,
        peepholes: flag(16, "peepholes")?,
    };
    spec.validate().map_err(|e| TadError::format("spec", e.to_string()))?;
    let count = u64::from_le_bytes(bytes[17..25].try_into().unwrap());
    let expected = count_params(&spec) as u64;
    if count != expected {
        return Err(TadError::format("parameter count", format!("spec implies {expected}, header says {count}")));
    }
    let available = ((bytes.len() - HEADER_LEN) / 8) as u64;
    if available != count {
        return Err(TadError::Integrity { expected: count, found: available });
    }
    let mut params = zero_params(&spec);
    for (v, chunk) in params.iter_values_mut().zip(bytes[HEADER_LEN..].chunks_exact(8)) {
        *v = f64::from_le_bytes(chunk.try_into().unwrap());
    }
    Ok((spec, params))
}

pub fn save_model(spec: &NetworkSpec, params: &ParamSet, path: &Path) -> Result<()> {
    fs::write(path, encode_model(spec, params)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(NetworkSpec, ParamSet)> {
    decode_model(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::params::init_params;
    use proptest::prelude::*;

    #[test]
    fn truncated_and_corrupt_files_are_rejected() {
        let spec = NetworkSpec::new(Kind::Lstm, 2, 4, 8).unwrap();
        let bytes = encode_model(&spec, &init_params(&spec, 1).unwrap()).unwrap();
        assert!(matches!(decode_model(&bytes[..bytes.len() - 8]), Err(TadError::Integrity { .. })));
        let mut bad = bytes.clone();
        bad[6] = 9;
        assert!(matches!(decode_model(&bad), Err(TadError::Format { ref field, .. }) if field == "kind"));
        assert!(decode_model(&bytes[..10]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.tadm");
        let spec = NetworkSpec::new(Kind::Fnn, 3, 8, 160).unwrap();
        let p = init_params(&spec, 5).unwrap();
        save_model(&spec, &p, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), (spec, p));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(kind_idx in 0usize..4, l in 1usize..=3, n in 1usize..=6, seed in any::<u64>()) {
            let spec = NetworkSpec::new(Kind::ALL[kind_idx], l, n, 8).unwrap();
            let mut p = init_params(&spec, seed).unwrap();
            for (i, v) in p.iter_values_mut().enumerate() {
                *v += (i as f64 * 1e-7).sin() * 1e-300;
            }
            let (s2, p2) = decode_model(&encode_model(&spec, &p).unwrap()).unwrap();
            prop_assert_eq!(s2, spec);
            let a: Vec<u64> = p.iter_values().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = p2.iter_values().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }
}
