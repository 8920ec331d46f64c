//! TADF dataset files.
//!
//! A split file holds three sections (train, validation, test), each:
//!
//! ```text
//! "TADF" | version u16 | feature_dim u16 | M u16 | record count u64
//! records: M x feature_dim float32, then one u8 label
//! ```
//!
//! followed by a provenance trailer: `"TADP"` and, for each split in the same
//! order, a u32 scene count and that many u32 scene IDs. Everything is
//! little-endian.

use std::fs;
use std::path::Path;

use crate::dataset::sequences::{SequenceSet, StoredFrame};
use crate::dataset::split::SceneAssignment;
use crate::dataset::DatasetSplit;
use crate::error::{Result, TadError};
use crate::features::FEATURE_DIM;

pub const DATASET_MAGIC: &[u8; 4] = b"TADF";
const PROVENANCE_MAGIC: &[u8; 4] = b"TADP";
pub const DATASET_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 2 + 2 + 8;

pub fn encode_sequence_set(set: &SequenceSet, out: &mut Vec<u8>) -> Result<()> {
    let m = u16::try_from(set.m()).map_err(|_| TadError::invalid("sequence length exceeds u16"))?;
    out.extend_from_slice(DATASET_MAGIC);
    out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    out.extend_from_slice(&(FEATURE_DIM as u16).to_le_bytes());
    out.extend_from_slice(&m.to_le_bytes());
    out.extend_from_slice(&(set.len() as u64).to_le_bytes());
    for (frames, label) in set.iter() {
        for frame in frames {
            for v in frame {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out.push(u8::from(label));
    }
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, field: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(TadError::format(field, "unexpected end of file"));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, field: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, field)?.try_into().unwrap()))
    }

    fn u32(&mut self, field: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, field)?.try_into().unwrap()))
    }

    fn u64(&mut self, field: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, field)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

fn decode_sequence_set(cur: &mut Cursor<'_>) -> Result<SequenceSet> {
    if cur.remaining() < HEADER_LEN {
        return Err(TadError::format("header", "file too short for a TADF header"));
    }
    if cur.take(4, "magic")? != DATASET_MAGIC {
        return Err(TadError::format("magic", "expected \"TADF\""));
    }
    let version = cur.u16("version")?;
    if version != DATASET_VERSION {
        return Err(TadError::format("version", format!("unsupported version {version}")));
    }
    let dim = cur.u16("feature_dim")?;
    if usize::from(dim) != FEATURE_DIM {
        return Err(TadError::format("feature_dim", format!("expected {FEATURE_DIM}, found {dim}")));
    }
    let m = usize::from(cur.u16("M")?);
    if m == 0 {
        return Err(TadError::format("M", "sequence length is zero"));
    }
    let count = cur.u64("record count")?;
    let record_len = m * FEATURE_DIM * 4 + 1;
    let available = (cur.remaining() / record_len) as u64;
    if available < count {
        return Err(TadError::Integrity { expected: count, found: available });
    }
    let mut frames: Vec<StoredFrame> = Vec::with_capacity(count as usize * m);
    let mut labels = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let rec = cur.take(record_len, "record")?;
        for f in 0..m {
            let frame: StoredFrame = std::array::from_fn(|d| {
                let o = (f * FEATURE_DIM + d) * 4;
                f32::from_le_bytes(rec[o..o + 4].try_into().unwrap())
            });
            frames.push(frame);
        }
        labels.push(match rec[record_len - 1] {
            0 => false,
            1 => true,
            other => return Err(TadError::format("label", format!("expected 0 or 1, found {other}"))),
        });
    }
    SequenceSet::from_parts(m, frames, labels)
}

/// Reads a single TADF section from the start of `bytes`.
pub fn decode_single(bytes: &[u8]) -> Result<SequenceSet> {
    decode_sequence_set(&mut Cursor { buf: bytes, pos: 0 })
}

pub fn encode_dataset(split: &DatasetSplit) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for set in [&split.train, &split.validation, &split.test] {
        encode_sequence_set(set, &mut out)?;
    }
    out.extend_from_slice(PROVENANCE_MAGIC);
    for ids in [&split.scenes.train, &split.scenes.validation, &split.scenes.test] {
        out.extend_from_slice(&(ids.len() as u32).to_le_bytes());
        for id in ids {
            out.extend_from_slice(&id.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_dataset(bytes: &[u8]) -> Result<DatasetSplit> {
    let mut cur = Cursor { buf: bytes, pos: 0 };
    let train = decode_sequence_set(&mut cur)?;
    let validation = decode_sequence_set(&mut cur)?;
    let test = decode_sequence_set(&mut cur)?;
    if cur.take(4, "provenance")? != PROVENANCE_MAGIC {
        return Err(TadError::format("provenance", "expected \"TADP\""));
    }
    let mut read_ids = |field: &str| -> Result<Vec<u32>> {
        let n = cur.u32(field)?;
        (0..n).map(|_| cur.u32(field)).collect()
    };
    let scenes = SceneAssignment {
        train: read_ids("train scenes")?,
        validation: read_ids("validation scenes")?,
        test: read_ids("test scenes")?,
    };
    Ok(DatasetSplit { train, validation, test, scenes })
}

pub fn serialize_dataset(split: &DatasetSplit, path: &Path) -> Result<()> {
    fs::write(path, encode_dataset(split)?)?;
    Ok(())
}

pub fn deserialize_dataset(path: &Path) -> Result<DatasetSplit> {
    decode_dataset(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_split(n: usize, m: usize) -> DatasetSplit {
        let mk = |offset: usize, count: usize| {
            let mut s = SequenceSet::new(m);
            for i in 0..count {
                let frames: Vec<StoredFrame> =
                    (0..m).map(|f| std::array::from_fn(|d| ((offset + i) * 100 + f * 10 + d) as f32 * 0.125 - 7.0)).collect();
                s.push(&frames, (i + offset) % 2 == 0);
            }
            s
        };
        DatasetSplit {
            train: mk(0, n),
            validation: mk(1000, n / 2),
            test: mk(2000, 3),
            scenes: SceneAssignment { train: vec![3, 1], validation: vec![0], test: vec![7, 9] },
        }
    }

    #[test]
    fn truncated_file_reports_record_counts() {
        let split = sample_split(10, 4);
        let bytes = encode_dataset(&split).unwrap();
        let record_len = 4 * 8 * 4 + 1;
        let cut = &bytes[..HEADER_LEN + 6 * record_len + 3];
        match decode_dataset(cut) {
            Err(TadError::Integrity { expected, found }) => assert_eq!((expected, found), (10, 6)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_fields_are_little_endian() {
        let bytes = encode_dataset(&sample_split(2, 20)).unwrap();
        assert_eq!(&bytes[0..4], b"TADF");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(&bytes[6..8], &[8, 0]);
        assert_eq!(&bytes[8..10], &[20, 0]);
        assert_eq!(&bytes[10..18], &[2, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(&bytes[18..22], &(-7.0f32).to_le_bytes());
    }

    #[test]
    fn bad_magic_and_dimension_are_named() {
        let mut bytes = encode_dataset(&sample_split(2, 2)).unwrap();
        bytes[6] = 9;
        assert!(matches!(decode_dataset(&bytes), Err(TadError::Format { ref field, .. }) if field == "feature_dim"));
        bytes[0] = b'X';
        assert!(matches!(decode_dataset(&bytes), Err(TadError::Format { ref field, .. }) if field == "magic"));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.tadf");
        let split = sample_split(5, 20);
        serialize_dataset(&split, &path).unwrap();
        assert_eq!(deserialize_dataset(&path).unwrap(), split);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            values in prop::collection::vec(any::<f32>().prop_filter("finite", |v| v.is_finite()), 0..40),
            m in 1usize..4,
            ids in prop::collection::vec(any::<u32>(), 0..5),
        ) {
            let mut set = SequenceSet::new(m);
            for (i, chunk) in values.chunks(1).enumerate() {
                let frames: Vec<StoredFrame> = (0..m).map(|f| [chunk[0] * (f as f32 + 1.0); 8]).collect();
                set.push(&frames, i % 3 == 0);
            }
            let split = DatasetSplit {
                train: set.clone(),
                validation: SequenceSet::new(m),
                test: set,
                scenes: SceneAssignment { train: ids.clone(), validation: vec![], test: ids },
            };
            let back = decode_dataset(&encode_dataset(&split).unwrap()).unwrap();
            prop_assert_eq!(back, split);
        }
    }
}
