use rand::seq::IndexedRandom;

use crate::error::{Result, TadError};
use crate::features::FEATURE_DIM;
use crate::rng;

pub type StoredFrame = [f32; FEATURE_DIM];

/// `m` consecutive frames labeled by the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSample {
    pub frames: Vec<StoredFrame>,
    pub label: bool,
}

/// A collection of equal-length sequences stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSet {
    m: usize,
    frames: Vec<StoredFrame>,
    labels: Vec<bool>,
}

impl SequenceSet {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "sequence length must be at least 1");
        SequenceSet { m, frames: Vec::new(), labels: Vec::new() }
    }

    pub fn from_parts(m: usize, frames: Vec<StoredFrame>, labels: Vec<bool>) -> Result<Self> {
        if m == 0 || frames.len() != m * labels.len() {
            return Err(TadError::invalid(format!(
                "{} frames cannot hold {} sequences of length {m}",
                frames.len(),
                labels.len()
            )));
        }
        Ok(SequenceSet { m, frames, labels })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn frames(&self, i: usize) -> &[StoredFrame] {
        &self.frames[i * self.m..(i + 1) * self.m]
    }

    pub fn label(&self, i: usize) -> bool {
        self.labels[i]
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> SequenceSample {
        SequenceSample { frames: self.frames(i).to_vec(), label: self.labels[i] }
    }

    pub fn push(&mut self, frames: &[StoredFrame], label: bool) {
        assert_eq!(frames.len(), self.m, "sequence length mismatch");
        self.frames.extend_from_slice(frames);
        self.labels.push(label);
    }

    pub fn extend(&mut self, other: &SequenceSet) {
        assert_eq!(self.m, other.m, "sequence length mismatch");
        self.frames.extend_from_slice(&other.frames);
        self.labels.extend_from_slice(&other.labels);
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l).count();
        (pos, self.len() - pos)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[StoredFrame], bool)> + '_ {
        self.frames.chunks_exact(self.m).zip(self.labels.iter().copied())
    }
}

/// Sliding windows of `m` frames every `stride` frames, each labeled by its
/// final frame.
pub fn frame_sequences(frames: &[[f64; FEATURE_DIM]], labels: &[bool], m: usize, stride: usize) -> Result<SequenceSet> {
    if m == 0 || stride == 0 {
        return Err(TadError::invalid("sequence length and stride must be at least 1"));
    }
    if frames.len() != labels.len() {
        return Err(TadError::invalid("frames and labels differ in length"));
    }
    let stored: Vec<StoredFrame> = frames.iter().map(|f| f.map(|v| v as f32)).collect();
    let mut set = SequenceSet::new(m);
    let mut start = 0;
    while start + m <= stored.len() {
        set.push(&stored[start..start + m], labels[start + m - 1]);
        start += stride;
    }
    Ok(set)
}

/// Duplicates randomly chosen minority-class sequences until both classes
/// have equal counts. The majority class and the original order are kept;
/// duplicates are appended.
pub fn balance_upsample(set: &SequenceSet, seed: u64) -> SequenceSet {
    let (pos, neg) = set.class_counts();
    let mut out = set.clone();
    if pos == neg || pos == 0 || neg == 0 {
        return out;
    }
    let minority_label = pos < neg;
    let minority: Vec<usize> = (0..set.len()).filter(|&i| set.label(i) == minority_label).collect();
    let mut r = rng::substream(seed, "balance");
    for _ in 0..pos.abs_diff(neg) {
        let &i = minority.choose(&mut r).expect("minority class is non-empty");
        out.push(set.frames(i), minority_label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(n: usize) -> (Vec<[f64; 8]>, Vec<bool>) {
        let frames = (0..n).map(|k| [k as f64; 8]).collect();
        let labels = (0..n).map(|k| k % 3 == 0).collect();
        (frames, labels)
    }

    #[test]
    fn sequence_counts_and_alignment() {
        let (f, l) = ramp(20);
        assert_eq!(frame_sequences(&f, &l, 20, 1).unwrap().len(), 1);
        let (f, l) = ramp(57);
        let s = frame_sequences(&f, &l, 20, 1).unwrap();
        assert_eq!(s.len(), 57 - 20 + 1);
        for i in 0..s.len() {
            assert_eq!(s.label(i), l[i + 19]);
            assert_eq!(s.frames(i)[19][0], (i + 19) as f32);
        }
        assert_eq!(frame_sequences(&f, &l, 20, 5).unwrap().len(), 8);
        assert!(frame_sequences(&f, &l, 0, 1).is_err());
    }

    #[test]
    fn label_depends_only_on_final_frame() {
        let (f, mut l) = ramp(25);
        let a = frame_sequences(&f, &l, 5, 1).unwrap();
        l[0] = !l[0];
        l[1] = !l[1];
        l[2] = !l[2];
        let b = frame_sequences(&f, &l, 5, 1).unwrap();
        assert_eq!(a.labels(), b.labels());
    }

    #[test]
    fn balancing_cases() {
        let mut s = SequenceSet::new(1);
        for i in 0..400 {
            s.push(&[[i as f32; 8]], i < 100);
        }
        let b = balance_upsample(&s, 3);
        assert_eq!(b.class_counts(), (300, 300));
        assert_eq!(balance_upsample(&b, 3), b);
        assert_eq!(balance_upsample(&s, 3), b);
        assert_ne!(balance_upsample(&s, 4), b);
    }

    proptest! {
        #[test]
        fn balancing_only_adds_verbatim_minority_copies(labels in prop::collection::vec(any::<bool>(), 1..200), seed in any::<u64>()) {
            let mut s = SequenceSet::new(2);
            for (i, &l) in labels.iter().enumerate() {
                s.push(&[[i as f32; 8], [-(i as f32); 8]], l);
            }
            let b = balance_upsample(&s, seed);
            let (p, n) = b.class_counts();
            let (p0, n0) = s.class_counts();
            if p0 > 0 && n0 > 0 {
                prop_assert_eq!(p, n);
            } else {
                prop_assert_eq!(b.len(), s.len());
            }
            prop_assert_eq!(&b.labels()[..s.len()], s.labels());
            for i in s.len()..b.len() {
                let src = b.frames(i)[0][0] as usize;
                prop_assert_eq!(b.frames(i), s.frames(src));
                prop_assert_eq!(b.label(i), s.label(src));
                prop_assert!(p0.min(n0) > 0 && b.label(i) == (p0 < n0));
            }
        }
    }
}
