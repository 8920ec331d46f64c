use rand::seq::SliceRandom;

use crate::error::{Result, TadError};
use crate::rng;

/// Scene IDs assigned to each split.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SceneAssignment {
    pub train: Vec<u32>,
    pub validation: Vec<u32>,
    pub test: Vec<u32>,
}

/// Shuffles scenes and assigns them whole to train/validation/test.
/// Validation and test receive `floor(n * fraction)` scenes; train gets the
/// remainder.
pub fn split_scenes(scene_ids: &[u32], fractions: (f64, f64, f64), seed: u64) -> Result<SceneAssignment> {
    let (tr, va, te) = fractions;
    if [tr, va, te].iter().any(|f| !(0.0..=1.0).contains(f)) || (tr + va + te - 1.0).abs() > 1e-9 {
        return Err(TadError::invalid(format!("split fractions must be in [0,1] and sum to 1, got {fractions:?}")));
    }
    let mut ids = scene_ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != scene_ids.len() {
        return Err(TadError::invalid("duplicate scene IDs"));
    }
    ids.shuffle(&mut rng::substream(seed, "split"));
    let n = ids.len() as f64;
    let n_val = (n * va + 1e-9).floor() as usize;
    let n_test = (n * te + 1e-9).floor() as usize;
    let test = ids.split_off(ids.len() - n_test);
    let validation = ids.split_off(ids.len() - n_val);
    Ok(SceneAssignment { train: ids, validation, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_scenes_default_fractions() {
        let ids: Vec<u32> = (0..10).collect();
        let a = split_scenes(&ids, (0.7, 0.2, 0.1), 5).unwrap();
        assert_eq!((a.train.len(), a.validation.len(), a.test.len()), (7, 2, 1));
        let mut all: Vec<u32> = a.train.iter().chain(&a.validation).chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, ids);
        assert_eq!(split_scenes(&ids, (0.7, 0.2, 0.1), 5).unwrap(), a);
    }

    #[test]
    fn rejects_bad_fractions_and_duplicates() {
        assert!(split_scenes(&[1, 2], (0.5, 0.6, 0.1), 0).is_err());
        assert!(split_scenes(&[1, 1], (0.5, 0.5, 0.0), 0).is_err());
    }
}
