use crate::features::block::BlockParams;
use crate::scene::mix::OracleComponents;

/// Guard added to both powers so silent blocks give a finite ratio.
pub const POWER_GUARD: f64 = 1e-12;
pub const DEFAULT_THRESHOLD_DB: f64 = 10.0;

fn block_power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Instantaneous SINR on mic 1 for every analysis block, in dB.
pub fn oracle_sinr_per_block(components: &OracleComponents, block: &BlockParams) -> Vec<f64> {
    let target = &components.target[0];
    let rest = &components.interference_plus_noise[0];
    (0..block.frame_count(target.len()))
        .map(|t| {
            let r = block.range(t);
            sinr_db(block_power(&target[r.clone()]), block_power(&rest[r]))
        })
        .collect()
}

pub fn sinr_db(target_power: f64, rest_power: f64) -> f64 {
    10.0 * ((POWER_GUARD + target_power) / (POWER_GUARD + rest_power)).log10()
}

/// Label 1 iff SINR >= threshold (ties are positive).
pub fn label_blocks(sinr_db: &[f64], threshold_db: f64) -> Vec<bool> {
    sinr_db.iter().map(|&s| s >= threshold_db).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{mix_scene, ArrayGeometry, SceneSpec};

    #[test]
    fn toy_powers() {
        assert_eq!(sinr_db(2.0, 2.0), 0.0);
        assert!((sinr_db(4.0, 1.0) - 6.0206).abs() < 1e-4);
        assert!((sinr_db(1.0, 4.0) + 6.0206).abs() < 1e-4);
        assert!(sinr_db(1.0, 0.0) > 110.0);
        assert_eq!(sinr_db(0.0, 0.0), 0.0);
    }

    #[test]
    fn two_block_toy_from_components() {
        // window 2, hop 2: block 0 has target power 4, block 1 has 1.
        let target = [vec![2.0, -2.0, 1.0, 1.0], vec![0.0; 4], vec![0.0; 4], vec![0.0; 4]];
        let rest = [vec![1.0, 1.0, -2.0, 2.0], vec![0.0; 4], vec![0.0; 4], vec![0.0; 4]];
        let c = OracleComponents { target, interference_plus_noise: rest };
        let s = oracle_sinr_per_block(&c, &BlockParams::new(2, 2).unwrap());
        let expected = 10.0 * 4f64.log10();
        assert!((s[0] - expected).abs() < 1e-9);
        assert!((s[1] + expected).abs() < 1e-9);
    }

    #[test]
    fn threshold_with_tie_rule() {
        assert_eq!(label_blocks(&[9.99, 10.0, 10.01], 10.0), vec![false, true, true]);
    }

    #[test]
    fn silence_is_negative() {
        let z = [vec![0.0; 512], vec![0.0; 512], vec![0.0; 512], vec![0.0; 512]];
        let c = OracleComponents { target: z.clone(), interference_plus_noise: z };
        let s = oracle_sinr_per_block(&c, &BlockParams::default());
        assert!(s.iter().all(|&v| v == 0.0));
        assert!(label_blocks(&s, 10.0).iter().all(|&l| !l));
    }

    #[test]
    fn interferer_only_scene_is_all_negative() {
        let mut spec = SceneSpec::new(30.0, vec![-60.0], 2.0, 8);
        spec.target_active = false;
        let mixed = mix_scene(&spec, &ArrayGeometry::default()).unwrap();
        let s = oracle_sinr_per_block(&mixed.components, &BlockParams::default());
        assert!(label_blocks(&s, 10.0).iter().all(|&l| !l));
    }
}
