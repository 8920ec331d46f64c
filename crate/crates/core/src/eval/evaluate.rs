use crate::dataset::SequenceSet;
use crate::error::Result;
use crate::eval::metrics::{accuracy, confusion, mcc, roc_auc};
use crate::eval::mode::InputMode;
use crate::nets::forward::{forward_sequence, prediction_from_probs, Prediction};
use crate::nets::{count_params, NetworkSpec, ParamSet};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub acc: f64,
    pub auc: f64,
    pub mcc: f64,
    pub params: usize,
    pub neurons: usize,
    pub layers: usize,
    /// Training and testing time relative to the baseline model, when known.
    pub rrt: Option<f64>,
    pub rtt: Option<f64>,
}

/// Inference-mode predictions for the sequences at `indices`.
pub fn score_set(spec: &NetworkSpec, params: &ParamSet, set: &SequenceSet, mode: InputMode, indices: &[usize]) -> Result<Vec<Prediction>> {
    indices
        .iter()
        .map(|&i| Ok(prediction_from_probs(&forward_sequence(spec, params, &mode.project(set.frames(i)))?.probs)))
        .collect()
}

pub fn metrics_from_predictions(labels: &[bool], predictions: &[Prediction]) -> (f64, f64, f64) {
    let hard: Vec<bool> = predictions.iter().map(|p| p.label).collect();
    let scores: Vec<f64> = predictions.iter().map(|p| p.score).collect();
    let c = confusion(labels, &hard);
    (accuracy(&c), roc_auc(labels, &scores).auc, mcc(&c))
}

/// ACC, AUC and MCC of the model on every sequence of `set`.
pub fn evaluate_model(spec: &NetworkSpec, params: &ParamSet, set: &SequenceSet, mode: InputMode) -> Result<MetricsReport> {
    let indices: Vec<usize> = (0..set.len()).collect();
    let preds = score_set(spec, params, set, mode, &indices)?;
    let (acc, auc, mcc) = metrics_from_predictions(set.labels(), &preds);
    Ok(MetricsReport {
        acc,
        auc,
        mcc,
        params: count_params(spec),
        neurons: spec.neurons,
        layers: spec.layers,
        rrt: None,
        rtt: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{init_params, Kind};
    use crate::training::train::tests::separable;

    #[test]
    fn zero_smoothing_matches_unsmoothed_report() {
        let set = separable(50, 20, 4);
        let spec = NetworkSpec::new(Kind::Fnn, 2, 4, 8).unwrap();
        let p = init_params(&spec, 1).unwrap();
        let a = evaluate_model(&spec, &p, &set, InputMode::LastFrame).unwrap();
        let b = evaluate_model(&spec, &p, &set, InputMode::Smoothed { a: 0.0 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.params, count_params(&spec));
    }

    #[test]
    fn constant_predictor_scores_majority_fraction() {
        let mut set = separable(40, 20, 4);
        // 30 negatives, 10 positives
        let frames = set.frames(1).to_vec();
        for _ in 0..20 {
            set.push(&frames, false);
        }
        let spec = NetworkSpec::new(Kind::Fnn, 1, 2, 8).unwrap();
        let mut p = init_params(&spec, 1).unwrap();
        p.tensors.iter_mut().for_each(|t| t.data.fill(0.0));
        let nt = p.tensors.len();
        p.tensors[nt - 1].data = vec![1.0, 0.0];
        let r = evaluate_model(&spec, &p, &set, InputMode::LastFrame).unwrap();
        assert!((r.acc - 40.0 / 60.0).abs() < 1e-12);
        assert_eq!(r.mcc, 0.0);
        assert_eq!(r.auc, 0.5);
    }

    #[test]
    fn concatenated_mode_needs_160_inputs() {
        let set = separable(4, 20, 4);
        assert_eq!(InputMode::Concatenated.input_dim(set.m()), 160);
        let spec = NetworkSpec::new(Kind::Fnn, 1, 2, 160).unwrap();
        let p = init_params(&spec, 1).unwrap();
        assert!(evaluate_model(&spec, &p, &set, InputMode::Concatenated).is_ok());
        assert!(evaluate_model(&spec, &p, &set, InputMode::LastFrame).is_err());
    }
}
