use crate::nets::ParamSet;
use crate::training::backward::GradSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: ParamSet,
    pub v: ParamSet,
    pub t: u64,
}

impl AdamState {
    pub fn new(params: &ParamSet) -> Self {
        AdamState { m: params.zeros_like(), v: params.zeros_like(), t: 0 }
    }
}

/// Bias-corrected adaptive-moment step.
pub fn adam_update(params: &mut ParamSet, grads: &GradSet, state: &mut AdamState, cfg: &AdamConfig) {
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    let values = params.iter_values_mut().zip(grads.iter_values());
    let moments = state.m.iter_values_mut().zip(state.v.iter_values_mut());
    for ((p, &g), (m, v)) in values.zip(moments) {
        *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
        *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
        *p -= cfg.learning_rate * (*m / c1) / ((*v / c2).sqrt() + cfg.eps);
    }
}

pub fn sgd_update(params: &mut ParamSet, grads: &GradSet, learning_rate: f64) {
    for (p, &g) in params.iter_values_mut().zip(grads.iter_values()) {
        *p -= learning_rate * g;
    }
}

pub fn global_norm(grads: &GradSet) -> f64 {
    grads.iter_values().map(|g| g * g).sum::<f64>().sqrt()
}

/// Rescales `grads` so their global L2 norm does not exceed `max_norm`.
pub fn clip_global_norm(grads: &mut GradSet, max_norm: f64) -> f64 {
    let norm = global_norm(grads);
    if norm > max_norm {
        let s = max_norm / norm;
        grads.iter_values_mut().for_each(|g| *g *= s);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{init_params, Kind, NetworkSpec};

    fn setup() -> (ParamSet, GradSet) {
        let spec = NetworkSpec::new(Kind::Rnn, 1, 2, 2).unwrap();
        let p = init_params(&spec, 0).unwrap();
        let g = p.zeros_like();
        (p, g)
    }

    #[test]
    fn zero_gradient_leaves_params_and_decays_moments() {
        let (mut p, g) = setup();
        let before = p.clone();
        let mut st = AdamState::new(&p);
        st.m.iter_values_mut().for_each(|v| *v = 1.0);
        st.v.iter_values_mut().for_each(|v| *v = 1.0);
        // Non-zero moments would move params; with fresh zero moments they do not.
        let mut fresh = AdamState::new(&p);
        adam_update(&mut p, &g, &mut fresh, &AdamConfig::default());
        assert_eq!(p, before);
        let mut p2 = before.clone();
        adam_update(&mut p2, &g, &mut st, &AdamConfig::default());
        assert!(st.m.iter_values().all(|&v| (v - 0.9).abs() < 1e-15));
        assert!(st.v.iter_values().all(|&v| (v - 0.999).abs() < 1e-15));
    }

    #[test]
    fn first_step_moves_by_learning_rate_times_sign() {
        let (mut p, mut g) = setup();
        let before = p.clone();
        for (i, v) in g.iter_values_mut().enumerate() {
            *v = if i % 2 == 0 { 0.3 * (i + 1) as f64 } else { -2e-3 * (i + 1) as f64 };
        }
        let cfg = AdamConfig::default();
        adam_update(&mut p, &g, &mut AdamState::new(&before), &cfg);
        for ((a, b), gv) in p.iter_values().zip(before.iter_values()).zip(g.iter_values()) {
            // m_hat / sqrt(v_hat) = g / |g| exactly up to eps
            let expected = -cfg.learning_rate * gv / (gv.abs() + cfg.eps);
            assert!((a - b - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn identical_gradients_give_identical_updates() {
        let (mut p, mut g) = setup();
        p.tensors[0].data.fill(0.25);
        p.tensors[1].data.fill(0.25);
        g.tensors[0].data.fill(0.7);
        g.tensors[1].data.fill(0.7);
        let mut st = AdamState::new(&p);
        for _ in 0..3 {
            adam_update(&mut p, &g, &mut st, &AdamConfig::default());
        }
        assert_eq!(p.tensors[0].data[0], p.tensors[1].data[0]);
    }

    #[test]
    fn clipping_bounds_norm() {
        let (_, mut g) = setup();
        g.iter_values_mut().for_each(|v| *v = 3.0);
        let before = clip_global_norm(&mut g, 5.0);
        assert!(before > 5.0);
        assert!((global_norm(&g) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn sgd_step() {
        let (mut p, mut g) = setup();
        let before = p.clone();
        g.iter_values_mut().for_each(|v| *v = 2.0);
        sgd_update(&mut p, &g, 0.1);
        for (a, b) in p.iter_values().zip(before.iter_values()) {
            assert!((b - a - 0.2).abs() < 1e-15);
        }
    }
}
