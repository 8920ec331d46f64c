//! Central finite-difference oracle for the analytic gradients.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::nets::{init_params, NetworkSpec, ParamSet};
use crate::rng::substream;
use crate::training::backward::{batch_gradient, Example, GradSet};

pub const FD_STEP: f64 = 1e-5;
pub const GRAD_TOLERANCE: f64 = 1e-4;
/// Floor on the relative-error denominator so that coordinates whose true
/// gradient is ~0 are judged on absolute error.
pub const RELATIVE_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorError {
    pub tensor: String,
    pub max_rel_error: f64,
    pub worst_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub per_tensor: Vec<TensorError>,
    pub max_rel_error: f64,
    pub worst_tensor: String,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < GRAD_TOLERANCE
    }
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(RELATIVE_FLOOR)
}

fn mean_loss(spec: &NetworkSpec, params: &ParamSet, batch: &[Example]) -> Result<f64> {
    Ok(batch_gradient(spec, params, batch, None)?.0)
}

/// Compares `analytic` against central differences of the batch loss for
/// every coordinate of every tensor.
pub fn compare_gradients(spec: &NetworkSpec, params: &ParamSet, batch: &[Example], analytic: &GradSet) -> Result<GradCheckReport> {
    let mut probe = params.clone();
    let mut per_tensor = Vec::with_capacity(params.tensors.len());
    for ti in 0..params.tensors.len() {
        let mut worst = (0.0f64, 0usize);
        for j in 0..params.tensors[ti].len() {
            let orig = probe.tensors[ti].data[j];
            probe.tensors[ti].data[j] = orig + FD_STEP;
            let up = mean_loss(spec, &probe, batch)?;
            probe.tensors[ti].data[j] = orig - FD_STEP;
            let down = mean_loss(spec, &probe, batch)?;
            probe.tensors[ti].data[j] = orig;
            let numeric = (up - down) / (2.0 * FD_STEP);
            let err = relative_error(analytic.tensors[ti].data[j], numeric);
            if err > worst.0 || err.is_nan() {
                worst = (err, j);
            }
        }
        per_tensor.push(TensorError { tensor: params.tensors[ti].name.clone(), max_rel_error: worst.0, worst_index: worst.1 });
    }
    let worst = per_tensor
        .iter()
        .max_by(|a, b| a.max_rel_error.total_cmp(&b.max_rel_error))
        .expect("at least one tensor");
    Ok(GradCheckReport { max_rel_error: worst.max_rel_error, worst_tensor: worst.tensor.clone(), per_tensor })
}

/// Random parameters (every tensor, including biases and initial states) and
/// a random batch of `batch` sequences of length `m`.
pub fn random_problem(spec: &NetworkSpec, seed: u64, batch: usize, m: usize) -> Result<(ParamSet, Vec<Example>)> {
    let mut params = init_params(spec, seed)?;
    let mut rng = substream(seed, "gradcheck");
    for v in params.iter_values_mut() {
        *v += rng.random_range(-0.5..0.5);
    }
    let steps = if spec.kind.is_recurrent() { m } else { 1 };
    let examples = (0..batch)
        .map(|i| Example {
            inputs: (0..steps).map(|_| (0..spec.input_dim).map(|_| rng.sample(StandardNormal)).collect()).collect(),
            label: i % 2 == 0,
        })
        .collect();
    Ok((params, examples))
}

/// Finite-difference check on 4 random sequences of length 5.
pub fn grad_check(spec: &NetworkSpec, seed: u64) -> Result<GradCheckReport> {
    let (params, batch) = random_problem(spec, seed, 4, 5)?;
    let (_, analytic) = batch_gradient(spec, &params, &batch, None)?;
    compare_gradients(spec, &params, &batch, &analytic)
}
