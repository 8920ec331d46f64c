use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TadError};
use crate::nets::cells::{fnn_layer, gru_step, lstm_step, output_logits, rnn_step, softmax};
use crate::nets::params::ParamSet;
use crate::nets::spec::{Kind, NetworkSpec};
use crate::training::regularize::apply_dropout;

/// Activations of one hidden layer, retained for backpropagation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LayerTrace {
    /// Layer input at each step (after the lower layer's dropout, if any).
    pub inputs: Vec<Vec<f64>>,
    /// Hidden output at each step, before dropout.
    pub h: Vec<Vec<f64>>,
    pub h_init: Vec<f64>,
    /// LSTM cell state at each step.
    pub c: Vec<Vec<f64>>,
    pub c_init: Vec<f64>,
    /// Gate activations per step: `[i, f, g, o]` (LSTM) or `[r, z, n]` (GRU).
    pub gates: Vec<Vec<f64>>,
    /// Inverted-dropout multipliers applied to `h` (FNN training only).
    pub dropout_mask: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub layers: Vec<LayerTrace>,
    /// Output of the top layer at the final step, as fed to the softmax.
    pub top: Vec<f64>,
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Probability of the positive class.
    pub score: f64,
    pub label: bool,
}

fn check_input(spec: &NetworkSpec, seq: &[Vec<f64>]) -> Result<()> {
    if seq.is_empty() {
        return Err(TadError::invalid("input sequence is empty"));
    }
    if let Some(bad) = seq.iter().find(|x| x.len() != spec.input_dim) {
        return Err(TadError::invalid(format!("expected input dimension {}, got {}", spec.input_dim, bad.len())));
    }
    Ok(())
}

/// Runs the network over `seq` and returns the final-step output together
/// with all intermediate states.
///
/// Feed-forward networks are memoryless, so only the final frame is evaluated.
/// With `dropout = Some((rate, rng))` every FNN hidden layer is masked
/// (training mode); recurrent kinds ignore it.
pub fn forward_trace(
    spec: &NetworkSpec,
    params: &ParamSet,
    seq: &[Vec<f64>],
    mut dropout: Option<(f64, &mut ChaCha8Rng)>,
) -> Result<ForwardTrace> {
    check_input(spec, seq)?;
    let n = spec.neurons;
    let mut layers = Vec::with_capacity(spec.layers);
    let mut inputs: Vec<Vec<f64>> = match spec.kind {
        Kind::Fnn => vec![seq[seq.len() - 1].clone()],
        _ => seq.to_vec(),
    };
    for l in 0..spec.layers {
        let p = params.layer(spec, l);
        let mut tr = LayerTrace {
            h_init: p.h0.map_or_else(|| vec![0.0; n], |t| t.data.clone()),
            c_init: p.c0.map_or_else(|| vec![0.0; n], |t| t.data.clone()),
            ..LayerTrace::default()
        };
        let mut outputs = Vec::with_capacity(inputs.len());
        match spec.kind {
            Kind::Fnn => {
                let mut h = fnn_layer(&inputs[0], &p);
                tr.h.push(h.clone());
                if let Some((rate, rng)) = dropout.as_mut() {
                    tr.dropout_mask = Some(apply_dropout(&mut h, *rate, rng));
                }
                outputs.push(h);
            }
            Kind::Rnn => {
                for (t, x) in inputs.iter().enumerate() {
                    let prev = if t == 0 { &tr.h_init } else { &tr.h[t - 1] };
                    let h = rnn_step(x, prev, &p);
                    tr.h.push(h);
                }
                outputs = tr.h.clone();
            }
            Kind::Lstm => {
                for (t, x) in inputs.iter().enumerate() {
                    let (hp, cp) = if t == 0 { (&tr.h_init, &tr.c_init) } else { (&tr.h[t - 1], &tr.c[t - 1]) };
                    let s = lstm_step(x, hp, cp, &p);
                    let mut g = s.i;
                    g.extend_from_slice(&s.f);
                    g.extend_from_slice(&s.g);
                    g.extend_from_slice(&s.o);
                    tr.gates.push(g);
                    tr.c.push(s.c);
                    tr.h.push(s.h);
                }
                outputs = tr.h.clone();
            }
            Kind::Gru => {
                for (t, x) in inputs.iter().enumerate() {
                    let prev = if t == 0 { &tr.h_init } else { &tr.h[t - 1] };
                    let s = gru_step(x, prev, &p);
                    let mut g = s.r;
                    g.extend_from_slice(&s.z);
                    g.extend_from_slice(&s.n);
                    tr.gates.push(g);
                    tr.h.push(s.h);
                }
                outputs = tr.h.clone();
            }
        }
        tr.inputs = std::mem::replace(&mut inputs, outputs);
        layers.push(tr);
    }
    let top = inputs.pop().expect("at least one step");
    let (w, b) = params.output();
    let logits = output_logits(&top, w, b);
    let probs = softmax(&logits);
    Ok(ForwardTrace { layers, top, logits, probs })
}

/// Inference-mode forward pass; returns the final-step class probabilities.
pub fn forward_sequence(spec: &NetworkSpec, params: &ParamSet, seq: &[Vec<f64>]) -> Result<ForwardTrace> {
    forward_trace(spec, params, seq, None)
}

/// Hard label is the argmax, ties going to the negative class.
pub fn predict(spec: &NetworkSpec, params: &ParamSet, seq: &[Vec<f64>]) -> Result<Prediction> {
    let probs = forward_sequence(spec, params, seq)?.probs;
    Ok(prediction_from_probs(&probs))
}

pub fn prediction_from_probs(probs: &[f64]) -> Prediction {
    Prediction { score: probs[1], label: probs[1] > probs[0] }
}
