//! Backpropagation (FNN) and backpropagation through time (recurrent kinds)
//! of the final-step cross-entropy.

use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TadError};
use crate::nets::cells::{matvec_t_acc, outer_acc};
use crate::nets::forward::{forward_trace, ForwardTrace, LayerTrace};
use crate::nets::params::tensors_per_layer;
use crate::nets::{Kind, NetworkSpec, ParamSet};
use crate::training::loss::ace_loss_from_logits;

/// One training example in network input form.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub inputs: Vec<Vec<f64>>,
    pub label: bool,
}

/// Gradient tensors, congruent with the parameters they belong to.
pub type GradSet = ParamSet;

struct Slots {
    w_x: usize,
    w_h: usize,
    b: usize,
    peep: usize,
    h0: Option<usize>,
    c0: Option<usize>,
}

fn slots(spec: &NetworkSpec, l: usize) -> Slots {
    let base = l * tensors_per_layer(spec);
    let mut next = base + 1;
    let w_h = if spec.kind.is_recurrent() {
        next += 1;
        next - 1
    } else {
        usize::MAX
    };
    let b = next;
    next += 1;
    let peep = if spec.peepholes {
        next += 1;
        next - 1
    } else {
        usize::MAX
    };
    let h0 = spec.learned_init.then(|| {
        next += 1;
        next - 1
    });
    let c0 = (spec.learned_init && spec.kind == Kind::Lstm).then_some(next);
    Slots { w_x: base, w_h, b, peep, h0, c0 }
}

fn add(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// Accumulates `scale * dL/dθ` for one example into `grads`, where `L` is the
/// cross-entropy at the final step.
pub fn backward(spec: &NetworkSpec, params: &ParamSet, trace: &ForwardTrace, label: bool, scale: f64, grads: &mut GradSet) {
    let n = spec.neurons;
    let nt = params.tensors.len();
    let mut dlogits = trace.probs.clone();
    dlogits[usize::from(label)] -= 1.0;
    for v in &mut dlogits {
        *v *= scale;
    }
    outer_acc(&mut grads.tensors[nt - 2], 0, &dlogits, &trace.top);
    add(&mut grads.tensors[nt - 1].data, &dlogits);
    let mut dtop = vec![0.0; n];
    matvec_t_acc(&mut dtop, &params.tensors[nt - 2], 0, &dlogits);

    let steps = trace.layers[0].inputs.len();
    let mut d_ext = vec![vec![0.0; n]; steps];
    d_ext[steps - 1] = dtop;
    for l in (0..spec.layers).rev() {
        let s = slots(spec, l);
        let tr = &trace.layers[l];
        d_ext = match spec.kind {
            Kind::Fnn => fnn_back(params, grads, &s, tr, &d_ext),
            Kind::Rnn => rnn_back(params, grads, &s, tr, &d_ext),
            Kind::Lstm => lstm_back(params, grads, &s, tr, &d_ext),
            Kind::Gru => gru_back(params, grads, &s, tr, &d_ext),
        };
    }
}

fn fnn_back(p: &ParamSet, g: &mut GradSet, s: &Slots, tr: &LayerTrace, d_ext: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let h = &tr.h[0];
    let mut da = d_ext[0].clone();
    if let Some(mask) = &tr.dropout_mask {
        for (d, m) in da.iter_mut().zip(mask) {
            *d *= m;
        }
    }
    for (d, hv) in da.iter_mut().zip(h) {
        *d *= 1.0 - hv * hv;
    }
    outer_acc(&mut g.tensors[s.w_x], 0, &da, &tr.inputs[0]);
    add(&mut g.tensors[s.b].data, &da);
    let mut dx = vec![0.0; tr.inputs[0].len()];
    matvec_t_acc(&mut dx, &p.tensors[s.w_x], 0, &da);
    vec![dx]
}

fn rnn_back(p: &ParamSet, g: &mut GradSet, s: &Slots, tr: &LayerTrace, d_ext: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = tr.h_init.len();
    let steps = tr.h.len();
    let mut dx_all = vec![Vec::new(); steps];
    let mut dh_next = vec![0.0; n];
    for t in (0..steps).rev() {
        let h = &tr.h[t];
        let hp = if t == 0 { &tr.h_init } else { &tr.h[t - 1] };
        let da: Vec<f64> = (0..n).map(|k| (d_ext[t][k] + dh_next[k]) * (1.0 - h[k] * h[k])).collect();
        outer_acc(&mut g.tensors[s.w_x], 0, &da, &tr.inputs[t]);
        outer_acc(&mut g.tensors[s.w_h], 0, &da, hp);
        add(&mut g.tensors[s.b].data, &da);
        let mut dx = vec![0.0; tr.inputs[t].len()];
        matvec_t_acc(&mut dx, &p.tensors[s.w_x], 0, &da);
        dx_all[t] = dx;
        dh_next.fill(0.0);
        matvec_t_acc(&mut dh_next, &p.tensors[s.w_h], 0, &da);
    }
    if let Some(h0) = s.h0 {
        add(&mut g.tensors[h0].data, &dh_next);
    }
    dx_all
}

fn lstm_back(p: &ParamSet, g: &mut GradSet, s: &Slots, tr: &LayerTrace, d_ext: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = tr.h_init.len();
    let steps = tr.h.len();
    let zero = vec![0.0; 3 * n];
    let peep = if s.peep == usize::MAX { &zero[..] } else { &p.tensors[s.peep].data[..] };
    let (pi, pf, po) = (&peep[..n], &peep[n..2 * n], &peep[2 * n..]);
    let mut dx_all = vec![Vec::new(); steps];
    let mut dh_next = vec![0.0; n];
    let mut dc_next = vec![0.0; n];
    let mut dpeep = vec![0.0; 3 * n];
    let mut da = vec![0.0; 4 * n];
    for t in (0..steps).rev() {
        let gates = &tr.gates[t];
        let (i, f, gg, o) = (&gates[..n], &gates[n..2 * n], &gates[2 * n..3 * n], &gates[3 * n..]);
        let c = &tr.c[t];
        let (hp, cp) = if t == 0 { (&tr.h_init, &tr.c_init) } else { (&tr.h[t - 1], &tr.c[t - 1]) };
        for k in 0..n {
            let dh = d_ext[t][k] + dh_next[k];
            let tc = c[k].tanh();
            let da_o = dh * tc * o[k] * (1.0 - o[k]);
            let dc = dc_next[k] + dh * o[k] * (1.0 - tc * tc) + da_o * po[k];
            let da_i = dc * gg[k] * i[k] * (1.0 - i[k]);
            let da_f = dc * cp[k] * f[k] * (1.0 - f[k]);
            let da_g = dc * i[k] * (1.0 - gg[k] * gg[k]);
            dpeep[k] += da_i * cp[k];
            dpeep[n + k] += da_f * cp[k];
            dpeep[2 * n + k] += da_o * c[k];
            dc_next[k] = dc * f[k] + da_i * pi[k] + da_f * pf[k];
            da[k] = da_i;
            da[n + k] = da_f;
            da[2 * n + k] = da_g;
            da[3 * n + k] = da_o;
        }
        outer_acc(&mut g.tensors[s.w_x], 0, &da, &tr.inputs[t]);
        outer_acc(&mut g.tensors[s.w_h], 0, &da, hp);
        add(&mut g.tensors[s.b].data, &da);
        let mut dx = vec![0.0; tr.inputs[t].len()];
        matvec_t_acc(&mut dx, &p.tensors[s.w_x], 0, &da);
        dx_all[t] = dx;
        dh_next.fill(0.0);
        matvec_t_acc(&mut dh_next, &p.tensors[s.w_h], 0, &da);
    }
    if s.peep != usize::MAX {
        add(&mut g.tensors[s.peep].data, &dpeep);
    }
    if let Some(h0) = s.h0 {
        add(&mut g.tensors[h0].data, &dh_next);
    }
    if let Some(c0) = s.c0 {
        add(&mut g.tensors[c0].data, &dc_next);
    }
    dx_all
}

fn gru_back(p: &ParamSet, g: &mut GradSet, s: &Slots, tr: &LayerTrace, d_ext: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = tr.h_init.len();
    let steps = tr.h.len();
    let w_h = &p.tensors[s.w_h];
    let mut dx_all = vec![Vec::new(); steps];
    let mut dh_next = vec![0.0; n];
    let mut da = vec![0.0; 3 * n];
    let mut rh = vec![0.0; n];
    for t in (0..steps).rev() {
        let gates = &tr.gates[t];
        let (r, z, cand) = (&gates[..n], &gates[n..2 * n], &gates[2 * n..]);
        let hp = if t == 0 { &tr.h_init } else { &tr.h[t - 1] };
        let mut dhp = vec![0.0; n];
        for k in 0..n {
            let dh = d_ext[t][k] + dh_next[k];
            dhp[k] = dh * (1.0 - z[k]);
            da[n + k] = dh * (cand[k] - hp[k]) * z[k] * (1.0 - z[k]);
            da[2 * n + k] = dh * z[k] * (1.0 - cand[k] * cand[k]);
            rh[k] = r[k] * hp[k];
        }
        let mut d_rh = vec![0.0; n];
        matvec_t_acc(&mut d_rh, w_h, 2 * n, &da[2 * n..]);
        for k in 0..n {
            da[k] = d_rh[k] * hp[k] * r[k] * (1.0 - r[k]);
            dhp[k] += d_rh[k] * r[k];
        }
        outer_acc(&mut g.tensors[s.w_x], 0, &da, &tr.inputs[t]);
        outer_acc(&mut g.tensors[s.w_h], 0, &da[..2 * n], hp);
        outer_acc(&mut g.tensors[s.w_h], 2 * n, &da[2 * n..], &rh);
        add(&mut g.tensors[s.b].data, &da);
        let mut dx = vec![0.0; tr.inputs[t].len()];
        matvec_t_acc(&mut dx, &p.tensors[s.w_x], 0, &da);
        dx_all[t] = dx;
        matvec_t_acc(&mut dhp, w_h, 0, &da[..2 * n]);
        dh_next = dhp;
    }
    if let Some(h0) = s.h0 {
        add(&mut g.tensors[h0].data, &dh_next);
    }
    dx_all
}

/// Mean cross-entropy over `batch` and its gradient. `dropout` applies to
/// FNN hidden layers only.
pub fn batch_gradient(
    spec: &NetworkSpec,
    params: &ParamSet,
    batch: &[Example],
    mut dropout: Option<(f64, &mut ChaCha8Rng)>,
) -> Result<(f64, GradSet)> {
    if batch.is_empty() {
        return Err(TadError::invalid("empty batch"));
    }
    let mut grads = params.zeros_like();
    let scale = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    for ex in batch {
        let dropout = match dropout.as_mut() {
            Some((rate, rng)) if spec.kind == Kind::Fnn => Some((*rate, &mut **rng)),
            _ => None,
        };
        let trace = forward_trace(spec, params, &ex.inputs, dropout)?;
        loss += ace_loss_from_logits(&trace.logits, ex.label) * scale;
        backward(spec, params, &trace, ex.label, scale, &mut grads);
    }
    Ok((loss, grads))
}

/// Errors out on the first non-finite gradient coordinate.
pub fn check_finite(grads: &GradSet, step: usize) -> Result<()> {
    match grads.tensors.iter().find(|t| t.data.iter().any(|v| !v.is_finite())) {
        Some(t) => Err(TadError::NonFiniteGradient { tensor: t.name.clone(), step }),
        None => Ok(()),
    }
}
