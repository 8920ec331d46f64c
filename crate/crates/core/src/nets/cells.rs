//! Single-step cell computations. All activations are double precision.

use crate::nets::params::{LayerParams, Tensor};

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `out[r] += sum_c w[row_offset + r, c] * x[c]` for `r < out.len()`.
pub(crate) fn matvec_acc(out: &mut [f64], w: &Tensor, row_offset: usize, x: &[f64]) {
    debug_assert_eq!(w.cols, x.len());
    for (r, o) in out.iter_mut().enumerate() {
        let row = w.row(row_offset + r);
        *o += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `out[c] += sum_r w[row_offset + r, c] * g[r]`.
pub(crate) fn matvec_t_acc(out: &mut [f64], w: &Tensor, row_offset: usize, g: &[f64]) {
    for (r, &gr) in g.iter().enumerate() {
        if gr == 0.0 {
            continue;
        }
        for (o, &wv) in out.iter_mut().zip(w.row(row_offset + r)) {
            *o += wv * gr;
        }
    }
}

/// `gw[row_offset + r, c] += g[r] * x[c]`.
pub(crate) fn outer_acc(gw: &mut Tensor, row_offset: usize, g: &[f64], x: &[f64]) {
    let cols = gw.cols;
    for (r, &gr) in g.iter().enumerate() {
        if gr == 0.0 {
            continue;
        }
        let row = &mut gw.data[(row_offset + r) * cols..(row_offset + r + 1) * cols];
        for (o, &xv) in row.iter_mut().zip(x) {
            *o += gr * xv;
        }
    }
}

fn affine(w: &Tensor, b: &Tensor, x: &[f64]) -> Vec<f64> {
    let mut a = b.data.clone();
    matvec_acc(&mut a, w, 0, x);
    a
}

/// `tanh(W x + b)`.
pub fn fnn_layer(x: &[f64], p: &LayerParams<'_>) -> Vec<f64> {
    affine(p.w_x, p.b, x).into_iter().map(f64::tanh).collect()
}

/// `tanh(W_xh x + W_hh h_prev + b)`.
pub fn rnn_step(x: &[f64], h_prev: &[f64], p: &LayerParams<'_>) -> Vec<f64> {
    let mut a = affine(p.w_x, p.b, x);
    matvec_acc(&mut a, p.w_h.expect("recurrent weights"), 0, h_prev);
    a.into_iter().map(f64::tanh).collect()
}

/// Activations of one LSTM step; gates are stored post-nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmStep {
    pub i: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

pub fn lstm_step(x: &[f64], h_prev: &[f64], c_prev: &[f64], p: &LayerParams<'_>) -> LstmStep {
    let n = h_prev.len();
    let mut a = affine(p.w_x, p.b, x);
    matvec_acc(&mut a, p.w_h.expect("recurrent weights"), 0, h_prev);
    let zero = vec![0.0; 3 * n];
    let peep = p.peep.map_or(&zero[..], |t| &t.data[..]);
    let (pi, pf, po) = (&peep[..n], &peep[n..2 * n], &peep[2 * n..]);
    let mut s = LstmStep {
        i: vec![0.0; n],
        f: vec![0.0; n],
        g: vec![0.0; n],
        o: vec![0.0; n],
        c: vec![0.0; n],
        h: vec![0.0; n],
    };
    for k in 0..n {
        s.i[k] = sigmoid(a[k] + pi[k] * c_prev[k]);
        s.f[k] = sigmoid(a[n + k] + pf[k] * c_prev[k]);
        s.g[k] = a[2 * n + k].tanh();
        s.c[k] = s.f[k] * c_prev[k] + s.i[k] * s.g[k];
        s.o[k] = sigmoid(a[3 * n + k] + po[k] * s.c[k]);
        s.h[k] = s.o[k] * s.c[k].tanh();
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct GruStep {
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    /// Candidate state.
    pub n: Vec<f64>,
    pub h: Vec<f64>,
}

/// Reset gate applied before the recurrent product of the candidate:
/// `n = tanh(W_n x + U_n (r ⊙ h_prev) + b_n)`, `h = (1 - z) ⊙ h_prev + z ⊙ n`.
pub fn gru_step(x: &[f64], h_prev: &[f64], p: &LayerParams<'_>) -> GruStep {
    let n = h_prev.len();
    let w_h = p.w_h.expect("recurrent weights");
    let mut a = affine(p.w_x, p.b, x);
    matvec_acc(&mut a[..2 * n], w_h, 0, h_prev);
    let r: Vec<f64> = a[..n].iter().map(|&v| sigmoid(v)).collect();
    let z: Vec<f64> = a[n..2 * n].iter().map(|&v| sigmoid(v)).collect();
    let rh: Vec<f64> = r.iter().zip(h_prev).map(|(a, b)| a * b).collect();
    matvec_acc(&mut a[2 * n..], w_h, 2 * n, &rh);
    let cand: Vec<f64> = a[2 * n..].iter().map(|v| v.tanh()).collect();
    let h = (0..n).map(|k| (1.0 - z[k]) * h_prev[k] + z[k] * cand[k]).collect();
    GruStep { r, z, n: cand, h }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|&v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

pub fn output_logits(h: &[f64], w: &Tensor, b: &Tensor) -> Vec<f64> {
    affine(w, b, h)
}

/// `softmax(W_hy h + b_y)`.
pub fn softmax_output(h: &[f64], w: &Tensor, b: &Tensor) -> Vec<f64> {
    softmax(&output_logits(h, w, b))
}
