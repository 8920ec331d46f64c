use rand::Rng;

use crate::error::{Result, TadError};
use crate::nets::spec::{count_params, Kind, NetworkSpec};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Weight,
    Bias,
    Peephole,
    InitialState,
}

/// Row-major matrix (vectors have `cols == 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub role: Role,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(name: impl Into<String>, role: Role, rows: usize, cols: usize) -> Self {
        Tensor { name: name.into(), role, rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Tensors of one network in canonical order. Per hidden layer `l`:
///
/// | kind | tensors |
/// |------|---------|
/// | FNN  | `w_x` (N×in), `b` (N) |
/// | RNN  | `w_x` (N×in), `w_h` (N×N), `b` (N), `h0` (N) |
/// | LSTM | `w_x` (4N×in), `w_h` (4N×N), `b` (4N), `peep` (3×N), `h0`, `c0` |
/// | GRU  | `w_x` (3N×in), `w_h` (3N×N), `b` (3N), `h0` |
///
/// then the output layer `out.w` (2×N), `out.b` (2). Gate blocks are stacked
/// in the order i, f, g, o (LSTM) and r, z, n (GRU); peephole rows are i, f, o.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub tensors: Vec<Tensor>,
}

/// Borrowed tensors of one hidden layer.
#[derive(Debug, Clone, Copy)]
pub struct LayerParams<'a> {
    pub w_x: &'a Tensor,
    pub w_h: Option<&'a Tensor>,
    pub b: &'a Tensor,
    pub peep: Option<&'a Tensor>,
    pub h0: Option<&'a Tensor>,
    pub c0: Option<&'a Tensor>,
}

pub fn tensors_per_layer(spec: &NetworkSpec) -> usize {
    let mut k = 2;
    if spec.kind.is_recurrent() {
        k += 1;
    }
    if spec.peepholes {
        k += 1;
    }
    if spec.learned_init {
        k += if spec.kind == Kind::Lstm { 2 } else { 1 };
    }
    k
}

/// Zero-filled tensors with the canonical names and shapes for `spec`.
pub fn zero_params(spec: &NetworkSpec) -> ParamSet {
    let n = spec.neurons;
    let g = spec.kind.gate_count();
    let mut tensors = Vec::new();
    for l in 0..spec.layers {
        let inp = spec.layer_input_dim(l);
        tensors.push(Tensor::zeros(format!("l{l}.w_x"), Role::Weight, g * n, inp));
        if spec.kind.is_recurrent() {
            tensors.push(Tensor::zeros(format!("l{l}.w_h"), Role::Weight, g * n, n));
        }
        tensors.push(Tensor::zeros(format!("l{l}.b"), Role::Bias, g * n, 1));
        if spec.peepholes {
            tensors.push(Tensor::zeros(format!("l{l}.peep"), Role::Peephole, 3, n));
        }
        if spec.learned_init {
            tensors.push(Tensor::zeros(format!("l{l}.h0"), Role::InitialState, n, 1));
            if spec.kind == Kind::Lstm {
                tensors.push(Tensor::zeros(format!("l{l}.c0"), Role::InitialState, n, 1));
            }
        }
    }
    tensors.push(Tensor::zeros("out.w", Role::Weight, spec.output_dim, n));
    tensors.push(Tensor::zeros("out.b", Role::Bias, spec.output_dim, 1));
    ParamSet { tensors }
}

/// Glorot-uniform weights, zero biases (LSTM forget gate 1), zero peepholes
/// and initial states.
pub fn init_params(spec: &NetworkSpec, seed: u64) -> Result<ParamSet> {
    spec.validate()?;
    let mut rng = substream(seed, "init");
    let mut params = zero_params(spec);
    for t in &mut params.tensors {
        match t.role {
            Role::Weight => {
                let limit = (6.0 / (t.rows + t.cols) as f64).sqrt();
                for v in &mut t.data {
                    *v = rng.random_range(-limit..=limit);
                }
            }
            Role::Bias if spec.kind == Kind::Lstm && t.name != "out.b" => {
                let n = spec.neurons;
                t.data[n..2 * n].fill(1.0);
            }
            _ => {}
        }
    }
    Ok(params)
}

impl ParamSet {
    pub fn count(&self) -> usize {
        self.tensors.iter().map(Tensor::len).sum()
    }

    pub fn zeros_like(&self) -> ParamSet {
        ParamSet {
            tensors: self
                .tensors
                .iter()
                .map(|t| Tensor::zeros(t.name.clone(), t.role, t.rows, t.cols))
                .collect(),
        }
    }

    pub fn layer<'a>(&'a self, spec: &NetworkSpec, l: usize) -> LayerParams<'a> {
        let k = tensors_per_layer(spec);
        let mut it = self.tensors[l * k..(l + 1) * k].iter();
        let w_x = it.next().expect("layer weights");
        let w_h = if spec.kind.is_recurrent() { it.next() } else { None };
        let b = it.next().expect("layer bias");
        let peep = if spec.peepholes { it.next() } else { None };
        let h0 = if spec.learned_init { it.next() } else { None };
        let c0 = if spec.learned_init && spec.kind == Kind::Lstm { it.next() } else { None };
        LayerParams { w_x, w_h, b, peep, h0, c0 }
    }

    pub fn output(&self) -> (&Tensor, &Tensor) {
        let n = self.tensors.len();
        (&self.tensors[n - 2], &self.tensors[n - 1])
    }

    /// Checks names, shapes and finiteness against `spec`.
    pub fn check(&self, spec: &NetworkSpec) -> Result<()> {
        let reference = zero_params(spec);
        if reference.tensors.len() != self.tensors.len() || self.count() != count_params(spec) {
            return Err(TadError::invalid("parameter set does not match network spec"));
        }
        for (a, b) in self.tensors.iter().zip(&reference.tensors) {
            if a.name != b.name || a.rows != b.rows || a.cols != b.cols || a.data.len() != a.rows * a.cols {
                return Err(TadError::invalid(format!("tensor `{}` has unexpected shape", a.name)));
            }
            if a.data.iter().any(|v| !v.is_finite()) {
                return Err(TadError::invalid(format!("tensor `{}` is not finite", a.name)));
            }
        }
        Ok(())
    }

    pub fn iter_values(&self) -> impl Iterator<Item = &f64> {
        self.tensors.iter().flat_map(|t| t.data.iter())
    }

    pub fn iter_values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.tensors.iter_mut().flat_map(|t| t.data.iter_mut())
    }
}
