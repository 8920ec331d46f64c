use std::fmt;
use std::str::FromStr;

use crate::error::{Result, TadError};

/// Hidden-layer counts of the full search grid.
pub const GRID_LAYERS: [usize; 6] = [1, 2, 3, 4, 5, 6];
/// Neurons-per-layer values of the full search grid.
pub const GRID_NEURONS: [usize; 6] = [1, 2, 4, 8, 16, 32];

pub const MAX_LAYERS: usize = 6;
pub const MAX_NEURONS: usize = 32;
pub const OUTPUT_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Fnn,
    Rnn,
    Lstm,
    Gru,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::Fnn, Kind::Rnn, Kind::Lstm, Kind::Gru];

    pub fn is_recurrent(self) -> bool {
        self != Kind::Fnn
    }

    /// Number of stacked gate blocks in the input/recurrent matrices.
    pub fn gate_count(self) -> usize {
        match self {
            Kind::Fnn | Kind::Rnn => 1,
            Kind::Lstm => 4,
            Kind::Gru => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Fnn => "FNN",
            Kind::Rnn => "RNN",
            Kind::Lstm => "LSTM",
            Kind::Gru => "GRU",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = TadError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fnn" => Ok(Kind::Fnn),
            "rnn" => Ok(Kind::Rnn),
            "lstm" => Ok(Kind::Lstm),
            "gru" => Ok(Kind::Gru),
            other => Err(TadError::invalid(format!("unknown network kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkSpec {
    pub kind: Kind,
    pub layers: usize,
    pub neurons: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    /// Trainable initial hidden (and cell) states.
    pub learned_init: bool,
    pub peepholes: bool,
}

impl NetworkSpec {
    /// The standard accounting: learned initial states for every recurrent
    /// kind, peepholes for the LSTM.
    pub fn new(kind: Kind, layers: usize, neurons: usize, input_dim: usize) -> Result<Self> {
        let spec = NetworkSpec {
            kind,
            layers,
            neurons,
            input_dim,
            output_dim: OUTPUT_DIM,
            learned_init: kind.is_recurrent(),
            peepholes: kind == Kind::Lstm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_LAYERS).contains(&self.layers) {
            return Err(TadError::invalid(format!("layers must be in 1..={MAX_LAYERS}, got {}", self.layers)));
        }
        if !(1..=MAX_NEURONS).contains(&self.neurons) {
            return Err(TadError::invalid(format!("neurons must be in 1..={MAX_NEURONS}, got {}", self.neurons)));
        }
        if self.input_dim == 0 || self.output_dim != OUTPUT_DIM {
            return Err(TadError::invalid("input_dim must be positive and output_dim 2"));
        }
        if self.kind == Kind::Fnn && self.learned_init {
            return Err(TadError::invalid("feed-forward networks have no initial state"));
        }
        if self.peepholes && self.kind != Kind::Lstm {
            return Err(TadError::invalid("peepholes are only defined for LSTM"));
        }
        Ok(())
    }

    pub fn layer_input_dim(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_dim
        } else {
            self.neurons
        }
    }
}

pub fn count_params(spec: &NetworkSpec) -> usize {
    let n = spec.neurons;
    let mut total = 0;
    for l in 0..spec.layers {
        let inp = spec.layer_input_dim(l);
        total += match spec.kind {
            Kind::Fnn => inp * n + n,
            Kind::Rnn => inp * n + n * n + n,
            Kind::Lstm => 4 * (inp * n + n * n + n),
            Kind::Gru => 3 * (inp * n + n * n + n),
        };
        if spec.peepholes {
            total += 3 * n;
        }
        if spec.learned_init {
            total += if spec.kind == Kind::Lstm { 2 * n } else { n };
        }
    }
    total + n * spec.output_dim + spec.output_dim
}

/// Mean parameter count over every (L, N) pair of the search grid, floored.
pub fn mean_grid_params(kind: Kind, input_dim: usize) -> usize {
    let mut sum = 0;
    let mut count = 0;
    for &l in &GRID_LAYERS {
        for &n in &GRID_NEURONS {
            let spec = NetworkSpec::new(kind, l, n, input_dim).expect("grid configs are valid");
            sum += count_params(&spec);
            count += 1;
        }
    }
    sum / count
}
