use std::fmt;
use std::str::FromStr;

use crate::dataset::StoredFrame;
use crate::error::{Result, TadError};
use crate::features::{smooth_features, FEATURE_DIM};
use crate::nets::Kind;

/// How a window of stored frames is presented to a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputMode {
    /// Final frame only.
    LastFrame,
    /// Final frame after first-order recursive smoothing over the window.
    Smoothed { a: f64 },
    /// All frames concatenated into one vector.
    Concatenated,
    /// Frame by frame through a recurrent network.
    Sequential,
}

impl InputMode {
    pub fn input_dim(&self, m: usize) -> usize {
        match self {
            InputMode::Concatenated => m * FEATURE_DIM,
            _ => FEATURE_DIM,
        }
    }

    pub fn project(&self, frames: &[StoredFrame]) -> Vec<Vec<f64>> {
        let widen = |f: &StoredFrame| f.iter().map(|&v| f64::from(v)).collect::<Vec<f64>>();
        match *self {
            InputMode::LastFrame => vec![widen(frames.last().expect("non-empty window"))],
            InputMode::Smoothed { a } => {
                let wide: Vec<[f64; FEATURE_DIM]> =
                    frames.iter().map(|f| std::array::from_fn(|d| f64::from(f[d]))).collect();
                let smoothed = smooth_features(&wide, a);
                vec![smoothed.last().expect("non-empty window").to_vec()]
            }
            InputMode::Concatenated => vec![frames.iter().flat_map(widen).collect()],
            InputMode::Sequential => frames.iter().map(widen).collect(),
        }
    }
}

/// The six network types compared in the report, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NetType {
    FnnNos,
    FnnSmo,
    FnnSeq,
    Rnn,
    Lstm,
    Gru,
}

impl NetType {
    pub const ALL: [NetType; 6] = [NetType::FnnNos, NetType::FnnSmo, NetType::FnnSeq, NetType::Rnn, NetType::Lstm, NetType::Gru];

    pub fn kind(self) -> Kind {
        match self {
            NetType::FnnNos | NetType::FnnSmo | NetType::FnnSeq => Kind::Fnn,
            NetType::Rnn => Kind::Rnn,
            NetType::Lstm => Kind::Lstm,
            NetType::Gru => Kind::Gru,
        }
    }

    pub fn input_mode(self, smoothing: f64) -> InputMode {
        match self {
            NetType::FnnNos => InputMode::LastFrame,
            NetType::FnnSmo => InputMode::Smoothed { a: smoothing },
            NetType::FnnSeq => InputMode::Concatenated,
            _ => InputMode::Sequential,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NetType::FnnNos => "FNN (nos)",
            NetType::FnnSmo => "FNN (smo)",
            NetType::FnnSeq => "FNN (seq)",
            NetType::Rnn => "RNN",
            NetType::Lstm => "LSTM",
            NetType::Gru => "GRU",
        }
    }

    /// Short identifier used on the command line and in file names.
    pub fn slug(self) -> &'static str {
        match self {
            NetType::FnnNos => "fnn-nos",
            NetType::FnnSmo => "fnn-smo",
            NetType::FnnSeq => "fnn-seq",
            NetType::Rnn => "rnn",
            NetType::Lstm => "lstm",
            NetType::Gru => "gru",
        }
    }
}

impl fmt::Display for NetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NetType {
    type Err = TadError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '(', ')', '_'], "-");
        let key = key.trim_matches('-').replace("--", "-");
        NetType::ALL
            .into_iter()
            .find(|t| t.slug() == key)
            .ok_or_else(|| TadError::invalid(format!("unknown network type `{s}` (expected one of fnn-nos, fnn-smo, fnn-seq, rnn, lstm, gru)")))
    }
}
