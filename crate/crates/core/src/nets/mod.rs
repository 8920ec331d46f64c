//! Small feed-forward and recurrent classifiers with exact parameter accounting.

pub mod cells;
pub mod forward;
pub mod io;
pub mod params;
pub mod spec;

pub use cells::{fnn_layer, gru_step, lstm_step, rnn_step, softmax_output, GruStep, LstmStep};
pub use forward::{forward_sequence, forward_trace, predict, ForwardTrace, LayerTrace, Prediction};
pub use io::{load_model, save_model};
pub use params::{init_params, LayerParams, ParamSet, Role, Tensor};
pub use spec::{count_params, mean_grid_params, Kind, NetworkSpec};
