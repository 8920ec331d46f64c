//! Target activity detection toolkit.
//!
//! Simulates 4-microphone scenes with known per-block SINR, extracts the
//! 8-dimensional spatial feature vector every millisecond, and trains small
//! feed-forward and recurrent classifiers (plain RNN, LSTM, GRU) on windows of
//! those vectors.

pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod nets;
pub mod pipeline;
pub mod rng;
pub mod scene;
pub mod training;

pub use error::{Result, TadError};
