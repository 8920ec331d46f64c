//! Gradient-based training of the micro networks.

pub mod backward;
pub mod gradcheck;
pub mod loss;
pub mod optim;
pub mod regularize;
pub mod timing;
pub mod train;

pub use backward::{backward, batch_gradient, Example, GradSet};
pub use gradcheck::{grad_check, GradCheckReport};
pub use loss::ace_loss;
pub use optim::{adam_update, AdamConfig, AdamState, Optimizer};
pub use regularize::{apply_dropout, apply_synaptic_noise};
pub use timing::{measure_times, Timing, TimingReport};
pub use train::{train, EpochLog, EpochRecord, StopReason, TrainConfig, TrainOutcome};
