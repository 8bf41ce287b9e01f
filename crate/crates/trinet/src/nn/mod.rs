//! The two-branch screening network.
//!
//! A 1D CNN over embedded note tokens and a small MLP over the numeric
//! features merge into a concatenated ReLU head with a single sigmoid
//! output. Forward, backward and the SGD update are written out by hand;
//! there is no autodiff.

mod checkpoint;
mod config;
mod model;
mod ops;
mod params;
mod sgd;
mod tensor;

pub use checkpoint::Checkpoint;
pub use config::ModelConfig;
pub use model::{backward, backward_into, forward, weighted_bce, Cache, Phase};
pub use ops::{conv1d, maxpool1d};
pub use params::{ConvKernel, ConvLayer, DenseLayer, Gradients, ModelParams};
pub use sgd::{sgd_step, OptimizerState};
pub use tensor::Matrix;
