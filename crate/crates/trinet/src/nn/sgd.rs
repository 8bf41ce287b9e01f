//! Stochastic gradient descent with momentum and coupled weight decay.

use crate::error::{Error, Result};
use crate::nn::params::{Gradients, ModelParams};

#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub velocity: ModelParams,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
}

impl OptimizerState {
    pub fn new(params: &ModelParams, lr: f64, momentum: f64, weight_decay: f64) -> Self {
        OptimizerState {
            velocity: params.zeros_like(),
            lr,
            momentum,
            weight_decay,
        }
    }
}

/// One update:
/// `g' = grad + weight_decay * param`, `v = momentum * v + g'`,
/// `param -= lr * v`.
pub fn sgd_step(
    params: &mut ModelParams,
    grads: &Gradients,
    state: &mut OptimizerState,
) -> Result<()> {
    let lr = state.lr;
    let momentum = state.momentum;
    let wd = state.weight_decay;
    let mut probe = 0.0f64;
    for ((p_tensor, g_tensor), v_tensor) in params
        .tensors_mut()
        .into_iter()
        .zip(grads.tensors())
        .zip(state.velocity.tensors_mut())
    {
        if p_tensor.len() != g_tensor.len() {
            return Err(Error::Shape(
                "gradient shapes do not match parameters".to_string(),
            ));
        }
        for ((p, &g), v) in p_tensor.iter_mut().zip(g_tensor).zip(v_tensor.iter_mut()) {
            let adjusted = g + wd * *p;
            *v = momentum * *v + adjusted;
            *p -= lr * *v;
            probe += *p;
        }
    }
    // Any NaN or infinity poisons the running sum.
    if !probe.is_finite() {
        return Err(Error::NonFinite("parameter update".to_string()));
    }
    Ok(())
}
