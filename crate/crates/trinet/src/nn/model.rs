//! Forward pass, weighted loss and hand-written backward pass.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureVector, Label};
use crate::error::{Error, Result};
use crate::nn::config::ModelConfig;
use crate::nn::ops::maxpool1d;
use crate::nn::params::{Gradients, ModelParams};
use crate::nn::tensor::{dot, Matrix};

/// Sigmoid pre-activations are clamped to this magnitude.
const Z_CLAMP: f64 = 30.0;
/// Probabilities are clamped away from 0 and 1 inside the loss.
const PROB_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Train,
    Infer,
}

struct StageCache {
    /// Unrolled input windows, T_conv x (C_in * W). Row t is the window
    /// the kernel sees at position t, so the convolution is a plain dot
    /// product per (channel, position) and the backward kernel gradient
    /// is an accumulation over these same rows.
    cols: Matrix,
    /// Pre-ReLU convolution output, C x T_conv.
    conv_pre: Matrix,
    /// Flat argmax positions from pooling.
    argmax: Vec<usize>,
    /// Scaled dropout mask over the pooled map (1/(1-rate) or 0).
    mask: Vec<f64>,
    /// Stage output after pooling and dropout, C x T_pool.
    output: Matrix,
}

/// Unroll convolution windows: out row t = input[., t..t+w] flattened
/// channel-major.
fn im2col(input: &Matrix, width: usize) -> Matrix {
    let t_out = input.cols - width + 1;
    let span = input.rows * width;
    let mut cols = Matrix::zeros(t_out, span);
    for t in 0..t_out {
        let row = cols.row_mut(t);
        for c in 0..input.rows {
            row[c * width..(c + 1) * width].copy_from_slice(&input.row(c)[t..t + width]);
        }
    }
    cols
}

struct MlpCache {
    pre: Vec<f64>,
    /// Scaled dropout mask; empty for the last layer (no dropout site).
    mask: Vec<f64>,
    output: Vec<f64>,
}

/// Every intermediate value the backward pass needs.
pub struct Cache {
    tokens: Vec<usize>,
    embedded: Matrix,
    stages: Vec<StageCache>,
    numeric_in: Vec<f64>,
    mlp: Vec<MlpCache>,
    concat: Vec<f64>,
    head_pre: Vec<f64>,
    head_out: Vec<f64>,
    z_raw: f64,
    p: f64,
}

impl Cache {
    pub fn probability(&self) -> f64 {
        self.p
    }
}

fn dropout_mask(
    len: usize,
    rate: f64,
    phase: Phase,
    rng: &mut Option<&mut ChaCha8Rng>,
) -> Vec<f64> {
    if phase == Phase::Infer || rate == 0.0 {
        return vec![1.0; len];
    }
    let rng = rng.as_mut().expect("train-mode forward validated rng presence");
    let keep_scale = 1.0 / (1.0 - rate);
    (0..len)
        .map(|_| {
            if rng.random::<f64>() < rate {
                0.0
            } else {
                keep_scale
            }
        })
        .collect()
}

fn apply_mask(values: &mut [f64], mask: &[f64]) {
    for (v, m) in values.iter_mut().zip(mask) {
        *v *= m;
    }
}

fn relu_in_place(values: &mut [f64]) {
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

fn dense_forward(weight: &Matrix, bias: &[f64], input: &[f64]) -> Vec<f64> {
    (0..weight.rows)
        .map(|r| bias[r] + dot(weight.row(r), input))
        .collect()
}

/// Run the network on one encoded record.
///
/// In train mode an RNG must be supplied for the dropout masks; in infer
/// mode dropout is disabled and the output is a pure function of the
/// inputs. Returns the positive-class probability and the cache consumed
/// by [`backward`].
pub fn forward(
    fv: &FeatureVector,
    params: &ModelParams,
    config: &ModelConfig,
    phase: Phase,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<(f64, Cache)> {
    if phase == Phase::Train && rng.is_none() {
        return Err(Error::BadConfig(
            "train-mode forward requires an rng for dropout".to_string(),
        ));
    }
    if fv.tokens.len() != config.note_length {
        return Err(Error::Shape(format!(
            "token sequence length {} != configured note length {}",
            fv.tokens.len(),
            config.note_length
        )));
    }
    if fv.numeric.len() != params.numeric_width() {
        return Err(Error::Shape(format!(
            "numeric width {} != model input width {}",
            fv.numeric.len(),
            params.numeric_width()
        )));
    }
    if params.embedding.cols != config.embed_dim {
        return Err(Error::Shape(format!(
            "embedding dim {} != configured embed_dim {}",
            params.embedding.cols, config.embed_dim
        )));
    }
    if params.conv.len() != 4 || params.mlp.len() != 3 {
        return Err(Error::Shape(format!(
            "expected 4 conv and 3 dense layers, found {} and {}",
            params.conv.len(),
            params.mlp.len()
        )));
    }
    if let Some(&bad) = fv.tokens.iter().find(|&&t| t >= params.vocab_size()) {
        return Err(Error::Shape(format!(
            "token index {bad} out of range for vocabulary of {}",
            params.vocab_size()
        )));
    }

    // Text branch: embedding lookup into a d x L map, channels = dims.
    let d = config.embed_dim;
    let len = config.note_length;
    let mut embedded = Matrix::zeros(d, len);
    for (t, &tok) in fv.tokens.iter().enumerate() {
        let row = params.embedding.row(tok);
        for c in 0..d {
            *embedded.at_mut(c, t) = row[c];
        }
    }

    let mut stages = Vec::with_capacity(4);
    let mut current = &embedded;
    for stage in 0..4 {
        let layer = &params.conv[stage];
        let kernel = &layer.kernel;
        if current.rows != kernel.c_in {
            return Err(Error::Shape(format!(
                "stage {stage}: {} channels into a kernel expecting {}",
                current.rows, kernel.c_in
            )));
        }
        if current.cols < kernel.width {
            return Err(Error::Shape(format!(
                "stage {stage}: input length {} shorter than kernel width {}",
                current.cols, kernel.width
            )));
        }
        let cols = im2col(current, kernel.width);
        let t_out = cols.rows;
        let mut conv_pre = Matrix::zeros(kernel.c_out, t_out);
        for o in 0..kernel.c_out {
            let plane = kernel.plane(o);
            let bias = layer.bias[o];
            let out_row = conv_pre.row_mut(o);
            for (t, out) in out_row.iter_mut().enumerate() {
                *out = bias + dot(plane, cols.row(t));
            }
        }
        let mut activated = conv_pre.clone();
        relu_in_place(&mut activated.data);
        let (mut pooled, argmax) = maxpool1d(&activated, config.pool_width[stage])?;
        let mask = dropout_mask(
            pooled.data.len(),
            config.dropout_rates[stage],
            phase,
            &mut rng,
        );
        apply_mask(&mut pooled.data, &mask);
        stages.push(StageCache {
            cols,
            conv_pre,
            argmax,
            mask,
            output: pooled,
        });
        current = &stages[stage].output;
    }
    let text_flat: &[f64] = &stages[3].output.data;

    // Numeric branch.
    let mut mlp = Vec::with_capacity(3);
    let mut branch_in: &[f64] = &fv.numeric;
    for (layer_idx, layer) in params.mlp.iter().enumerate() {
        let pre = dense_forward(&layer.weight, &layer.bias, branch_in);
        let mut output = pre.clone();
        relu_in_place(&mut output);
        let mask = if layer_idx < 2 {
            let mask = dropout_mask(
                output.len(),
                config.dropout_rates[4 + layer_idx],
                phase,
                &mut rng,
            );
            apply_mask(&mut output, &mask);
            mask
        } else {
            Vec::new()
        };
        mlp.push(MlpCache { pre, mask, output });
        branch_in = &mlp[layer_idx].output;
    }

    let mut concat = Vec::with_capacity(text_flat.len() + mlp[2].output.len());
    concat.extend_from_slice(text_flat);
    concat.extend_from_slice(&mlp[2].output);

    let head_pre = dense_forward(&params.head.weight, &params.head.bias, &concat);
    let mut head_out = head_pre.clone();
    relu_in_place(&mut head_out);

    let z_raw = params.output.bias[0] + dot(params.output.weight.row(0), &head_out);
    if !z_raw.is_finite() {
        return Err(Error::NonFinite("sigmoid pre-activation".to_string()));
    }
    let p = sigmoid(z_raw.clamp(-Z_CLAMP, Z_CLAMP));
    if !p.is_finite() {
        return Err(Error::NonFinite("output probability".to_string()));
    }

    let cache = Cache {
        tokens: fv.tokens.clone(),
        embedded,
        stages,
        numeric_in: fv.numeric.clone(),
        mlp,
        concat,
        head_pre,
        head_out,
        z_raw,
        p,
    };
    Ok((p, cache))
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Class-weighted binary cross entropy. The probability is clamped to
/// [1e-12, 1 - 1e-12] so the loss stays finite.
pub fn weighted_bce(p: f64, label: Label, w_pos: f64, w_neg: f64) -> f64 {
    let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
    match label {
        Label::Positive => -w_pos * p.ln(),
        Label::Negative => -w_neg * (1.0 - p).ln(),
    }
}

/// Gradients of the weighted loss for one sample, allocated fresh.
/// L2 kernel regularization (first two conv layers) is included, so the
/// differentiated objective is `weighted_bce + l2_lambda * (|K1|^2 + |K2|^2)`.
pub fn backward(
    cache: &Cache,
    label: Label,
    w_pos: f64,
    w_neg: f64,
    params: &ModelParams,
    config: &ModelConfig,
) -> Result<Gradients> {
    let mut grads = params.zeros_like();
    backward_into(cache, label, w_pos, w_neg, params, config, &mut grads)?;
    Ok(grads)
}

/// Accumulating form of [`backward`]: adds this sample's gradients into
/// `grads`. The training loop uses this to sum a batch without
/// reallocating per sample.
pub fn backward_into(
    cache: &Cache,
    label: Label,
    w_pos: f64,
    w_neg: f64,
    params: &ModelParams,
    config: &ModelConfig,
    grads: &mut Gradients,
) -> Result<()> {
    if cache.tokens.len() != config.note_length
        || cache.stages.len() != 4
        || cache.mlp.len() != 3
        || cache.embedded.rows != config.embed_dim
    {
        return Err(Error::Shape(
            "cache does not match the model configuration".to_string(),
        ));
    }
    let stage_lengths = config.stage_lengths()?;
    for (stage, &(conv_len, pool_len)) in stage_lengths.iter().enumerate() {
        let s = &cache.stages[stage];
        if s.conv_pre.cols != conv_len
            || s.output.cols != pool_len
            || s.conv_pre.rows != config.conv_channels[stage]
        {
            return Err(Error::Shape(format!(
                "cache stage {stage} does not match the model configuration"
            )));
        }
    }

    // d(loss)/d(z). The clamps on the pre-activation and on the loss
    // probability pass zero gradient outside their ranges.
    let p = cache.p;
    let p_c = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
    let dl_dpc = match label {
        Label::Positive => -w_pos / p_c,
        Label::Negative => w_neg / (1.0 - p_c),
    };
    let p_clamp_pass = (p > PROB_EPS && p < 1.0 - PROB_EPS) as u8 as f64;
    let z_clamp_pass = (cache.z_raw.abs() < Z_CLAMP) as u8 as f64;
    let dz = dl_dpc * p_clamp_pass * p * (1.0 - p) * z_clamp_pass;

    // Output unit.
    for (g, &h) in grads.output.weight.row_mut(0).iter_mut().zip(&cache.head_out) {
        *g += dz * h;
    }
    grads.output.bias[0] += dz;
    let mut d_head_out: Vec<f64> = params
        .output
        .weight
        .row(0)
        .iter()
        .map(|&w| dz * w)
        .collect();

    // Head dense + ReLU.
    for (d, &pre) in d_head_out.iter_mut().zip(&cache.head_pre) {
        if pre <= 0.0 {
            *d = 0.0;
        }
    }
    let d_concat = dense_backward(
        &params.head.weight,
        &cache.concat,
        &d_head_out,
        &mut grads.head,
    );

    // Split the concat gradient between the branches.
    let text_width = cache.stages[3].output.data.len();
    let (d_text_flat, d_mlp_out) = d_concat.split_at(text_width);

    // Numeric branch, last layer to first.
    let mut d_out: Vec<f64> = d_mlp_out.to_vec();
    for layer_idx in (0..3).rev() {
        let mcache = &cache.mlp[layer_idx];
        if !mcache.mask.is_empty() {
            apply_mask(&mut d_out, &mcache.mask);
        }
        for (d, &pre) in d_out.iter_mut().zip(&mcache.pre) {
            if pre <= 0.0 {
                *d = 0.0;
            }
        }
        let layer_in: &[f64] = if layer_idx == 0 {
            &cache.numeric_in
        } else {
            &cache.mlp[layer_idx - 1].output
        };
        d_out = dense_backward(
            &params.mlp[layer_idx].weight,
            layer_in,
            &d_out,
            &mut grads.mlp[layer_idx],
        );
    }

    // Text branch, stage 3 back to the embedding.
    let mut d_stage_out = Matrix {
        rows: cache.stages[3].output.rows,
        cols: cache.stages[3].output.cols,
        data: d_text_flat.to_vec(),
    };
    for stage in (0..4).rev() {
        let scache = &cache.stages[stage];
        apply_mask(&mut d_stage_out.data, &scache.mask);

        // Un-pool: route each pooled gradient to its argmax position,
        // then gate through the ReLU.
        let mut d_conv_pre = Matrix::zeros(scache.conv_pre.rows, scache.conv_pre.cols);
        let t_pool = d_stage_out.cols;
        for c in 0..d_stage_out.rows {
            for j in 0..t_pool {
                let src = scache.argmax[c * t_pool + j];
                *d_conv_pre.at_mut(c, src) += d_stage_out.at(c, j);
            }
        }
        for (d, &pre) in d_conv_pre.data.iter_mut().zip(&scache.conv_pre.data) {
            if pre <= 0.0 {
                *d = 0.0;
            }
        }

        let stage_in: &Matrix = if stage == 0 {
            &cache.embedded
        } else {
            &cache.stages[stage - 1].output
        };
        d_stage_out = conv_backward(
            &params.conv[stage].kernel,
            &scache.cols,
            (stage_in.rows, stage_in.cols),
            &d_conv_pre,
            &mut grads.conv[stage],
        );
    }

    // Embedding rows; row 0 (UNK/padding) stays frozen.
    let d = config.embed_dim;
    for (t, &tok) in cache.tokens.iter().enumerate() {
        if tok == 0 {
            continue;
        }
        let row = grads.embedding.row_mut(tok);
        for c in 0..d {
            row[c] += d_stage_out.at(c, t);
        }
    }

    // L2 kernel regularization on the first two conv layers.
    if config.l2_lambda > 0.0 {
        for stage in 0..2 {
            let lambda2 = 2.0 * config.l2_lambda;
            for (g, &k) in grads.conv[stage]
                .kernel
                .data
                .iter_mut()
                .zip(&params.conv[stage].kernel.data)
            {
                *g += lambda2 * k;
            }
        }
    }

    Ok(())
}

/// Dense-layer backward: accumulates weight/bias gradients and returns the
/// gradient with respect to the layer input.
fn dense_backward(
    weight: &Matrix,
    input: &[f64],
    d_pre: &[f64],
    grads: &mut crate::nn::params::DenseLayer,
) -> Vec<f64> {
    let mut d_input = vec![0.0; weight.cols];
    for r in 0..weight.rows {
        let coef = d_pre[r];
        grads.bias[r] += coef;
        if coef == 0.0 {
            continue;
        }
        let w_row = weight.row(r);
        let g_row = grads.weight.row_mut(r);
        for c in 0..weight.cols {
            g_row[c] += coef * input[c];
            d_input[c] += coef * w_row[c];
        }
    }
    d_input
}

/// Conv backward over the cached im2col windows: accumulates kernel/bias
/// gradients and returns the gradient with respect to the stage input
/// (shape `input_shape` = (C_in, T_in)).
fn conv_backward(
    kernel: &crate::nn::params::ConvKernel,
    cols: &Matrix,
    input_shape: (usize, usize),
    d_conv_pre: &Matrix,
    grads: &mut crate::nn::params::ConvLayer,
) -> Matrix {
    let t_out = d_conv_pre.cols;
    let span = kernel.c_in * kernel.width;
    let mut d_cols = Matrix::zeros(t_out, span);
    for o in 0..kernel.c_out {
        let d_row = d_conv_pre.row(o);
        grads.bias[o] += d_row.iter().sum::<f64>();
        // ReLU gating leaves many channels fully dead.
        if d_row.iter().all(|&d| d == 0.0) {
            continue;
        }
        let plane = kernel.plane(o);
        let g_plane = grads.kernel.plane_mut(o);
        for (t, &d) in d_row.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let col = cols.row(t);
            for (g, &x) in g_plane.iter_mut().zip(col) {
                *g += d * x;
            }
            let d_col = d_cols.row_mut(t);
            for (dx, &k) in d_col.iter_mut().zip(plane) {
                *dx += d * k;
            }
        }
    }

    // col2im: fold window gradients back onto the input positions.
    let (c_in, t_in) = input_shape;
    let mut d_input = Matrix::zeros(c_in, t_in);
    for t in 0..t_out {
        let src = d_cols.row(t);
        for c in 0..c_in {
            let dst = &mut d_input.row_mut(c)[t..t + kernel.width];
            for (dx, &s) in dst.iter_mut().zip(&src[c * kernel.width..(c + 1) * kernel.width]) {
                *dx += s;
            }
        }
    }
    d_input
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::text::EmbeddingTable;

    fn tiny_config() -> ModelConfig {
        ModelConfig {
            note_length: 8,
            embed_dim: 4,
            conv_channels: [2, 2, 2, 2],
            conv_kernel: [3, 2, 2, 1],
            pool_width: [2, 1, 1, 1],
            l2_lambda: 0.0,
            dropout_rates: [0.0; 6],
            mlp_widths: [5, 4, 3],
            head_width: 4,
        }
    }

    fn tiny_inputs() -> (FeatureVector, Vec<String>) {
        let vocab: Vec<String> = ["<unk>", "cough", "fever", "rash"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let fv = FeatureVector {
            numeric: vec![0.3, -1.2, 0.0, 2.0, 1.0, -0.5],
            tokens: vec![1, 2, 3, 2, 1, 0, 0, 0],
        };
        (fv, vocab)
    }

    #[test]
    fn zero_params_give_even_odds() {
        let config = tiny_config();
        let (fv, vocab) = tiny_inputs();
        let table = EmbeddingTable::empty(4);
        let params = ModelParams::init(&config, &vocab, 6, &table, 1)
            .unwrap()
            .zeros_like();
        let (p, _) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        assert_eq!(p, 0.5);
    }

    #[test]
    fn infer_mode_is_deterministic() {
        let config = tiny_config();
        let (fv, vocab) = tiny_inputs();
        let table = EmbeddingTable::empty(4);
        let params = ModelParams::init(&config, &vocab, 6, &table, 5).unwrap();
        let (p1, _) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        let (p2, _) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        assert_eq!(p1, p2);
        assert!(p1 > 0.0 && p1 < 1.0);
    }

    #[test]
    fn train_mode_requires_rng() {
        let config = tiny_config();
        let (fv, vocab) = tiny_inputs();
        let table = EmbeddingTable::empty(4);
        let params = ModelParams::init(&config, &vocab, 6, &table, 5).unwrap();
        assert!(forward(&fv, &params, &config, Phase::Train, None).is_err());
    }

    #[test]
    fn dropout_uses_inverted_scaling() {
        // With a 0.5 rate the kept units are doubled; the expected value
        // over masks matches the infer output. Check a single unit cheaply
        // by comparing against infer with all dropout off.
        let mut config = tiny_config();
        config.dropout_rates = [0.5; 6];
        let (fv, vocab) = tiny_inputs();
        let table = EmbeddingTable::empty(4);
        let params = ModelParams::init(&config, &vocab, 6, &table, 5).unwrap();
        let mut rng = seeded(9, 0);
        let (p_train, _) = forward(&fv, &params, &config, Phase::Train, Some(&mut rng)).unwrap();
        let (p_infer, _) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        // Both are valid probabilities and generally differ.
        assert!(p_train > 0.0 && p_train < 1.0);
        assert!(p_infer > 0.0 && p_infer < 1.0);
    }

    #[test]
    fn token_out_of_range_is_an_error() {
        let config = tiny_config();
        let (mut fv, vocab) = tiny_inputs();
        fv.tokens[0] = 99;
        let table = EmbeddingTable::empty(4);
        let params = ModelParams::init(&config, &vocab, 6, &table, 5).unwrap();
        assert!(forward(&fv, &params, &config, Phase::Infer, None).is_err());
    }

    #[test]
    fn bce_hand_values() {
        assert!((weighted_bce(0.5, Label::Positive, 1.0, 1.0) - std::f64::consts::LN_2).abs() < 1e-12);
        // p -> 1 with a positive label drives the loss to 0.
        assert!(weighted_bce(1.0 - 1e-13, Label::Positive, 1.0, 1.0) < 1e-11);
        // Loss is linear in the class weight.
        let base = weighted_bce(0.3, Label::Positive, 1.0, 1.0);
        let doubled = weighted_bce(0.3, Label::Positive, 2.0, 1.0);
        assert!((doubled - 2.0 * base).abs() < 1e-12);
    }

    #[test]
    fn bce_stays_finite_at_extremes() {
        assert!(weighted_bce(0.0, Label::Positive, 1.0, 1.0).is_finite());
        assert!(weighted_bce(1.0, Label::Negative, 1.0, 1.0).is_finite());
    }

    #[test]
    fn zero_params_output_bias_gradient() {
        let config = tiny_config();
        let (fv, vocab) = tiny_inputs();
        let table = EmbeddingTable::empty(4);
        let params = ModelParams::init(&config, &vocab, 6, &table, 1)
            .unwrap()
            .zeros_like();
        let w_pos = 3.0;
        let (_, cache) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        let grads = backward(&cache, Label::Positive, w_pos, 1.0, &params, &config).unwrap();
        // p = 0.5, so d(loss)/d(bias) = -w_pos * (1 - 0.5).
        assert!((grads.output.bias[0] - (-0.5 * w_pos)).abs() < 1e-12);
    }

    #[test]
    fn l2_off_means_pure_loss_gradients() {
        let mut config = tiny_config();
        let (fv, vocab) = tiny_inputs();
        let table = EmbeddingTable::empty(4);
        let params = ModelParams::init(&config, &vocab, 6, &table, 7).unwrap();
        let (_, cache) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        config.l2_lambda = 0.0;
        let plain = backward(&cache, Label::Negative, 1.0, 1.0, &params, &config).unwrap();
        config.l2_lambda = 0.01;
        let reg = backward(&cache, Label::Negative, 1.0, 1.0, &params, &config).unwrap();
        for stage in 0..2 {
            for (i, (&g0, &g1)) in plain.conv[stage]
                .kernel
                .data
                .iter()
                .zip(&reg.conv[stage].kernel.data)
                .enumerate()
            {
                let expected = g0 + 0.02 * params.conv[stage].kernel.data[i];
                assert!((g1 - expected).abs() < 1e-12);
            }
        }
        // Later conv layers are not regularized.
        assert_eq!(plain.conv[2].kernel.data, reg.conv[2].kernel.data);
        assert_eq!(plain.conv[3].kernel.data, reg.conv[3].kernel.data);
    }

    #[test]
    fn unk_embedding_row_gets_no_gradient() {
        let config = tiny_config();
        let (fv, vocab) = tiny_inputs();
        let table = EmbeddingTable::empty(4);
        let mut params = ModelParams::init(&config, &vocab, 6, &table, 7).unwrap();
        // Positive biases keep the ReLU path live so gradient reaches the
        // embedding at all.
        for layer in &mut params.conv {
            layer.bias.fill(0.3);
        }
        params.head.bias.fill(0.3);
        let (_, cache) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        let grads = backward(&cache, Label::Positive, 1.0, 1.0, &params, &config).unwrap();
        assert_eq!(grads.embedding.row(0), &[0.0; 4]);
        // Pooling narrows the receptive field, but some non-UNK row must
        // carry gradient.
        let touched = (1..4).any(|r| grads.embedding.row(r).iter().any(|&g| g != 0.0));
        assert!(touched);
    }

    #[test]
    fn im2col_path_matches_reference_conv() {
        use crate::nn::ops::conv1d;
        use crate::nn::params::ConvKernel;
        let mut rng = seeded(31, 0);
        for _ in 0..20 {
            use rand::Rng;
            let c_in = rng.random_range(1..5);
            let c_out = rng.random_range(1..5);
            let width = rng.random_range(1..4);
            let t = width + rng.random_range(0..8);
            let input = Matrix {
                rows: c_in,
                cols: t,
                data: (0..c_in * t).map(|_| crate::rng::std_normal(&mut rng)).collect(),
            };
            let kernel = ConvKernel {
                c_out,
                c_in,
                width,
                data: (0..c_out * c_in * width)
                    .map(|_| crate::rng::std_normal(&mut rng))
                    .collect(),
            };
            let bias: Vec<f64> = (0..c_out).map(|_| crate::rng::std_normal(&mut rng)).collect();

            let reference = conv1d(&input, &kernel, &bias).unwrap();
            let cols = im2col(&input, width);
            for o in 0..c_out {
                for (t_idx, col) in (0..cols.rows).map(|t| (t, cols.row(t))) {
                    let fast = bias[o] + dot(kernel.plane(o), col);
                    assert!(
                        (fast - reference.at(o, t_idx)).abs() < 1e-12,
                        "conv mismatch at ({o},{t_idx})"
                    );
                }
            }
        }
    }

    #[test]
    fn monotone_sigmoid_head() {
        // Increasing the output bias strictly increases p.
        let config = tiny_config();
        let (fv, vocab) = tiny_inputs();
        let table = EmbeddingTable::empty(4);
        let mut params = ModelParams::init(&config, &vocab, 6, &table, 2).unwrap();
        let mut last = 0.0;
        for step in 0..5 {
            params.output.bias[0] = step as f64 * 0.7 - 1.4;
            let (p, _) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
            if step > 0 {
                assert!(p > last, "p not increasing: {p} after {last}");
            }
            last = p;
        }
    }
}
