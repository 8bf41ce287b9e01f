//! Central finite-difference harness for the hand-written backward
//! pass, over randomized small architectures.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trinet::data::{FeatureVector, Label};
use trinet::nn::{backward, forward, weighted_bce, ModelConfig, ModelParams, Phase};
use trinet::text::EmbeddingTable;

pub const EPSILON: f64 = 1e-5;
pub const MAX_REL_ERR: f64 = 1e-4;

/// Random tiny architecture with <= 500 parameters.
pub fn random_config(rng: &mut ChaCha8Rng) -> ModelConfig {
    let kernel = [
        rng.random_range(1..=3),
        rng.random_range(1..=2),
        rng.random_range(1..=2),
        1,
    ];
    let pool = [rng.random_range(1..=2), rng.random_range(1..=2), 1, 1];
    // Work forward from a length that survives all four stages.
    let note_length = 8 + rng.random_range(0..5);
    let config = ModelConfig {
        note_length,
        embed_dim: rng.random_range(2..=4),
        conv_channels: [
            rng.random_range(1..=3),
            rng.random_range(1..=3),
            rng.random_range(1..=2),
            rng.random_range(1..=2),
        ],
        conv_kernel: kernel,
        pool_width: pool,
        l2_lambda: if rng.random_bool(0.5) { 0.0 } else { 0.01 },
        dropout_rates: if rng.random_bool(0.5) {
            [0.0; 6]
        } else {
            [0.2; 6]
        },
        mlp_widths: [
            rng.random_range(2..=4),
            rng.random_range(2..=4),
            rng.random_range(2..=3),
        ],
        head_width: rng.random_range(2..=4),
    };
    config
}

pub struct Instance {
    config: ModelConfig,
    params: ModelParams,
    fv: FeatureVector,
    label: Label,
    w_pos: f64,
    w_neg: f64,
    dropout_rng: ChaCha8Rng,
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = loop {
        let candidate = random_config(&mut rng);
        if candidate.validate().is_ok() {
            break candidate;
        }
    };
    let vocab_size = rng.random_range(4..=8usize);
    let vocab: Vec<String> = std::iter::once("<unk>".to_string())
        .chain((1..vocab_size).map(|i| format!("tok{i}")))
        .collect();
    let numeric_width = rng.random_range(3..=6);
    let table = EmbeddingTable::empty(config.embed_dim);
    let mut params = ModelParams::init(&config, &vocab, numeric_width, &table, seed).unwrap();
    assert!(params.num_params() <= 500, "instance too large: {}", params.num_params());
    // Evaluate at a generic point: zero-initialized biases would leave
    // pre-activations exactly on the ReLU kink whenever an upstream layer
    // goes fully dead, and central differences straddle the kink.
    for layer in &mut params.conv {
        for b in &mut layer.bias {
            *b = rng.random_range(-0.2..0.2);
        }
    }
    for layer in &mut params.mlp {
        for b in &mut layer.bias {
            *b = rng.random_range(-0.2..0.2);
        }
    }
    for b in &mut params.head.bias {
        *b = rng.random_range(-0.2..0.2);
    }
    params.output.bias[0] = rng.random_range(-0.2..0.2);

    let fv = FeatureVector {
        numeric: (0..numeric_width).map(|_| rng.random_range(-1.5..1.5)).collect(),
        tokens: (0..config.note_length)
            .map(|_| rng.random_range(0..vocab_size))
            .collect(),
    };
    let label = if rng.random_bool(0.5) { Label::Positive } else { Label::Negative };
    let w_pos = rng.random_range(0.5..4.0);
    let w_neg = rng.random_range(0.5..2.0);
    let dropout_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd20);
    Instance {
        config,
        params,
        fv,
        label,
        w_pos,
        w_neg,
        dropout_rng,
    }
}

/// The differentiated objective: weighted BCE plus the L2 penalty on the
/// first two conv kernels. Dropout masks replay identically because the
/// RNG is cloned per evaluation.
pub fn objective(inst: &Instance, params: &ModelParams) -> f64 {
    let mut rng = inst.dropout_rng.clone();
    let (p, _) = forward(&inst.fv, params, &inst.config, Phase::Train, Some(&mut rng)).unwrap();
    let mut loss = weighted_bce(p, inst.label, inst.w_pos, inst.w_neg);
    if inst.config.l2_lambda > 0.0 {
        for stage in 0..2 {
            let sq: f64 = params.conv[stage].kernel.data.iter().map(|k| k * k).sum();
            loss += inst.config.l2_lambda * sq;
        }
    }
    loss
}

/// Max relative error between analytic and central-difference gradients
/// over every trainable parameter (embedding row 0 is frozen by design).
pub fn max_relative_error(seed: u64) -> f64 {
    let inst = random_instance(seed);
    let mut rng = inst.dropout_rng.clone();
    let (_, cache) = forward(
        &inst.fv,
        &inst.params,
        &inst.config,
        Phase::Train,
        Some(&mut rng),
    )
    .unwrap();
    let analytic = backward(
        &cache,
        inst.label,
        inst.w_pos,
        inst.w_neg,
        &inst.params,
        &inst.config,
    )
    .unwrap();

    let embed_dim = inst.config.embed_dim;
    let mut worst: f64 = 0.0;
    let tensor_count = analytic.tensors().len();
    for tensor_idx in 0..tensor_count {
        let len = analytic.tensors()[tensor_idx].len();
        for k in 0..len {
            // Embedding row 0 (tensor 0, first embed_dim entries) is frozen.
            if tensor_idx == 0 && k < embed_dim {
                continue;
            }
            let mut probe = inst.params.clone();
            probe.tensors_mut()[tensor_idx][k] += EPSILON;
            let up = objective(&inst, &probe);
            probe.tensors_mut()[tensor_idx][k] -= 2.0 * EPSILON;
            let down = objective(&inst, &probe);
            let numeric = (up - down) / (2.0 * EPSILON);
            let a = analytic.tensors()[tensor_idx][k];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-4);
            if rel > worst {
                worst = rel;
            }
        }
    }
    worst
}

