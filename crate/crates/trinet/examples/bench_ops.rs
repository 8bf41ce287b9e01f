//! Micro-timing of forward/backward at the default architecture shape.

use std::time::Instant;

use trinet::data::{FeatureVector, Label};
use trinet::nn::{backward, forward, ModelConfig, ModelParams, Phase};
use trinet::text::EmbeddingTable;

fn main() {
    let config = ModelConfig::default();
    let vocab: Vec<String> = std::iter::once("<unk>".to_string())
        .chain((1..240).map(|i| format!("tok{i}")))
        .collect();
    let numeric_width = 61;
    let table = EmbeddingTable::empty(config.embed_dim);
    let params = ModelParams::init(&config, &vocab, numeric_width, &table, 7).unwrap();
    println!("params: {}", params.num_params());

    let fv = FeatureVector {
        numeric: (0..numeric_width).map(|i| (i as f64 * 0.37).sin()).collect(),
        tokens: (0..config.note_length).map(|i| (i * 7) % 240).collect(),
    };

    let iters = 3000;
    let t = Instant::now();
    for _ in 0..iters {
        let (p, _) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        std::hint::black_box(p);
    }
    let fwd = t.elapsed();
    println!("forward: {:?}/call", fwd / iters);

    let (_, cache) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
    let t = Instant::now();
    for _ in 0..iters {
        let g = backward(&cache, Label::Positive, 2.0, 1.0, &params, &config).unwrap();
        std::hint::black_box(&g);
    }
    let bwd = t.elapsed();
    println!("backward(alloc): {:?}/call", bwd / iters);

    let mut grads = params.zeros_like();
    let t = Instant::now();
    for _ in 0..iters {
        trinet::nn::backward_into(&cache, Label::Positive, 2.0, 1.0, &params, &config, &mut grads)
            .unwrap();
    }
    let bwd2 = t.elapsed();
    println!("backward_into: {:?}/call", bwd2 / iters);

    let t = Instant::now();
    for _ in 0..iters {
        let z = params.zeros_like();
        std::hint::black_box(&z);
    }
    println!("zeros_like: {:?}/call", t.elapsed() / iters);
}
