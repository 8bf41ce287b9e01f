//! SMOTE up-sampling of the minority class.
//!
//! Synthetic samples interpolate the continuous dimensions between a
//! minority sample and one of its k nearest minority neighbors. One-hot
//! categorical dimensions and token sequences are copied from the base
//! sample, since interpolating them is not meaningful.

use rand::Rng;

use crate::data::{FeatureVector, Label};
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedExample {
    pub features: FeatureVector,
    pub label: Label,
}

/// Augment `examples` so the minority count reaches
/// `round(target_ratio * majority count)`. `continuous_dims` is the number
/// of leading interpolatable dimensions of the numeric vector; `k` is
/// clamped to `minority - 1`.
pub fn smote(
    examples: &[EncodedExample],
    continuous_dims: usize,
    target_ratio: f64,
    k: usize,
    seed: u64,
) -> Result<Vec<EncodedExample>> {
    if !(target_ratio > 0.0 && target_ratio <= 1.0) {
        return Err(Error::SmoteBadRatio(target_ratio));
    }
    let pos: Vec<usize> = indices_of(examples, Label::Positive);
    let neg: Vec<usize> = indices_of(examples, Label::Negative);
    let (minority, majority) = if pos.len() <= neg.len() {
        (pos, neg)
    } else {
        (neg, pos)
    };
    if minority.len() < 2 {
        return Err(Error::SmoteTooFewMinority(minority.len()));
    }

    let target = (target_ratio * majority.len() as f64).round() as usize;
    let mut out = examples.to_vec();
    if minority.len() >= target {
        return Ok(out);
    }
    let deficit = target - minority.len();
    let k_eff = k.max(1).min(minority.len() - 1);

    // Neighbor lists by Euclidean distance on the continuous dimensions,
    // ties broken by index for determinism.
    let neighbor_lists: Vec<Vec<usize>> = minority
        .iter()
        .map(|&i| {
            let mut others: Vec<(f64, usize)> = minority
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (continuous_distance(examples, i, j, continuous_dims), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.into_iter().take(k_eff).map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = seeded(seed, 0x5307e);
    for _ in 0..deficit {
        let pick = rng.random_range(0..minority.len());
        let base_idx = minority[pick];
        let neighbor_idx = neighbor_lists[pick][rng.random_range(0..k_eff)];
        let u: f64 = rng.random();

        let base = &examples[base_idx];
        let neighbor = &examples[neighbor_idx];
        let mut synthetic = base.clone();
        for dim in 0..continuous_dims {
            let x = base.features.numeric[dim];
            let x_prime = neighbor.features.numeric[dim];
            synthetic.features.numeric[dim] = x + u * (x_prime - x);
        }
        out.push(synthetic);
    }
    Ok(out)
}

fn indices_of(examples: &[EncodedExample], label: Label) -> Vec<usize> {
    examples
        .iter()
        .enumerate()
        .filter(|(_, e)| e.label == label)
        .map(|(i, _)| i)
        .collect()
}

fn continuous_distance(
    examples: &[EncodedExample],
    a: usize,
    b: usize,
    continuous_dims: usize,
) -> f64 {
    examples[a].features.numeric[..continuous_dims]
        .iter()
        .zip(&examples[b].features.numeric[..continuous_dims])
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}
