//! Property tests for the documented invariants.

mod common;

use proptest::prelude::*;

use trinet::data::{smote, EncodedExample, FeatureVector, Label};
use trinet::metrics::{confusion, roc_auc};
use trinet::nn::{forward, ModelConfig, ModelParams, Phase};
use trinet::text::{tokenize, EmbeddingTable};

/// A model configuration that is valid by construction: the note length
/// is derived from the kernel/pool schedule instead of filtered.
fn valid_config() -> impl Strategy<Value = ModelConfig> {
    (
        proptest::array::uniform4(1usize..=3),
        proptest::array::uniform4(1usize..=2),
        proptest::array::uniform4(1usize..=3),
        1usize..=4,
        proptest::array::uniform3(1usize..=5),
        1usize..=4,
        0usize..8,
        proptest::array::uniform6(0.0f64..0.9),
    )
        .prop_map(
            |(kernel, pool, channels, embed, mlp, head, extra, dropout)| {
                // Minimum length that survives all four stages, walked
                // backwards from a final pooled length of 1.
                let mut t = 1usize;
                for stage in (0..4).rev() {
                    t = t * pool[stage] + kernel[stage] - 1;
                }
                ModelConfig {
                    note_length: t + extra,
                    embed_dim: embed,
                    conv_channels: channels,
                    conv_kernel: kernel,
                    pool_width: pool,
                    l2_lambda: 1e-4,
                    dropout_rates: dropout,
                    mlp_widths: mlp,
                    head_width: head,
                }
            },
        )
}

proptest! {
    /// Shape conservation: forward succeeds for every config satisfying
    /// the invariants, and the probability is a valid probability.
    #[test]
    fn forward_succeeds_on_every_valid_config(config in valid_config(), seed in 0u64..1000) {
        prop_assert!(config.validate().is_ok());
        let vocab: Vec<String> = ["<unk>", "alpha", "beta", "gamma"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let table = EmbeddingTable::empty(config.embed_dim);
        let params = ModelParams::init(&config, &vocab, 5, &table, seed).unwrap();
        let fv = FeatureVector {
            numeric: vec![0.5, -0.25, 1.0, 0.0, -1.5],
            tokens: (0..config.note_length).map(|i| i % 4).collect(),
        };
        let (p, _) = forward(&fv, &params, &config, Phase::Infer, None).unwrap();
        prop_assert!(p > 0.0 && p < 1.0);
    }

    /// Raising the threshold never gains true positives and never loses
    /// true negatives.
    #[test]
    fn threshold_monotonicity(
        probs in proptest::collection::vec(0.0f64..=1.0, 2..60),
        labels_bits in proptest::collection::vec(any::<bool>(), 2..60),
        t1 in 0.0f64..=1.0,
        t2 in 0.0f64..=1.0,
    ) {
        let n = probs.len().min(labels_bits.len());
        let probs = &probs[..n];
        let labels: Vec<Label> = labels_bits[..n]
            .iter()
            .map(|&b| if b { Label::Positive } else { Label::Negative })
            .collect();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let cm_lo = confusion(probs, &labels, lo).unwrap();
        let cm_hi = confusion(probs, &labels, hi).unwrap();
        prop_assert!(cm_hi.tp <= cm_lo.tp);
        prop_assert!(cm_hi.tn >= cm_lo.tn);
        prop_assert_eq!(cm_lo.total(), n);
        prop_assert_eq!(cm_hi.total(), n);
    }

    /// AUC is invariant under strictly monotone transforms of the scores.
    #[test]
    fn auc_monotone_transform_invariance(
        probs in proptest::collection::vec(0.0f64..=1.0, 4..80),
        labels_bits in proptest::collection::vec(any::<bool>(), 4..80),
    ) {
        let n = probs.len().min(labels_bits.len());
        let probs: Vec<f64> = probs[..n].iter().map(|p| (p * 20.0).round() / 20.0).collect();
        let labels: Vec<Label> = labels_bits[..n]
            .iter()
            .map(|&b| if b { Label::Positive } else { Label::Negative })
            .collect();
        let pos = labels.iter().filter(|l| l.is_positive()).count();
        prop_assume!(pos > 0 && pos < n);
        let before = roc_auc(&probs, &labels).unwrap().auc;
        let transformed: Vec<f64> = probs.iter().map(|p| p.exp()).collect();
        let after = roc_auc(&transformed, &labels).unwrap().auc;
        prop_assert_eq!(before.to_bits(), after.to_bits());
    }

    /// SMOTE hits the target count exactly and marks synthetics with the
    /// minority label.
    #[test]
    fn smote_counts_exact(
        majority in 4usize..50,
        minority_extra in 0usize..20,
        ratio in 0.2f64..=1.0,
        seed in 0u64..500,
    ) {
        let minority = 2 + minority_extra.min(majority.saturating_sub(2));
        prop_assume!(minority <= majority);
        let mut examples = Vec::new();
        for i in 0..majority {
            examples.push(EncodedExample {
                features: FeatureVector { numeric: vec![i as f64, 0.0, 1.0], tokens: vec![0] },
                label: Label::Negative,
            });
        }
        for i in 0..minority {
            examples.push(EncodedExample {
                features: FeatureVector { numeric: vec![i as f64, 1.0, 0.0], tokens: vec![1] },
                label: Label::Positive,
            });
        }
        let out = smote(&examples, 1, ratio, 15, seed).unwrap();
        let pos = out.iter().filter(|e| e.label == Label::Positive).count();
        let target = (ratio * majority as f64).round() as usize;
        prop_assert_eq!(pos, target.max(minority));
    }

    /// Tokenization is idempotent on its own space-joined output.
    #[test]
    fn tokenize_idempotent(text in "\\PC{0,80}") {
        let once = tokenize(&text);
        let twice = tokenize(&once.join(" "));
        prop_assert_eq!(once, twice);
    }
}
