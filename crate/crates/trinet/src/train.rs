//! Mini-batch training loop and batch inference.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Barrier, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;

use crate::data::{
    class_weights, smote, Dataset, EncodedExample, EncoderSpec, Label,
};
use crate::error::{Error, Result};
use crate::nn::{
    backward_into, forward, sgd_step, weighted_bce, Gradients, ModelConfig, ModelParams,
    OptimizerState, Phase,
};
use crate::par::{map_chunks, worker_count};
use crate::rng::{mix_seed, seeded};
use crate::text::EmbeddingTable;

/// Samples per gradient work unit; fixed so batch reductions are
/// bit-identical for any worker count.
const GRAD_CHUNK: usize = 8;
/// Samples per inference work unit.
const EVAL_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeightMode {
    /// w_pos = negatives / positives on the pre-augmentation training split.
    Ratio,
    /// Both weights 1.
    None,
    /// Caller-supplied weights.
    Explicit { w_pos: f64, w_neg: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub seed: u64,
    pub use_smote: bool,
    pub smote_target_ratio: f64,
    pub smote_k: usize,
    pub class_weight_mode: ClassWeightMode,
    /// Stop early when validation loss has not improved for this many
    /// epochs. Off by default: the reference schedule trains a fixed
    /// number of epochs.
    pub patience: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            batch_size: 32,
            lr: 1e-5,
            momentum: 0.9,
            weight_decay: 1e-7,
            seed: 0,
            use_smote: true,
            smote_target_ratio: 1.0,
            smote_k: 15,
            class_weight_mode: ClassWeightMode::Ratio,
            patience: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::BadConfig(
                "epochs and batch_size must be >= 1".to_string(),
            ));
        }
        if !self.lr.is_finite() || self.lr < 0.0 {
            return Err(Error::BadConfig(format!("lr must be finite and >= 0, got {}", self.lr)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::BadConfig(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if !self.weight_decay.is_finite() || self.weight_decay < 0.0 {
            return Err(Error::BadConfig(format!(
                "weight_decay must be >= 0, got {}",
                self.weight_decay
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingCurve {
    pub epochs: Vec<EpochStats>,
}

impl TrainingCurve {
    /// Delimited table: epoch, train_loss, train_acc, val_loss, val_acc.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,val_loss,val_acc\n");
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{:.9},{:.6},{:.9},{:.6}\n",
                e.epoch, e.train_loss, e.train_acc, e.val_loss, e.val_acc
            ));
        }
        out
    }
}

pub struct TrainOutput {
    pub params: ModelParams,
    pub curve: TrainingCurve,
    pub encoder: EncoderSpec,
    pub class_weights: (f64, f64),
}

/// Train on `train_ds`, tracking the curve on the un-augmented training
/// split and on `val_ds`. The encoder is fitted here, on the training
/// split only; SMOTE (if enabled) touches only the training examples.
/// Embedding rows initialize from `table` (by token) and are trained.
pub fn train(
    train_ds: &Dataset,
    val_ds: &Dataset,
    mconfig: &ModelConfig,
    tconfig: &TrainConfig,
    table: &EmbeddingTable,
) -> Result<TrainOutput> {
    mconfig.validate()?;
    tconfig.validate()?;
    if train_ds.is_empty() || val_ds.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let encoder = EncoderSpec::fit(train_ds, mconfig.note_length)?;
    let encode_all = |ds: &Dataset| -> Vec<EncodedExample> {
        ds.records
            .iter()
            .map(|rec| EncodedExample {
                features: encoder.encode(&rec.record),
                label: rec.label,
            })
            .collect()
    };
    let train_plain = encode_all(train_ds);
    let val_examples = encode_all(val_ds);
    let val_count = val_examples.len();

    let (w_pos, w_neg) = match tconfig.class_weight_mode {
        ClassWeightMode::Ratio => class_weights(train_ds)?,
        ClassWeightMode::None => (1.0, 1.0),
        ClassWeightMode::Explicit { w_pos, w_neg } => (w_pos, w_neg),
    };

    let train_aug = if tconfig.use_smote {
        smote(
            &train_plain,
            encoder.continuous_width(),
            tconfig.smote_target_ratio,
            tconfig.smote_k,
            mix_seed(tconfig.seed, 1),
        )?
    } else {
        train_plain.clone()
    };

    let mut params = ModelParams::init(
        mconfig,
        encoder.token_vocab(),
        encoder.numeric_width(),
        table,
        mix_seed(tconfig.seed, 2),
    )?;
    let mut optimizer = OptimizerState::new(
        &params,
        tconfig.lr,
        tconfig.momentum,
        tconfig.weight_decay,
    );
    let mut shuffle_rng = seeded(tconfig.seed, 3);
    // Dropout masks come from a per-sample generator keyed by the sample's
    // global step, so batch evaluation order (and thread count) cannot
    // change the training trajectory.
    let dropout_base = mix_seed(tconfig.seed, 4);

    let mut grads = params.zeros_like();
    let mut order: Vec<usize> = (0..train_aug.len()).collect();
    let mut curve = TrainingCurve::default();
    let mut best_val = f64::INFINITY;
    let mut since_best = 0usize;

    for epoch in 0..tconfig.epochs {
        order.shuffle(&mut shuffle_rng);
        let epoch_ctx = EpochContext {
            examples: &train_aug,
            order: &order,
            mconfig,
            batch_size: tconfig.batch_size,
            epoch_base: epoch as u64 * train_aug.len() as u64,
            dropout_base,
            w_pos,
            w_neg,
        };
        run_epoch(&epoch_ctx, &mut params, &mut grads, &mut optimizer)
            .map_err(|e| diverged(e, epoch))?;

        assert_eq!(val_examples.len(), val_count);
        let (train_loss, train_acc) =
            evaluate(&train_plain, &params, mconfig, w_pos, w_neg).map_err(|e| diverged(e, epoch))?;
        let (val_loss, val_acc) =
            evaluate(&val_examples, &params, mconfig, w_pos, w_neg).map_err(|e| diverged(e, epoch))?;
        if !(train_loss.is_finite() && val_loss.is_finite()) {
            return Err(Error::Diverged(epoch));
        }
        curve.epochs.push(EpochStats {
            epoch,
            train_loss,
            train_acc,
            val_loss,
            val_acc,
        });

        if let Some(patience) = tconfig.patience {
            if val_loss < best_val {
                best_val = val_loss;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= patience {
                    break;
                }
            }
        }
    }

    Ok(TrainOutput {
        params,
        curve,
        encoder,
        class_weights: (w_pos, w_neg),
    })
}

struct EpochContext<'a> {
    examples: &'a [EncodedExample],
    /// Shuffled sample indices for this epoch.
    order: &'a [usize],
    mconfig: &'a ModelConfig,
    batch_size: usize,
    epoch_base: u64,
    dropout_base: u64,
    w_pos: f64,
    w_neg: f64,
}

impl EpochContext<'_> {
    /// Gradient sum over `order[lo..hi]`. The per-sample dropout RNG is
    /// keyed by the sample's global step, so this is a pure function of
    /// the range regardless of which thread runs it.
    fn chunk_partial(&self, lo: usize, hi: usize, params: &ModelParams) -> Result<Gradients> {
        let mut partial = params.zeros_like();
        for pos in lo..hi {
            let example = &self.examples[self.order[pos]];
            let mut rng = seeded(self.dropout_base, self.epoch_base + pos as u64);
            let (p, cache) = forward(
                &example.features,
                params,
                self.mconfig,
                Phase::Train,
                Some(&mut rng),
            )?;
            if !weighted_bce(p, example.label, self.w_pos, self.w_neg).is_finite() {
                return Err(Error::NonFinite("training loss".to_string()));
            }
            backward_into(
                &cache,
                example.label,
                self.w_pos,
                self.w_neg,
                params,
                self.mconfig,
                &mut partial,
            )?;
        }
        Ok(partial)
    }

    /// (batch range, chunk ranges) for every batch, fixed by the epoch
    /// geometry alone so reductions are identical for any worker count.
    fn batches(&self) -> Vec<(usize, usize)> {
        let n = self.order.len();
        (0..n.div_ceil(self.batch_size))
            .map(|b| {
                let lo = b * self.batch_size;
                (lo, (lo + self.batch_size).min(n))
            })
            .collect()
    }
}

/// One pass over the shuffled training data: per batch, sum fixed-size
/// chunk gradients in chunk order, average, and apply one SGD step.
///
/// With more than one worker available, the chunks of each batch are
/// computed by a pool of threads that persists for the whole epoch; the
/// barrier protocol hands parameters back to the main thread between
/// batches for the update. Chunk boundaries and the reduction order are
/// identical in both paths, so serial and parallel runs produce
/// bit-identical parameters.
fn run_epoch(
    ctx: &EpochContext<'_>,
    params: &mut ModelParams,
    grads: &mut Gradients,
    optimizer: &mut OptimizerState,
) -> Result<()> {
    let batches = ctx.batches();
    let workers = worker_count().min(ctx.batch_size.div_ceil(GRAD_CHUNK));
    if workers <= 1 {
        for &(lo, hi) in &batches {
            let mut partials = Vec::with_capacity((hi - lo).div_ceil(GRAD_CHUNK));
            let mut chunk_lo = lo;
            while chunk_lo < hi {
                let chunk_hi = (chunk_lo + GRAD_CHUNK).min(hi);
                partials.push(ctx.chunk_partial(chunk_lo, chunk_hi, params)?);
                chunk_lo = chunk_hi;
            }
            apply_batch(partials.into_iter().map(Ok), hi - lo, grads, params, optimizer)?;
        }
        return Ok(());
    }

    let params_lock = RwLock::new(&mut *params);
    let max_chunks = ctx.batch_size.div_ceil(GRAD_CHUNK);
    let slots: Vec<Mutex<Option<Result<Gradients>>>> =
        (0..max_chunks).map(|_| Mutex::new(None)).collect();
    // Index of the batch being processed; usize::MAX ends the epoch.
    let current = AtomicUsize::new(usize::MAX - 1);
    let cursor = AtomicUsize::new(0);
    let barrier = Barrier::new(workers + 1);

    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            scope.spawn(|| loop {
                barrier.wait();
                let b = current.load(Ordering::Acquire);
                if b == usize::MAX {
                    break;
                }
                let (lo, hi) = batches[b];
                let n_chunks = (hi - lo).div_ceil(GRAD_CHUNK);
                {
                    let guard = params_lock.read().expect("params lock");
                    loop {
                        let ci = cursor.fetch_add(1, Ordering::Relaxed);
                        if ci >= n_chunks {
                            break;
                        }
                        let chunk_lo = lo + ci * GRAD_CHUNK;
                        let chunk_hi = (chunk_lo + GRAD_CHUNK).min(hi);
                        let partial = ctx.chunk_partial(chunk_lo, chunk_hi, &guard);
                        *slots[ci].lock().expect("slot lock") = Some(partial);
                    }
                }
                barrier.wait();
            });
        }

        let run = (|| -> Result<()> {
            for (b, &(lo, hi)) in batches.iter().enumerate() {
                cursor.store(0, Ordering::Relaxed);
                current.store(b, Ordering::Release);
                barrier.wait();
                barrier.wait();
                let n_chunks = (hi - lo).div_ceil(GRAD_CHUNK);
                let partials = slots[..n_chunks].iter().map(|slot| {
                    slot.lock()
                        .expect("slot lock")
                        .take()
                        .expect("worker filled every chunk slot")
                });
                let mut guard = params_lock.write().expect("params lock");
                apply_batch(partials, hi - lo, grads, &mut guard, optimizer)?;
            }
            Ok(())
        })();
        current.store(usize::MAX, Ordering::Release);
        barrier.wait();
        run
    })
}

/// Sum chunk partials in order, average over the batch, and step.
fn apply_batch(
    partials: impl Iterator<Item = Result<Gradients>>,
    batch_len: usize,
    grads: &mut Gradients,
    params: &mut ModelParams,
    optimizer: &mut OptimizerState,
) -> Result<()> {
    for tensor in grads.tensors_mut() {
        tensor.fill(0.0);
    }
    for partial in partials {
        grads.add_assign(&partial?);
    }
    grads.scale(1.0 / batch_len as f64);
    sgd_step(params, grads, optimizer)
}

fn diverged(err: Error, epoch: usize) -> Error {
    match err {
        Error::NonFinite(_) => Error::Diverged(epoch),
        other => other,
    }
}


/// Mean weighted loss and accuracy at threshold 0.5, in infer mode.
fn evaluate(
    examples: &[EncodedExample],
    params: &ModelParams,
    mconfig: &ModelConfig,
    w_pos: f64,
    w_neg: f64,
) -> Result<(f64, f64)> {
    let chunk_stats = map_chunks(examples, EVAL_CHUNK, |chunk, _| -> Result<(f64, usize)> {
        let mut loss = 0.0;
        let mut correct = 0usize;
        for example in chunk {
            let (p, _) = forward(&example.features, params, mconfig, Phase::Infer, None)?;
            loss += weighted_bce(p, example.label, w_pos, w_neg);
            let predicted = if p >= 0.5 { Label::Positive } else { Label::Negative };
            if predicted == example.label {
                correct += 1;
            }
        }
        Ok((loss, correct))
    });
    let mut loss = 0.0;
    let mut correct = 0usize;
    for stats in chunk_stats {
        let (chunk_loss, chunk_correct) = stats?;
        loss += chunk_loss;
        correct += chunk_correct;
    }
    Ok((
        loss / examples.len() as f64,
        correct as f64 / examples.len() as f64,
    ))
}

/// Infer-mode probabilities for every record, in dataset order.
pub fn predict_batch(
    ds: &Dataset,
    params: &ModelParams,
    encoder: &EncoderSpec,
    mconfig: &ModelConfig,
) -> Result<Vec<f64>> {
    if params.vocab_size() != encoder.vocab_size() {
        return Err(Error::VocabMismatch {
            expected: params.vocab_size(),
            actual: encoder.vocab_size(),
        });
    }
    let chunks = map_chunks(&ds.records, EVAL_CHUNK, |chunk, _| -> Result<Vec<f64>> {
        chunk
            .iter()
            .map(|rec| {
                let fv = encoder.encode(&rec.record);
                forward(&fv, params, mconfig, Phase::Infer, None).map(|(p, _)| p)
            })
            .collect()
    });
    let mut probs = Vec::with_capacity(ds.records.len());
    for chunk in chunks {
        probs.extend(chunk?);
    }
    Ok(probs)
}
