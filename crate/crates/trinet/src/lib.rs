//! Machine-learning medical directives for emergency-department triage.
//!
//! The crate covers the full pipeline around a two-branch screening model
//! for pneumonia and urinary tract infection:
//!
//! * [`data`] — the triage record schema, NDJSON dataset I/O, imputing
//!   encoder, stratified splitting, SMOTE and class weights
//! * [`text`] — tokenization, word-vector tables, token-frequency reports
//!   and PCA projection of learned embeddings
//! * [`nn`] — the modular network itself (embedding + 1D CNN branch, MLP
//!   branch, concat head, sigmoid output) with hand-written backprop and SGD
//! * [`train`] — the mini-batch training loop and batch inference
//! * [`metrics`] — confusion matrices, ROC/AUC, PPV-maximizing threshold
//!   selection, per-class feature distributions and literature benchmarks
//! * [`synth`] — a seeded generator of labeled synthetic triage datasets
//! * [`sim`] — a discrete-event model of the ED workflow comparing test
//!   ordering after physician assessment against pre-ordering at triage

pub mod data;
pub mod error;
pub mod metrics;
pub mod nn;
pub mod sim;
pub mod synth;
pub mod text;
pub mod train;

pub(crate) mod par;
pub(crate) mod rng;
pub(crate) mod stats;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};
