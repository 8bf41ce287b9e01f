//! Fitted preprocessing state and record encoding.
//!
//! The encoder is fitted on the training split only. It stores imputation
//! means, standardization statistics, categorical modes and vocabularies,
//! and the token vocabulary used by the text branch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, TriageRecord};
use crate::error::{Error, Result};
use crate::rng::fnv1a;
use crate::text::record_tokens;

/// Continuous features, in encoding order.
pub const CONTINUOUS_FEATURES: [&str; 7] = [
    "age_months",
    "weight_kg",
    "systolic_bp",
    "diastolic_bp",
    "resp_rate",
    "temp_c",
    "pulse",
];

/// Categorical features, in encoding order. Arrival time is one-hot per
/// hour, weekday and month.
pub const CATEGORICAL_FEATURES: [&str; 6] = [
    "ctas",
    "arrival_method",
    "arrival_hour",
    "arrival_weekday",
    "arrival_month",
    "gender",
];

/// Index 0 of every token vocabulary: the out-of-vocabulary / padding token.
pub const UNK_TOKEN: &str = "<unk>";

/// Standard deviations are floored here before dividing.
pub const STD_FLOOR: f64 = 1e-6;

pub fn continuous_value(record: &TriageRecord, feature: usize) -> Option<f64> {
    match feature {
        0 => Some(record.age_months),
        1 => record.weight_kg,
        2 => record.systolic_bp,
        3 => record.diastolic_bp,
        4 => record.resp_rate,
        5 => record.temp_c,
        6 => record.pulse,
        _ => unreachable!("continuous feature index out of range"),
    }
}

fn categorical_value(record: &TriageRecord, feature: usize) -> String {
    match feature {
        0 => record.ctas.to_string(),
        1 => record.arrival_method.clone(),
        2 => record.arrival_hour.to_string(),
        3 => record.arrival_weekday.to_string(),
        4 => record.arrival_month.to_string(),
        5 => record.gender.to_string(),
        _ => unreachable!("categorical feature index out of range"),
    }
}

/// Numeric-aware ordering so "2" sorts before "10" in vocabularies.
fn vocab_order(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

/// Encoded form of one record: standardized continuous values and one-hot
/// categoricals in `numeric`, and the token-index sequence in `tokens`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub numeric: Vec<f64>,
    pub tokens: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderSpec {
    continuous_means: Vec<f64>,
    continuous_stds: Vec<f64>,
    categorical_modes: Vec<String>,
    categorical_vocabs: Vec<Vec<String>>,
    token_vocab: Vec<String>,
    note_length: usize,
}

impl EncoderSpec {
    /// Fit imputation values, scaling statistics and vocabularies on the
    /// training split.
    pub fn fit(train: &Dataset, note_length: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if note_length == 0 {
            return Err(Error::BadConfig("note length must be >= 1".to_string()));
        }

        let mut means = Vec::with_capacity(CONTINUOUS_FEATURES.len());
        let mut stds = Vec::with_capacity(CONTINUOUS_FEATURES.len());
        for (idx, name) in CONTINUOUS_FEATURES.iter().enumerate() {
            let present: Vec<f64> = train
                .records
                .iter()
                .filter_map(|r| continuous_value(&r.record, idx))
                .collect();
            if present.is_empty() {
                return Err(Error::NoObservedValues {
                    feature: name.to_string(),
                });
            }
            let mean = present.iter().sum::<f64>() / present.len() as f64;
            let var = present.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                / present.len() as f64;
            means.push(mean);
            stds.push(var.sqrt().max(STD_FLOOR));
        }

        let mut modes = Vec::with_capacity(CATEGORICAL_FEATURES.len());
        let mut vocabs = Vec::with_capacity(CATEGORICAL_FEATURES.len());
        for idx in 0..CATEGORICAL_FEATURES.len() {
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for r in &train.records {
                *counts.entry(categorical_value(&r.record, idx)).or_insert(0) += 1;
            }
            // Highest count wins; ties break toward the smaller value so the
            // mode is deterministic.
            let mode = counts
                .iter()
                .max_by(|(va, ca), (vb, cb)| ca.cmp(cb).then(vocab_order(vb, va)))
                .map(|(v, _)| v.clone())
                .expect("non-empty dataset has categorical values");
            let mut vocab: Vec<String> = counts.into_keys().collect();
            vocab.sort_by(|a, b| vocab_order(a, b));
            modes.push(mode);
            vocabs.push(vocab);
        }

        let mut token_set: BTreeMap<String, ()> = BTreeMap::new();
        for r in &train.records {
            for tok in record_tokens(&r.record) {
                token_set.entry(tok).or_insert(());
            }
        }
        let mut token_vocab = Vec::with_capacity(token_set.len() + 1);
        token_vocab.push(UNK_TOKEN.to_string());
        token_vocab.extend(token_set.into_keys());

        Ok(EncoderSpec {
            continuous_means: means,
            continuous_stds: stds,
            categorical_modes: modes,
            categorical_vocabs: vocabs,
            token_vocab,
            note_length,
        })
    }

    /// Encode a record. Total over valid records: missing values impute to
    /// the stored mean/mode, unknown categoricals fall back to the mode,
    /// unknown tokens map to UNK.
    pub fn encode(&self, record: &TriageRecord) -> FeatureVector {
        let mut numeric = Vec::with_capacity(self.numeric_width());
        for idx in 0..CONTINUOUS_FEATURES.len() {
            let raw = continuous_value(record, idx).unwrap_or(self.continuous_means[idx]);
            numeric.push((raw - self.continuous_means[idx]) / self.continuous_stds[idx]);
        }
        for idx in 0..CATEGORICAL_FEATURES.len() {
            let value = categorical_value(record, idx);
            let vocab = &self.categorical_vocabs[idx];
            let effective = if vocab.contains(&value) {
                value
            } else {
                self.categorical_modes[idx].clone()
            };
            for v in vocab {
                numeric.push(if *v == effective { 1.0 } else { 0.0 });
            }
        }

        let mut tokens = Vec::with_capacity(self.note_length);
        for tok in record_tokens(record) {
            if tokens.len() == self.note_length {
                break;
            }
            tokens.push(self.token_index(&tok));
        }
        tokens.resize(self.note_length, 0);

        FeatureVector { numeric, tokens }
    }

    pub fn token_index(&self, token: &str) -> usize {
        // Vocabulary is sorted past index 0, so binary search applies.
        match self.token_vocab[1..].binary_search_by(|t| t.as_str().cmp(token)) {
            Ok(i) => i + 1,
            Err(_) => 0,
        }
    }

    pub fn continuous_width(&self) -> usize {
        CONTINUOUS_FEATURES.len()
    }

    pub fn numeric_width(&self) -> usize {
        CONTINUOUS_FEATURES.len()
            + self
                .categorical_vocabs
                .iter()
                .map(|v| v.len())
                .sum::<usize>()
    }

    pub fn note_length(&self) -> usize {
        self.note_length
    }

    pub fn vocab_size(&self) -> usize {
        self.token_vocab.len()
    }

    pub fn token_vocab(&self) -> &[String] {
        &self.token_vocab
    }

    pub fn continuous_mean(&self, feature: usize) -> f64 {
        self.continuous_means[feature]
    }

    pub fn continuous_std(&self, feature: usize) -> f64 {
        self.continuous_stds[feature]
    }

    pub fn categorical_mode(&self, feature: usize) -> &str {
        &self.categorical_modes[feature]
    }

    /// Stable hash of the token vocabulary, stored in checkpoints so a
    /// model is never applied with a mismatched encoder.
    pub fn vocab_hash(&self) -> u64 {
        let mut bytes = Vec::new();
        for tok in &self.token_vocab {
            bytes.extend_from_slice(tok.as_bytes());
            bytes.push(0x1f);
        }
        fnv1a(&bytes)
    }

    pub fn save<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Condition, Dataset, Gender, Label, LabeledRecord};
    use crate::test_util::record;

    fn small_train() -> Dataset {
        let mut r1 = record(Some(38.0));
        r1.gender = Gender::M;
        let mut r2 = record(None);
        r2.gender = Gender::M;
        let mut r3 = record(Some(40.0));
        r3.gender = Gender::F;
        Dataset::new(
            Condition::Uti,
            vec![
                LabeledRecord { record: r1, label: Label::Positive },
                LabeledRecord { record: r2, label: Label::Negative },
                LabeledRecord { record: r3, label: Label::Negative },
            ],
        )
    }

    #[test]
    fn mean_over_present_values_only() {
        let spec = EncoderSpec::fit(&small_train(), 8).unwrap();
        // temp index 5: {38.0, missing, 40.0} -> mean 39.0
        assert_eq!(spec.continuous_mean(5), 39.0);
    }

    #[test]
    fn mode_is_most_frequent() {
        let spec = EncoderSpec::fit(&small_train(), 8).unwrap();
        // genders {M, M, F} -> M
        assert_eq!(spec.categorical_mode(5), "M");
    }

    #[test]
    fn all_missing_feature_is_an_error() {
        let mut ds = small_train();
        for r in &mut ds.records {
            r.record.weight_kg = None;
        }
        let err = EncoderSpec::fit(&ds, 8).unwrap_err();
        assert!(err.to_string().contains("weight_kg"), "{err}");
    }

    #[test]
    fn missing_continuous_encodes_to_zero_score() {
        let spec = EncoderSpec::fit(&small_train(), 8).unwrap();
        let fv = spec.encode(&record(None));
        // Imputed with the mean, so the standardized value is exactly 0.
        assert_eq!(fv.numeric[5], 0.0);
        let fv2 = spec.encode(&record(Some(39.0)));
        assert_eq!(fv2.numeric[5], 0.0);
    }

    #[test]
    fn ctas_one_hot_slot() {
        let mut ds = small_train();
        // Make all five CTAS levels observed.
        for (i, r) in ds.records.iter_mut().enumerate() {
            r.record.ctas = (i + 1) as u8;
        }
        ds.records.push(LabeledRecord { record: record(None), label: Label::Negative });
        ds.records.push(LabeledRecord { record: record(None), label: Label::Negative });
        ds.records[3].record.ctas = 4;
        ds.records[4].record.ctas = 5;
        let spec = EncoderSpec::fit(&ds, 8).unwrap();
        assert_eq!(spec.categorical_vocabs[0], vec!["1", "2", "3", "4", "5"]);

        let mut probe = record(None);
        probe.ctas = 3;
        let fv = spec.encode(&probe);
        let ctas_slots = &fv.numeric[7..12];
        assert_eq!(ctas_slots, &[0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn unknown_categorical_falls_back_to_mode() {
        let spec = EncoderSpec::fit(&small_train(), 8).unwrap();
        let mut probe = record(None);
        probe.arrival_method = "helicopter".to_string();
        let fv = spec.encode(&probe);
        let known = spec.encode(&record(None));
        assert_eq!(fv.numeric, known.numeric);
    }

    #[test]
    fn tokens_truncate_and_pad() {
        let spec = EncoderSpec::fit(&small_train(), 5).unwrap();
        let mut probe = record(None);
        probe.notes = "cough fever cough".to_string();
        probe.medications.clear();
        probe.symptoms.clear();
        let fv = spec.encode(&probe);
        assert_eq!(fv.tokens.len(), 5);
        assert_ne!(fv.tokens[0], 0);
        assert_eq!(fv.tokens[0], fv.tokens[2]);
        assert_eq!(&fv.tokens[3..], &[0, 0]);
    }

    #[test]
    fn unk_is_index_zero() {
        let spec = EncoderSpec::fit(&small_train(), 8).unwrap();
        assert_eq!(spec.token_vocab()[0], UNK_TOKEN);
        assert_eq!(spec.token_index("nonexistent-token-xyz"), 0);
    }

    #[test]
    fn encode_is_idempotent_on_imputed_numeric() {
        // Encoding a record whose missing values were replaced by the means
        // gives the same numeric vector as the original record.
        let spec = EncoderSpec::fit(&small_train(), 8).unwrap();
        let sparse = record(None);
        let mut imputed = sparse.clone();
        imputed.temp_c = Some(spec.continuous_mean(5));
        assert_eq!(spec.encode(&sparse).numeric, spec.encode(&imputed).numeric);
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = EncoderSpec::fit(&small_train(), 8).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: EncoderSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.vocab_hash(), spec.vocab_hash());
    }
}
