//! Triage record schema and dataset handling.
//!
//! A dataset file is line-delimited JSON: one object per line carrying the
//! `TriageRecord` fields plus a `label` of 0 or 1. Missing vitals are
//! encoded as `null`.

mod encoder;
mod smote;
mod split;
mod weights;

pub use encoder::{
    continuous_value, EncoderSpec, FeatureVector, CATEGORICAL_FEATURES, CONTINUOUS_FEATURES,
    STD_FLOOR, UNK_TOKEN,
};
pub use smote::{smote, EncodedExample};
pub use split::{stratified_split, SplitRatios};
pub use weights::class_weights;

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gender {
    U,
    M,
    F,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gender::U => write!(f, "U"),
            Gender::M => write!(f, "M"),
            Gender::F => write!(f, "F"),
        }
    }
}

/// One patient presentation as captured at triage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageRecord {
    /// Free-text triage notes.
    pub notes: String,
    /// Past medication reported on the patient record.
    pub medications: Vec<String>,
    /// Presenting symptoms including the chief complaint.
    pub symptoms: Vec<String>,
    /// Age in months.
    pub age_months: f64,
    /// Weight in kg.
    #[serde(default)]
    pub weight_kg: Option<f64>,
    /// Systolic blood pressure in mm Hg.
    #[serde(default)]
    pub systolic_bp: Option<f64>,
    /// Diastolic blood pressure in mm Hg.
    #[serde(default)]
    pub diastolic_bp: Option<f64>,
    /// Breaths per minute.
    #[serde(default)]
    pub resp_rate: Option<f64>,
    /// Body temperature in degrees Celsius.
    #[serde(default)]
    pub temp_c: Option<f64>,
    /// Pulse in beats per minute.
    #[serde(default)]
    pub pulse: Option<f64>,
    /// Canadian Triage Acuity Score, 1 (most urgent) to 5.
    pub ctas: u8,
    /// Method of arrival to the ED.
    pub arrival_method: String,
    /// Hour of arrival, 0-23.
    pub arrival_hour: u8,
    /// Weekday of arrival, 0-6.
    pub arrival_weekday: u8,
    /// Month of arrival, 1-12.
    pub arrival_month: u8,
    pub gender: Gender,
}

impl TriageRecord {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(1..=5).contains(&self.ctas) {
            return Err(format!("ctas must be in 1..=5, got {}", self.ctas));
        }
        if self.arrival_hour > 23 {
            return Err(format!("arrival_hour must be in 0..=23, got {}", self.arrival_hour));
        }
        if self.arrival_weekday > 6 {
            return Err(format!(
                "arrival_weekday must be in 0..=6, got {}",
                self.arrival_weekday
            ));
        }
        if !(1..=12).contains(&self.arrival_month) {
            return Err(format!(
                "arrival_month must be in 1..=12, got {}",
                self.arrival_month
            ));
        }
        if !self.age_months.is_finite() || self.age_months < 0.0 {
            return Err(format!("age_months must be finite and >= 0, got {}", self.age_months));
        }
        for (name, value) in [
            ("weight_kg", self.weight_kg),
            ("systolic_bp", self.systolic_bp),
            ("diastolic_bp", self.diastolic_bp),
            ("resp_rate", self.resp_rate),
            ("temp_c", self.temp_c),
            ("pulse", self.pulse),
        ] {
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(format!("{name} must be finite when present, got {v}"));
                }
            }
        }
        if matches!(self.weight_kg, Some(w) if w <= 0.0) {
            return Err("weight_kg must be positive when present".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn from_u8(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(format!("label must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Negative => write!(f, "negative"),
            Label::Positive => write!(f, "positive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRecord {
    pub record: TriageRecord,
    pub label: Label,
}

/// The condition a dataset (and model) targets. One binary model is
/// trained per condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Pneumonia,
    Uti,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Pneumonia => write!(f, "pneumonia"),
            Condition::Uti => write!(f, "uti"),
        }
    }
}

impl std::str::FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pneumonia" => Ok(Condition::Pneumonia),
            "uti" => Ok(Condition::Uti),
            other => Err(format!("unknown condition: {other} (expected pneumonia or uti)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub condition: Condition,
    pub records: Vec<LabeledRecord>,
}

/// Serialization shape of one dataset line: the record fields plus `label`.
#[derive(Serialize, Deserialize)]
struct RecordLine {
    #[serde(flatten)]
    record: TriageRecord,
    label: u8,
}

impl Dataset {
    pub fn new(condition: Condition, records: Vec<LabeledRecord>) -> Self {
        Dataset { condition, records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// (negatives, positives)
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self
            .records
            .iter()
            .filter(|r| r.label.is_positive())
            .count();
        (self.records.len() - pos, pos)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.records.iter().map(|r| r.label).collect()
    }

    pub fn read_ndjson<R: Read>(reader: R, condition: Condition) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: RecordLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            let label = Label::from_u8(parsed.label).map_err(|reason| Error::InvalidRecord {
                line: Some(i + 1),
                reason,
            })?;
            parsed
                .record
                .validate()
                .map_err(|reason| Error::InvalidRecord {
                    line: Some(i + 1),
                    reason,
                })?;
            records.push(LabeledRecord {
                record: parsed.record,
                label,
            });
        }
        Ok(Dataset { condition, records })
    }

    pub fn read_ndjson_path<P: AsRef<Path>>(path: P, condition: Condition) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_ndjson(file, condition)
    }

    pub fn write_ndjson<W: Write>(&self, mut writer: W) -> Result<()> {
        for rec in &self.records {
            let line = RecordLine {
                record: rec.record.clone(),
                label: rec.label.as_u8(),
            };
            serde_json::to_writer(&mut writer, &line)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_ndjson_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_ndjson(&mut buf)?;
        Ok(buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::record;

    #[test]
    fn ndjson_round_trip() {
        let ds = Dataset::new(
            Condition::Uti,
            vec![
                LabeledRecord {
                    record: record(Some(38.2)),
                    label: Label::Positive,
                },
                LabeledRecord {
                    record: record(None),
                    label: Label::Negative,
                },
            ],
        );
        let bytes = ds.to_ndjson_bytes().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().next().unwrap().contains("\"label\":1"));
        assert!(text.lines().nth(1).unwrap().contains("\"temp_c\":null"));

        let back = Dataset::read_ndjson(bytes.as_slice(), Condition::Uti).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn read_rejects_bad_label() {
        let ds = Dataset::new(
            Condition::Uti,
            vec![LabeledRecord {
                record: record(None),
                label: Label::Negative,
            }],
        );
        let bytes = ds.to_ndjson_bytes().unwrap();
        let text = String::from_utf8(bytes).unwrap().replace("\"label\":0", "\"label\":7");
        let err = Dataset::read_ndjson(text.as_bytes(), Condition::Uti).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn read_rejects_invalid_ctas() {
        let mut rec = record(None);
        rec.ctas = 9;
        let line = serde_json::to_string(&RecordLine { record: rec, label: 0 }).unwrap();
        let err = Dataset::read_ndjson(line.as_bytes(), Condition::Pneumonia).unwrap_err();
        assert!(err.to_string().contains("ctas"), "{err}");
    }

    #[test]
    fn serialization_is_deterministic() {
        let ds = Dataset::new(
            Condition::Pneumonia,
            vec![LabeledRecord {
                record: record(Some(37.9)),
                label: Label::Negative,
            }],
        );
        assert_eq!(ds.to_ndjson_bytes().unwrap(), ds.to_ndjson_bytes().unwrap());
    }
}
