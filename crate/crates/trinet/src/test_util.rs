//! Fixtures shared by unit tests.

use crate::data::{Condition, Dataset, Gender, Label, LabeledRecord, TriageRecord};

pub fn record(temp: Option<f64>) -> TriageRecord {
    TriageRecord {
        notes: "presents with cough and fever".to_string(),
        medications: vec!["amoxicillin".to_string()],
        symptoms: vec!["fever".to_string()],
        age_months: 36.0,
        weight_kg: Some(14.5),
        systolic_bp: Some(95.0),
        diastolic_bp: Some(60.0),
        resp_rate: Some(28.0),
        temp_c: temp,
        pulse: Some(120.0),
        ctas: 3,
        arrival_method: "walk_in".to_string(),
        arrival_hour: 14,
        arrival_weekday: 2,
        arrival_month: 11,
        gender: Gender::F,
    }
}

/// Dataset of `neg` negatives followed by `pos` positives, with mild
/// per-record variation so statistics are not degenerate.
pub fn dataset(condition: Condition, neg: usize, pos: usize) -> Dataset {
    let mut records = Vec::with_capacity(neg + pos);
    for i in 0..neg + pos {
        let mut rec = record(Some(37.0 + (i % 5) as f64 * 0.3));
        rec.age_months = 12.0 + (i % 40) as f64 * 4.0;
        rec.weight_kg = Some(8.0 + (i % 30) as f64 * 1.1);
        rec.pulse = Some(100.0 + (i % 60) as f64);
        rec.ctas = 1 + (i % 5) as u8;
        rec.arrival_hour = (i % 24) as u8;
        rec.gender = match i % 3 {
            0 => Gender::M,
            1 => Gender::F,
            _ => Gender::U,
        };
        let label = if i < neg { Label::Negative } else { Label::Positive };
        records.push(LabeledRecord { record: rec, label });
    }
    Dataset::new(condition, records)
}
