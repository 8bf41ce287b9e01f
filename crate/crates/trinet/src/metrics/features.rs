//! Per-class distribution summaries for continuous features.

use serde::{Deserialize, Serialize};

use crate::data::{continuous_value, Dataset, Label, CONTINUOUS_FEATURES};
use crate::error::{Error, Result};
use crate::stats::quantile_sorted;

pub const DEFAULT_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub label: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub histogram: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDistribution {
    pub feature: String,
    /// Left edge of the first bin and the common bin width. Bins span the
    /// pooled range over both classes.
    pub bin_start: f64,
    pub bin_width: f64,
    pub bins: usize,
    pub negative: ClassSummary,
    pub positive: ClassSummary,
}

/// Five-number summary plus histogram per class for one continuous
/// feature. Missing values are excluded; quartiles interpolate linearly.
pub fn feature_distribution(ds: &Dataset, feature: &str, bins: usize) -> Result<FeatureDistribution> {
    let idx = CONTINUOUS_FEATURES
        .iter()
        .position(|&f| f == feature)
        .ok_or_else(|| Error::UnknownFeature(feature.to_string()))?;
    if bins == 0 {
        return Err(Error::BadConfig("histogram needs at least one bin".to_string()));
    }

    let mut values: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for rec in &ds.records {
        if let Some(v) = continuous_value(&rec.record, idx) {
            values[rec.label.as_u8() as usize].push(v);
        }
    }
    for (class, vals) in [(Label::Negative, &values[0]), (Label::Positive, &values[1])] {
        if vals.is_empty() {
            return Err(Error::NoPresentValues {
                feature: feature.to_string(),
                class: class.to_string(),
            });
        }
    }

    let pooled_min = values
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let pooled_max = values
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let width = (pooled_max - pooled_min) / bins as f64;

    let summarize = |label: Label, mut vals: Vec<f64>| {
        vals.sort_by(f64::total_cmp);
        let mut histogram = vec![0usize; bins];
        for &v in &vals {
            let bin = if width == 0.0 {
                0
            } else {
                (((v - pooled_min) / width) as usize).min(bins - 1)
            };
            histogram[bin] += 1;
        }
        ClassSummary {
            label: label.to_string(),
            count: vals.len(),
            min: vals[0],
            q1: quantile_sorted(&vals, 0.25),
            median: quantile_sorted(&vals, 0.5),
            q3: quantile_sorted(&vals, 0.75),
            max: vals[vals.len() - 1],
            histogram,
        }
    };

    let [neg_vals, pos_vals] = values;
    Ok(FeatureDistribution {
        feature: feature.to_string(),
        bin_start: pooled_min,
        bin_width: width,
        bins,
        negative: summarize(Label::Negative, neg_vals),
        positive: summarize(Label::Positive, pos_vals),
    })
}
