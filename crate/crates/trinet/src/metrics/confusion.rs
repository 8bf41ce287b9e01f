use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn predicted_positives(&self) -> usize {
        self.tp + self.fp
    }
}

/// Rates derived from a confusion matrix. A `None` marks an undefined
/// value (zero denominator); NaN never appears.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub ppv: Option<f64>,
    pub tpr: Option<f64>,
    pub tnr: Option<f64>,
    pub fpr: Option<f64>,
}

/// Count outcomes at a threshold. A record is predicted positive when its
/// probability is greater than or equal to the threshold.
pub fn confusion(probs: &[f64], labels: &[Label], threshold: f64) -> Result<ConfusionMatrix> {
    if probs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: probs.len(),
            right: labels.len(),
        });
    }
    if probs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut cm = ConfusionMatrix {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&p, &label) in probs.iter().zip(labels) {
        let predicted_positive = p >= threshold;
        match (predicted_positive, label) {
            (true, Label::Positive) => cm.tp += 1,
            (true, Label::Negative) => cm.fp += 1,
            (false, Label::Negative) => cm.tn += 1,
            (false, Label::Positive) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

pub fn rates(cm: &ConfusionMatrix) -> Rates {
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    let tnr = ratio(cm.tn, cm.tn + cm.fp);
    Rates {
        ppv: ratio(cm.tp, cm.tp + cm.fp),
        tpr: ratio(cm.tp, cm.tp + cm.fn_),
        tnr,
        fpr: tnr.map(|t| 1.0 - t),
    }
}
