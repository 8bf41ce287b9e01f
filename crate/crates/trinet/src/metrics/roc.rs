//! ROC curve and AUC.

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Points from (0,0) to (1,1), non-decreasing in both coordinates.
    pub points: Vec<RocPoint>,
    /// Trapezoidal area under the points; equals the tie-corrected
    /// pairwise-comparison statistic.
    pub auc: f64,
}

/// Sweep thresholds over the distinct scores (ties grouped into one step)
/// and integrate by trapezoid.
pub fn roc_auc(probs: &[f64], labels: &[Label]) -> Result<RocCurve> {
    if probs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: probs.len(),
            right: labels.len(),
        });
    }
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }

    let mut scored: Vec<(f64, Label)> = probs.iter().copied().zip(labels.iter().copied()).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < scored.len() {
        // Consume the whole tie group at this score.
        let score = scored[i].0;
        while i < scored.len() && scored[i].0 == score {
            match scored[i].1 {
                Label::Positive => tp += 1,
                Label::Negative => fp += 1,
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
    }

    let mut auc = 0.0;
    for pair in points.windows(2) {
        auc += (pair[1].fpr - pair[0].fpr) * (pair[1].tpr + pair[0].tpr) / 2.0;
    }
    Ok(RocCurve { points, auc })
}
