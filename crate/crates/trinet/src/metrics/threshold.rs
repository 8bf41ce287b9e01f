//! PPV-maximizing threshold selection.
//!
//! The unconstrained maximum is degenerate (one predicted positive), so
//! the search takes a floor on predicted positives and on sensitivity.
//! Selection runs on the validation split; the chosen threshold is then
//! reported on the held-out test split.

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::metrics::confusion::{confusion, rates, ConfusionMatrix};

pub const DEFAULT_MIN_PREDICTED_POSITIVES: usize = 10;
pub const DEFAULT_MIN_TPR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSelection {
    pub threshold: f64,
    pub ppv: f64,
    pub tpr: f64,
    pub predicted_positives: usize,
    pub confusion: ConfusionMatrix,
}

/// Candidate thresholds are the midpoints between consecutive distinct
/// sorted scores plus a below-minimum and an above-maximum sentinel.
pub fn threshold_candidates(probs: &[f64]) -> Vec<f64> {
    let mut distinct: Vec<f64> = probs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut candidates = Vec::with_capacity(distinct.len() + 1);
    candidates.push(distinct[0] - 1.0);
    for pair in distinct.windows(2) {
        candidates.push((pair[0] + pair[1]) / 2.0);
    }
    candidates.push(distinct[distinct.len() - 1] + 1.0);
    candidates
}

/// Among candidates with at least `min_predicted_positives` predicted
/// positives and sensitivity at least `min_tpr`, pick the maximum PPV.
/// Ties break toward higher TPR, then toward the lower threshold.
pub fn select_threshold_max_ppv(
    probs: &[f64],
    labels: &[Label],
    min_predicted_positives: usize,
    min_tpr: f64,
) -> Result<ThresholdSelection> {
    if probs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: probs.len(),
            right: labels.len(),
        });
    }
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::SingleClass);
    }

    let mut best: Option<ThresholdSelection> = None;
    let mut best_unconstrained: Option<ThresholdSelection> = None;
    for t in threshold_candidates(probs) {
        let cm = confusion(probs, labels, t)?;
        let r = rates(&cm);
        let (ppv, tpr) = match (r.ppv, r.tpr) {
            (Some(ppv), Some(tpr)) => (ppv, tpr),
            // No predicted positives: PPV undefined, candidate unusable.
            _ => continue,
        };
        let selection = ThresholdSelection {
            threshold: t,
            ppv,
            tpr,
            predicted_positives: cm.predicted_positives(),
            confusion: cm,
        };
        if better(&selection, &best_unconstrained) {
            best_unconstrained = Some(selection);
        }
        if cm.predicted_positives() >= min_predicted_positives
            && tpr >= min_tpr
            && better(&selection, &best)
        {
            best = Some(selection);
        }
    }

    match best {
        Some(selection) => Ok(selection),
        None => {
            let fallback = best_unconstrained
                .expect("both classes present, so the all-positive candidate has defined PPV");
            Err(Error::NoFeasibleThreshold {
                threshold: fallback.threshold,
                ppv: fallback.ppv,
                tpr: fallback.tpr,
            })
        }
    }
}

/// Ordering: higher PPV, then higher TPR, then lower threshold.
fn better(candidate: &ThresholdSelection, current: &Option<ThresholdSelection>) -> bool {
    match current {
        None => true,
        Some(cur) => {
            if candidate.ppv != cur.ppv {
                return candidate.ppv > cur.ppv;
            }
            if candidate.tpr != cur.tpr {
                return candidate.tpr > cur.tpr;
            }
            candidate.threshold < cur.threshold
        }
    }
}
