//! Class weights for the loss, favoring the positive class by the true
//! (pre-augmentation) class ratio.

use crate::data::Dataset;
use crate::error::{Error, Result};

/// `(w_pos, w_neg)` with `w_neg = 1` and `w_pos = negatives / positives`.
pub fn class_weights(ds: &Dataset) -> Result<(f64, f64)> {
    let (neg, pos) = ds.class_counts();
    if pos == 0 {
        return Err(Error::MissingClass("positive".to_string()));
    }
    if neg == 0 {
        return Err(Error::MissingClass("negative".to_string()));
    }
    Ok((neg as f64 / pos as f64, 1.0))
}
