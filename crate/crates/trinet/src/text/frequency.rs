//! Per-class token document frequencies.

use std::collections::{BTreeMap, BTreeSet};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::text::record_tokens;

const REL_DIFF_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TokenFrequencyRow {
    pub token: String,
    /// Fraction of positive records containing the token.
    pub pos_freq: f64,
    /// Fraction of negative records containing the token.
    pub neg_freq: f64,
    /// |pos - neg| / max(pos, neg, eps)
    pub rel_diff: f64,
    /// Number of records (either class) containing the token.
    pub support: usize,
}

/// Tokens whose per-class document frequencies differ by more than
/// `min_rel_diff` (relative), with at least `min_support` containing
/// records, sorted by relative difference descending.
pub fn token_frequency_report(
    ds: &Dataset,
    min_rel_diff: f64,
    min_support: usize,
) -> Result<Vec<TokenFrequencyRow>> {
    let (neg, pos) = ds.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }

    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for rec in &ds.records {
        let uniq: BTreeSet<String> = record_tokens(&rec.record).into_iter().collect();
        for tok in uniq {
            let entry = counts.entry(tok).or_insert((0, 0));
            if rec.label.is_positive() {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }

    let mut rows: Vec<TokenFrequencyRow> = counts
        .into_iter()
        .map(|(token, (in_pos, in_neg))| {
            let pos_freq = in_pos as f64 / pos as f64;
            let neg_freq = in_neg as f64 / neg as f64;
            let rel_diff =
                (pos_freq - neg_freq).abs() / pos_freq.max(neg_freq).max(REL_DIFF_EPS);
            TokenFrequencyRow {
                token,
                pos_freq,
                neg_freq,
                rel_diff,
                support: in_pos + in_neg,
            }
        })
        .filter(|row| row.rel_diff > min_rel_diff && row.support >= min_support)
        .collect();
    rows.sort_by(|a, b| {
        b.rel_diff
            .total_cmp(&a.rel_diff)
            .then_with(|| a.token.cmp(&b.token))
    });
    Ok(rows)
}
