//! Central finite-difference verification of the backward pass.

mod common;

use common::gradcheck::{max_relative_error, MAX_REL_ERR};

#[test]
fn gradients_match_finite_differences_over_random_architectures() {
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        let err = max_relative_error(1000 + seed);
        if err >= MAX_REL_ERR {
            failures.push((seed, err));
        }
    }
    assert!(
        failures.is_empty(),
        "gradient mismatches (seed, max rel err): {failures:?}"
    );
}
