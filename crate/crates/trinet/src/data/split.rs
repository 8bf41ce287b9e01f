//! Stratified train/validation/test splitting.

use rand::seq::SliceRandom;

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.70,
            val: 0.15,
            test: 0.15,
        }
    }
}

impl SplitRatios {
    fn as_array(&self) -> [f64; 3] {
        [self.train, self.val, self.test]
    }
}

/// Split each class by largest-remainder allocation of `count * ratio`,
/// assigning members through a seeded shuffle. The three outputs
/// partition the input; per-class proportions match the ratios as closely
/// as integer counts allow.
pub fn stratified_split(
    ds: &Dataset,
    ratios: SplitRatios,
    seed: u64,
) -> Result<(Dataset, Dataset, Dataset)> {
    let r = ratios.as_array();
    if r.iter().any(|&x| x <= 0.0) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::BadRatios(r));
    }
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut rng = seeded(seed, 0x5b17);
    let mut split_indices: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for class in [Label::Negative, Label::Positive] {
        let mut members: Vec<usize> = ds
            .records
            .iter()
            .enumerate()
            .filter(|(_, rec)| rec.label == class)
            .map(|(i, _)| i)
            .collect();
        if members.len() < 3 {
            return Err(Error::ClassTooSmall {
                class: class.to_string(),
                count: members.len(),
                needed: 3,
            });
        }
        members.shuffle(&mut rng);
        let counts = largest_remainder(members.len(), &r);
        let mut offset = 0;
        for (slot, &take) in counts.iter().enumerate() {
            split_indices[slot].extend(&members[offset..offset + take]);
            offset += take;
        }
    }

    let build = |indices: &mut Vec<usize>| {
        indices.sort_unstable();
        Dataset::new(
            ds.condition,
            indices.iter().map(|&i| ds.records[i].clone()).collect(),
        )
    };
    let [mut a, mut b, mut c] = split_indices;
    Ok((build(&mut a), build(&mut b), build(&mut c)))
}

/// Integer allocation of `count` over `ratios` by largest remainder.
/// Remainder ties go to the earlier split.
fn largest_remainder(count: usize, ratios: &[f64; 3]) -> [usize; 3] {
    let ideal: Vec<f64> = ratios.iter().map(|r| r * count as f64).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - counts[a] as f64;
        let rb = ideal[b] - counts[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for i in 0..count - assigned {
        counts[order[i]] += 1;
    }
    [counts[0], counts[1], counts[2]]
}
