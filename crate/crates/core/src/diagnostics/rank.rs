use crate::numerics::{singular_values, Matrix};
use crate::Result;

pub const DEFAULT_RANK_DELTA: f64 = 0.01;

/// `srank_delta` from descending singular values:
/// `d - #{i : cumsum_i >= (1 - delta) * sum} + 1`.
///
/// An all-zero spectrum satisfies every comparison and yields 1.
pub fn effective_rank_from_singular_values(singular: &[f64], delta: f64) -> usize {
    let total: f64 = singular.iter().sum();
    let threshold = (1.0 - delta) * total;
    let mut cumsum = 0.0;
    let mut crossed = 0;
    for &s in singular {
        cumsum += s;
        if cumsum >= threshold {
            crossed += 1;
        }
    }
    singular.len() - crossed + 1
}

/// Smallest number of leading singular values of `phi` carrying a `1 - delta`
/// share of the nuclear norm.
pub fn effective_rank(phi: &Matrix, delta: f64) -> Result<usize> {
    let sv = singular_values(phi)?;
    if sv.iter().all(|&s| s == 0.0) {
        log::warn!("effective rank of an all-zero feature matrix; reporting 1");
    }
    Ok(effective_rank_from_singular_values(&sv, delta))
}
