//! Score normalizations and cross-task aggregates.

use crate::{Error, Result};

/// `(score - min) / (max - min)` with `min`/`max` taken from a reference run.
pub fn baseline_normalized(score: f64, min_score: f64, max_score: f64) -> Result<f64> {
    if !(max_score > min_score) {
        return Err(Error::InvalidReference(format!(
            "baseline max {max_score} must exceed min {min_score}"
        )));
    }
    Ok((score - min_score) / (max_score - min_score))
}

/// `(score - random) / (human - random)`.
pub fn human_normalized(score: f64, random_score: f64, human_score: f64) -> Result<f64> {
    if human_score == random_score || !(human_score - random_score).is_finite() {
        return Err(Error::InvalidReference(format!(
            "human score {human_score} must differ from random score {random_score}"
        )));
    }
    Ok((score - random_score) / (human_score - random_score))
}

/// `(score - random) / (target - random)`: 0 for a random policy, 1 at the
/// success threshold.
pub fn success_normalized(score: f64, random_ref: f64, target_ref: f64) -> Result<f64> {
    if target_ref == random_ref || !(target_ref - random_ref).is_finite() {
        return Err(Error::InvalidReference(format!(
            "target score {target_ref} must differ from random score {random_ref}"
        )));
    }
    Ok((score - random_ref) / (target_ref - random_ref))
}

/// Median; even counts take the mean of the middle pair.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("median of no values".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Averages each task over its seeds, then takes the median across tasks.
pub fn median_aggregate<T: AsRef<[f64]>>(per_task: &[T]) -> Result<f64> {
    let mut means = Vec::with_capacity(per_task.len());
    for (i, seeds) in per_task.iter().enumerate() {
        let seeds = seeds.as_ref();
        if seeds.is_empty() {
            return Err(Error::InvalidInput(format!("task {i} has no scores")));
        }
        means.push(seeds.iter().sum::<f64>() / seeds.len() as f64);
    }
    median(&means)
}

/// Interquartile mean: sort, drop `floor(n / 4)` values from each end and
/// average the rest.
pub fn iqm(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("IQM of no values".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let cut = v.len() / 4;
    let kept = &v[cut..v.len() - cut];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}
