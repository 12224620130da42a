//! Collapse probability of a single neuron versus a Hadamard product of two
//! independent branches.
//!
//! With per-branch saturation probability `p`, a tanh product only collapses
//! when both branches saturate (`p^2`), while a ReLU product collapses as soon
//! as either branch is dead (`2p - p^2`).

use crate::network::ActivationKind;
use crate::numerics::Rng;
use crate::rl::TrainRunRecord;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapseModel {
    pub activation: ActivationKind,
    pub p: f64,
}

impl CollapseModel {
    pub fn new(activation: ActivationKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "saturation probability {p} outside [0, 1]"
            )));
        }
        Ok(Self { activation, p })
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.activation, self.p).map(|_| ())
    }
}

/// Closed-form probability that an HR neuron collapses.
pub fn collapse_probability(model: &CollapseModel) -> Result<f64> {
    model.validate()?;
    let p = model.p;
    Ok(match model.activation {
        ActivationKind::Tanh => p * p,
        ActivationKind::Relu => 2.0 * p - p * p,
    })
}

/// Empirical collapse frequency from `trials` pairs of independent
/// Bernoulli(`p`) branch saturations.
pub fn monte_carlo_collapse(model: &CollapseModel, trials: u64, rng: &mut Rng) -> Result<f64> {
    model.validate()?;
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let mut collapsed = 0u64;
    for _ in 0..trials {
        let first = rng.bernoulli(model.p);
        let second = rng.bernoulli(model.p);
        let hit = match model.activation {
            ActivationKind::Tanh => first && second,
            ActivationKind::Relu => first || second,
        };
        collapsed += u64::from(hit);
    }
    Ok(collapsed as f64 / trials as f64)
}

/// Change in dormant fraction from a baseline to its HR counterpart, both as
/// an absolute difference and relative to the baseline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DormancyShift {
    pub baseline: f64,
    pub hr: f64,
    pub absolute: f64,
    /// `NaN` when the baseline fraction is zero.
    pub relative: f64,
}

impl DormancyShift {
    pub fn new(baseline: f64, hr: f64) -> Self {
        let absolute = hr - baseline;
        let relative = if baseline == 0.0 { f64::NAN } else { absolute / baseline };
        Self {
            baseline,
            hr,
            absolute,
            relative,
        }
    }

    /// Model prediction: baseline at `p`, HR at the collapse probability.
    pub fn predicted(model: &CollapseModel) -> Result<Self> {
        Ok(Self::new(model.p, collapse_probability(model)?))
    }

    pub fn direction(&self) -> f64 {
        if self.absolute == 0.0 {
            0.0
        } else {
            self.absolute.signum()
        }
    }
}

fn mean_final_fraction(runs: &[TrainRunRecord], label: &str) -> Result<f64> {
    if runs.is_empty() {
        return Err(Error::InvalidInput(format!("no runs for {label}")));
    }
    let mut sum = 0.0;
    for run in runs {
        let last = run
            .checkpoints
            .last()
            .ok_or_else(|| Error::InvalidInput(format!("{label} run has no checkpoints")))?;
        sum += last.dormant_fraction;
    }
    Ok(sum / runs.len() as f64)
}

/// Seed-averaged final dormancy shifts `(tanh, relu)` from paired baseline and
/// HR runs.
pub fn empirical_collapse_from_training(
    tanh_baseline: &[TrainRunRecord],
    tanh_hr: &[TrainRunRecord],
    relu_baseline: &[TrainRunRecord],
    relu_hr: &[TrainRunRecord],
) -> Result<(DormancyShift, DormancyShift)> {
    let tanh = DormancyShift::new(
        mean_final_fraction(tanh_baseline, "tanh baseline")?,
        mean_final_fraction(tanh_hr, "tanh HR")?,
    );
    let relu = DormancyShift::new(
        mean_final_fraction(relu_baseline, "relu baseline")?,
        mean_final_fraction(relu_hr, "relu HR")?,
    );
    Ok((tanh, relu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(a: ActivationKind, p: f64) -> CollapseModel {
        CollapseModel::new(a, p).unwrap()
    }

    #[test]
    fn closed_forms() {
        let t = collapse_probability(&model(ActivationKind::Tanh, 0.39)).unwrap();
        assert!((t - 0.1521).abs() < 1e-15);
        assert_eq!(collapse_probability(&model(ActivationKind::Relu, 0.5)).unwrap(), 0.75);
        for a in [ActivationKind::Tanh, ActivationKind::Relu] {
            assert_eq!(collapse_probability(&model(a, 0.0)).unwrap(), 0.0);
            assert_eq!(collapse_probability(&model(a, 1.0)).unwrap(), 1.0);
        }
    }

    #[test]
    fn invalid_probability() {
        assert!(CollapseModel::new(ActivationKind::Tanh, 1.5).is_err());
        let bad = CollapseModel {
            activation: ActivationKind::Relu,
            p: -0.1,
        };
        assert!(collapse_probability(&bad).is_err());
        assert!(monte_carlo_collapse(&bad, 10, &mut Rng::new(0)).is_err());
    }

    #[test]
    fn monte_carlo_boundaries() {
        let mut rng = Rng::new(1);
        for a in [ActivationKind::Tanh, ActivationKind::Relu] {
            assert_eq!(monte_carlo_collapse(&model(a, 0.0), 1000, &mut rng).unwrap(), 0.0);
            assert_eq!(monte_carlo_collapse(&model(a, 1.0), 1000, &mut rng).unwrap(), 1.0);
        }
    }

    #[test]
    fn monte_carlo_tanh_039() {
        // 4 sigma = 4 * sqrt(0.1521 * 0.8479 / 1e6) ~ 1.44e-3
        let mut rng = Rng::new(39);
        let f = monte_carlo_collapse(&model(ActivationKind::Tanh, 0.39), 1_000_000, &mut rng).unwrap();
        assert!((f - 0.1521).abs() < 0.002, "{f}");
    }

    #[test]
    fn shifts() {
        let s = DormancyShift::new(0.39, 0.30);
        assert!((s.relative + 0.2308).abs() < 1e-3);
        assert_eq!(s.direction(), -1.0);
        let r = DormancyShift::new(0.62, 0.73);
        assert!((r.relative - 0.1774).abs() < 1e-3);
        assert_eq!(DormancyShift::new(0.4, 0.4).relative, 0.0);
        assert!(DormancyShift::new(0.0, 0.1).relative.is_nan());

        let pred = DormancyShift::predicted(&model(ActivationKind::Tanh, 0.39)).unwrap();
        assert!((pred.absolute + (0.39 - 0.39 * 0.39)).abs() < 1e-15);
    }

    #[test]
    fn missing_runs() {
        assert!(empirical_collapse_from_training(&[], &[], &[], &[]).is_err());
    }
}
