use serde::{Deserialize, Serialize};

use crate::diagnostics::{FeatureMatrix, KdeCurve};
use crate::network::ActivationKind;
use crate::numerics::Rng;
use crate::Result;

/// Knobs of the KDE dormancy test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DormancyConfig {
    /// Variance of the Gaussian jitter added to each activation.
    pub jitter_variance: f64,
    /// Peak-density threshold at or above which a neuron is dormant.
    pub omega: f64,
    pub grid_points: usize,
}

impl Default for DormancyConfig {
    fn default() -> Self {
        Self {
            jitter_variance: 1e-5,
            omega: 20.0,
            grid_points: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeuronDormancy {
    pub dormant: bool,
    pub peak_density: f64,
    pub mean_activation: f64,
    /// Saturation side for dormant neurons: 0 for ReLU, +-1 for tanh.
    pub omega: Option<f64>,
    /// Dormant tanh neuron with density peaks above threshold at both ends.
    pub bimodal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DormancyReport {
    pub neurons: Vec<NeuronDormancy>,
    pub fraction: f64,
}

impl DormancyReport {
    pub fn dormant_indices(&self) -> Vec<usize> {
        self.neurons
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.dormant.then_some(i))
            .collect()
    }

    /// Saturation values aligned with [`DormancyReport::dormant_indices`].
    pub fn dormant_omegas(&self) -> Vec<f64> {
        self.neurons
            .iter()
            .filter(|n| n.dormant)
            .map(|n| n.omega.unwrap_or(0.0))
            .collect()
    }

    pub fn dormant_count(&self) -> usize {
        self.neurons.iter().filter(|n| n.dormant).count()
    }
}

/// Flags dormant neurons (columns) of `features`. A tanh neuron is dormant
/// when its jittered KDE peak reaches `cfg.omega`; a ReLU neuron is dormant
/// when it is exactly zero on the whole batch. The KDE peak is reported for
/// both.
pub fn classify_dormant(
    features: &FeatureMatrix,
    activation: ActivationKind,
    cfg: &DormancyConfig,
    rng: &mut Rng,
) -> Result<DormancyReport> {
    let mut neurons = Vec::with_capacity(features.cols());
    for c in 0..features.cols() {
        let column = features.column(c);
        let mean = column.iter().sum::<f64>() / column.len() as f64;
        let curve = KdeCurve::estimate(&column, rng, cfg)?;
        let peak = curve.peak();

        let dormant = match activation {
            ActivationKind::Relu => column.iter().all(|&v| v == 0.0),
            ActivationKind::Tanh => peak >= cfg.omega,
        };

        let mut bimodal = false;
        let omega = if !dormant {
            None
        } else {
            match activation {
                ActivationKind::Relu => Some(0.0),
                ActivationKind::Tanh => {
                    if curve.opposite_peak().is_some_and(|p| p >= cfg.omega) {
                        bimodal = true;
                        Some(curve.grid[curve.argmax()].signum())
                    } else {
                        Some(if mean < 0.0 { -1.0 } else { 1.0 })
                    }
                }
            }
        };
        neurons.push(NeuronDormancy {
            dormant,
            peak_density: peak,
            mean_activation: mean,
            omega,
            bimodal,
        });
    }
    let fraction = neurons.iter().filter(|n| n.dormant).count() as f64 / neurons.len() as f64;
    Ok(DormancyReport { neurons, fraction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;

    fn features(cols: Vec<Vec<f64>>) -> FeatureMatrix {
        let rows = cols[0].len();
        FeatureMatrix::new(Matrix::from_fn(rows, cols.len(), |r, c| cols[c][r])).unwrap()
    }

    #[test]
    fn relu_zero_column_is_dormant() {
        let mut rng = Rng::new(0);
        let live: Vec<f64> = (0..64).map(|i| i as f64 / 8.0).collect();
        let f = features(vec![vec![0.0; 64], live]);
        let r = classify_dormant(&f, ActivationKind::Relu, &DormancyConfig::default(), &mut rng).unwrap();
        assert!(r.neurons[0].dormant);
        assert_eq!(r.neurons[0].omega, Some(0.0));
        assert!(!r.neurons[1].dormant);
        assert_eq!(r.fraction, 0.5);
        assert_eq!(r.dormant_indices(), vec![0]);
    }

    #[test]
    fn mostly_zero_relu_column_is_live() {
        let mut rng = Rng::new(2);
        let mut col = vec![0.0; 500];
        col.extend([0.3, 1.2, 0.05]);
        let f = features(vec![col]);
        let r = classify_dormant(&f, ActivationKind::Relu, &DormancyConfig::default(), &mut rng).unwrap();
        assert!(r.neurons[0].peak_density > 20.0);
        assert!(!r.neurons[0].dormant);
    }

    #[test]
    fn saturated_tanh_column() {
        let mut rng = Rng::new(4);
        let sat: Vec<f64> = (0..256).map(|_| rng.uniform_in(0.9995, 1.0)).collect();
        let neg: Vec<f64> = sat.iter().map(|v| -v).collect();
        let f = features(vec![sat, neg]);
        let r = classify_dormant(&f, ActivationKind::Tanh, &DormancyConfig::default(), &mut rng).unwrap();
        assert!(r.neurons[0].dormant && r.neurons[1].dormant);
        assert_eq!(r.neurons[0].omega, Some(1.0));
        assert_eq!(r.neurons[1].omega, Some(-1.0));
        assert!(!r.neurons[0].bimodal);
    }

    #[test]
    fn tanh_of_gaussian_is_live() {
        let mut rng = Rng::new(5);
        let col: Vec<f64> = (0..1024).map(|_| rng.standard_normal().tanh()).collect();
        let f = features(vec![col]);
        let r = classify_dormant(&f, ActivationKind::Tanh, &DormancyConfig::default(), &mut rng).unwrap();
        assert!(!r.neurons[0].dormant);
        assert!(r.neurons[0].peak_density < 10.0, "{}", r.neurons[0].peak_density);
        assert_eq!(r.neurons[0].omega, None);
    }

    #[test]
    fn bimodal_saturation() {
        let mut rng = Rng::new(6);
        let mut col: Vec<f64> = (0..300).map(|_| rng.uniform_in(0.9999, 1.0)).collect();
        col.extend((0..212).map(|_| -rng.uniform_in(0.9999, 1.0)));
        let f = features(vec![col]);

        // Scott's bandwidth follows the overall spread (std ~ 1), so the two
        // peaks stay far below omega = 20.
        let r = classify_dormant(&f, ActivationKind::Tanh, &DormancyConfig::default(), &mut rng).unwrap();
        assert!(!r.neurons[0].dormant, "{:?}", r.neurons[0]);
        assert!(r.neurons[0].peak_density < 2.0);

        let loose = DormancyConfig {
            omega: 0.5,
            ..DormancyConfig::default()
        };
        let r = classify_dormant(&f, ActivationKind::Tanh, &loose, &mut rng).unwrap();
        let n = &r.neurons[0];
        assert!(n.dormant && n.bimodal, "{n:?}");
        assert_eq!(n.omega, Some(1.0));
    }

    #[test]
    fn deterministic_under_seed() {
        let mut src = Rng::new(8);
        let col: Vec<f64> = (0..128).map(|_| src.uniform()).collect();
        let f = features(vec![col.clone(), col]);
        let cfg = DormancyConfig::default();
        let a = classify_dormant(&f, ActivationKind::Tanh, &cfg, &mut Rng::new(1)).unwrap();
        let b = classify_dormant(&f, ActivationKind::Tanh, &cfg, &mut Rng::new(1)).unwrap();
        assert_eq!(a, b);
    }
}
