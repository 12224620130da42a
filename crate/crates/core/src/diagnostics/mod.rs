//! Representational-health metrics for hidden layers: KDE-based dormancy,
//! effective rank, and the decomposition of a layer's pre-activation into
//! live contributions and the constant bias injected by saturated neurons.

mod bias;
mod dormancy;
mod kde;
mod rank;

use std::ops::Deref;

pub use bias::{
    bias_decomposition, contribution_split, output_contributions, BiasDecomposition,
    ContributionSplit, Contributions,
};
pub use dormancy::{classify_dormant, DormancyConfig, DormancyReport, NeuronDormancy};
pub use kde::{kde_peak_density, kde_peak_density_with, scott_bandwidth, KdeCurve};
pub use rank::{effective_rank, effective_rank_from_singular_values, DEFAULT_RANK_DELTA};

use crate::numerics::Matrix;
use crate::{Error, Result};

/// Activations of one hidden layer over an evaluation batch: rows are
/// observations, columns are neurons.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix(Matrix);

impl FeatureMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() < 2 || m.cols() == 0 {
            return Err(Error::InvalidInput(format!(
                "feature matrix needs at least 2 observations and 1 neuron, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("feature matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }
}

impl Deref for FeatureMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}
