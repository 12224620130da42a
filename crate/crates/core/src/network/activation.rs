use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// The two nonlinearities studied here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Tanh,
    Relu,
}

impl ActivationKind {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Relu => x.max(0.0),
        }
    }

    /// Derivative expressed through the pre-activation `x` and output `y = f(x)`.
    /// The ReLU subgradient at exactly 0 is 0.
    #[inline]
    pub fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            ActivationKind::Tanh => 1.0 - y * y,
            ActivationKind::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Values the activation saturates to.
    pub fn saturation_limits(self) -> &'static [f64] {
        match self {
            ActivationKind::Tanh => &[-1.0, 1.0],
            ActivationKind::Relu => &[0.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Tanh => "tanh",
            ActivationKind::Relu => "relu",
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tanh" => Ok(ActivationKind::Tanh),
            "relu" => Ok(ActivationKind::Relu),
            other => Err(Error::InvalidSpec(format!("unknown activation `{other}`"))),
        }
    }
}

/// Element-wise activation of a pre-activation vector.
pub fn activation_apply(kind: ActivationKind, pre: &[f64]) -> Vec<f64> {
    pre.iter().map(|&x| kind.apply(x)).collect()
}
