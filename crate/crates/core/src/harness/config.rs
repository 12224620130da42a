//! Experiment configuration files.
//!
//! ```toml
//! [experiment]
//! name = "chain-tanh"
//! seeds = [0, 1, 2]
//! variants = ["baseline", "hr"]      # baseline | hr | widen | hr2
//! activations = ["tanh", "relu"]
//! layer_norm = false
//!
//! [env]
//! n_states = 24
//! noise_dim = 8
//!
//! [train]
//! total_steps = 60000
//! lr = 1e-4
//!
//! [diagnostics]
//! period = 5000
//! omega = 20.0
//! ```
//!
//! Every section and key is optional and falls back to the defaults of
//! [`TrainConfig`]. Unknown sections or keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::DormancyConfig;
use crate::network::ActivationKind;
use crate::rl::{TrainConfig, Variant};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub name: String,
    pub seeds: Vec<u64>,
    pub variants: Vec<Variant>,
    pub activations: Vec<ActivationKind>,
    pub layer_norm: bool,
    pub output_dir: Option<String>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            seeds: vec![0],
            variants: vec![Variant::Baseline, Variant::Hr],
            activations: vec![ActivationKind::Tanh],
            layer_norm: false,
            output_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvSection {
    pub n_states: usize,
    pub noise_dim: usize,
}

impl Default for EnvSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            n_states: d.n_states,
            noise_dim: d.noise_dim,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub total_steps: u64,
    pub hidden_width: usize,
    pub buffer_capacity: usize,
    pub batch_size: usize,
    pub target_update_period: u64,
    pub gamma: f64,
    pub lr: f64,
    pub adam_eps: f64,
    pub epsilon_decay_fraction: f64,
    pub learning_starts: u64,
    pub train_frequency: u64,
    pub eval_episodes: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            total_steps: d.total_steps,
            hidden_width: d.hidden_width,
            buffer_capacity: d.buffer_capacity,
            batch_size: d.batch_size,
            target_update_period: d.target_update_period,
            gamma: d.gamma,
            lr: d.lr,
            adam_eps: d.adam_eps,
            epsilon_decay_fraction: d.epsilon_decay_fraction,
            learning_starts: d.learning_starts,
            train_frequency: d.train_frequency,
            eval_episodes: d.eval_episodes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    pub period: u64,
    pub batch: usize,
    pub omega: f64,
    pub jitter_variance: f64,
    pub grid_points: usize,
    pub rank_delta: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            period: d.diagnostics_period,
            batch: d.diagnostics_batch,
            omega: d.dormancy.omega,
            jitter_variance: d.dormancy.jitter_variance,
            grid_points: d.dormancy.grid_points,
            rank_delta: d.rank_delta,
        }
    }
}

/// A parsed experiment file: the variant x activation x seed grid plus
/// shared hyperparameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub env: EnvSection,
    pub train: TrainSection,
    pub diagnostics: DiagnosticsSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Hex SHA-256 of the fully resolved configuration. Independent of key
    /// order and of whether defaults were spelled out.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// One run per (variant, activation, seed), variants outermost.
    pub fn runs(&self) -> Vec<TrainConfig> {
        let mut out = Vec::new();
        for &variant in &self.experiment.variants {
            for &activation in &self.experiment.activations {
                for &seed in &self.experiment.seeds {
                    out.push(self.train_config(variant, activation, seed));
                }
            }
        }
        out
    }

    pub fn train_config(&self, variant: Variant, activation: ActivationKind, seed: u64) -> TrainConfig {
        let t = &self.train;
        let d = &self.diagnostics;
        TrainConfig {
            variant,
            activation,
            layer_norm: self.experiment.layer_norm,
            seed,
            total_steps: t.total_steps,
            n_states: self.env.n_states,
            noise_dim: self.env.noise_dim,
            hidden_width: t.hidden_width,
            buffer_capacity: t.buffer_capacity,
            batch_size: t.batch_size,
            target_update_period: t.target_update_period,
            gamma: t.gamma,
            lr: t.lr,
            adam_eps: t.adam_eps,
            epsilon_decay_fraction: t.epsilon_decay_fraction,
            learning_starts: t.learning_starts,
            train_frequency: t.train_frequency,
            diagnostics_period: d.period,
            diagnostics_batch: d.batch,
            eval_episodes: t.eval_episodes,
            rank_delta: d.rank_delta,
            dormancy: DormancyConfig {
                jitter_variance: d.jitter_variance,
                omega: d.omega,
                grid_points: d.grid_points,
            },
        }
    }

    /// Validates every run of the grid.
    pub fn validate(&self) -> Result<()> {
        for run in self.runs() {
            run.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}
