use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    classify_dormant, contribution_split, effective_rank, DormancyConfig, DormancyReport,
    FeatureMatrix, DEFAULT_RANK_DELTA,
};
use crate::harness::baseline_normalized;
use crate::network::{adam_step, init_network, ActivationKind, AdamState, HiddenSpec, Network, NetworkSpec};
use crate::numerics::{Matrix, Rng};
use crate::rl::{
    epsilon_at, optimal_return, worst_return, Action, ChainWorld, EpsilonSchedule, ReplayBuffer,
    Transition,
};
use crate::{Error, Result};

/// Architecture variants compared in the ablations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Two dense hidden layers.
    Baseline,
    /// Final hidden layer replaced by an HR layer.
    Hr,
    /// Final hidden layer twice as wide (parameter-matched to `Hr`).
    Widen,
    /// Two HR layers stacked on the final hidden stage.
    Hr2,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Baseline, Variant::Hr, Variant::Widen, Variant::Hr2];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::Hr => "hr",
            Variant::Widen => "widen",
            Variant::Hr2 => "hr2",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown variant `{s}`")))
    }
}

/// Everything that determines a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub variant: Variant,
    pub activation: ActivationKind,
    pub layer_norm: bool,
    pub seed: u64,
    pub total_steps: u64,
    pub n_states: usize,
    pub noise_dim: usize,
    pub hidden_width: usize,
    pub buffer_capacity: usize,
    pub batch_size: usize,
    pub target_update_period: u64,
    pub gamma: f64,
    pub lr: f64,
    pub adam_eps: f64,
    /// Fraction of `total_steps` over which epsilon decays from 1.0 to 0.1.
    pub epsilon_decay_fraction: f64,
    pub learning_starts: u64,
    /// Environment steps per gradient update.
    pub train_frequency: u64,
    pub diagnostics_period: u64,
    pub diagnostics_batch: usize,
    pub eval_episodes: usize,
    pub rank_delta: f64,
    pub dormancy: DormancyConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Baseline,
            activation: ActivationKind::Tanh,
            layer_norm: false,
            seed: 0,
            total_steps: 60_000,
            n_states: 24,
            noise_dim: 8,
            hidden_width: 128,
            buffer_capacity: 10_000,
            batch_size: 32,
            target_update_period: 200,
            gamma: 0.99,
            lr: 1e-4,
            adam_eps: 1e-5,
            epsilon_decay_fraction: 0.1,
            learning_starts: 500,
            train_frequency: 1,
            diagnostics_period: 5_000,
            diagnostics_batch: 512,
            eval_episodes: 10,
            rank_delta: DEFAULT_RANK_DELTA,
            dormancy: DormancyConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_states", self.n_states.saturating_sub(1)),
            ("hidden_width", self.hidden_width),
            ("buffer_capacity", self.buffer_capacity),
            ("batch_size", self.batch_size),
            ("diagnostics_batch", self.diagnostics_batch.saturating_sub(1)),
            ("eval_episodes", self.eval_episodes),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidSpec(format!("`{name}` is too small")));
            }
        }
        if self.target_update_period == 0 || self.train_frequency == 0 || self.diagnostics_period == 0 {
            return Err(Error::InvalidSpec("periods must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidSpec(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.epsilon_decay_fraction) {
            return Err(Error::InvalidSpec("epsilon_decay_fraction outside [0, 1]".into()));
        }
        if !(self.lr >= 0.0) || !(self.adam_eps > 0.0) {
            return Err(Error::InvalidSpec("lr must be >= 0 and adam_eps > 0".into()));
        }
        if self.batch_size > self.buffer_capacity {
            return Err(Error::InvalidSpec("batch_size exceeds buffer_capacity".into()));
        }
        Ok(())
    }

    pub fn run_id(&self) -> String {
        format!(
            "{}-{}{}-s{}",
            self.variant,
            self.activation,
            if self.layer_norm { "-ln" } else { "" },
            self.seed
        )
    }

    pub fn epsilon_schedule(&self) -> EpsilonSchedule {
        EpsilonSchedule::new((self.total_steps as f64 * self.epsilon_decay_fraction).round() as u64)
    }

    fn env(&self) -> Result<ChainWorld> {
        ChainWorld::new(self.n_states, self.noise_dim)
    }
}

/// Layer layout of a variant.
pub fn variant_spec(config: &TrainConfig) -> NetworkSpec {
    let w = config.hidden_width;
    let act = config.activation;
    let ln = config.layer_norm;
    let first = HiddenSpec::dense(w, act).with_layer_norm(ln);
    let hidden = match config.variant {
        Variant::Baseline => vec![first, HiddenSpec::dense(w, act).with_layer_norm(ln)],
        Variant::Hr => vec![first, HiddenSpec::hr(w, act).with_layer_norm(ln)],
        Variant::Widen => vec![first, HiddenSpec::dense(2 * w, act).with_layer_norm(ln)],
        Variant::Hr2 => vec![
            first,
            HiddenSpec::hr(w, act).with_layer_norm(ln),
            HiddenSpec::hr(w, act).with_layer_norm(ln),
        ],
    };
    NetworkSpec {
        input_dim: config.n_states + config.noise_dim,
        hidden,
        output_dim: Action::COUNT,
    }
}

const INIT_STREAM: u64 = 0;
const ENV_STREAM: u64 = 1;
const EXPLORE_STREAM: u64 = 2;
const REPLAY_STREAM: u64 = 3;
const DIAG_STREAM: u64 = 4;
const EVAL_STREAM: u64 = 5;

/// Q-network for `config`, initialized from the run seed.
pub fn build_variant(config: &TrainConfig) -> Result<Network> {
    let mut rng = Rng::new(config.seed).substream(INIT_STREAM);
    init_network(&variant_spec(config), &mut rng)
}

/// `y = r + gamma * max_a Q_target(s', a) * (1 - terminal)`.
pub fn td_targets(batch: &[&Transition], target: &Network, gamma: f64) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    let next = Matrix::from_rows(&batch.iter().map(|t| &t.next_observation[..]).collect::<Vec<_>>())?;
    let q = target.predict(&next)?;
    Ok(batch
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.terminal {
                t.reward
            } else {
                let best = q.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                t.reward + gamma * best
            }
        })
        .collect())
}

fn greedy_action(net: &Network, obs: &[f64]) -> Result<usize> {
    let q = net.predict(&Matrix::row_vector(obs))?;
    let row = q.row(0);
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Metrics captured at one diagnostic checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct RunCheckpoint {
    pub step: u64,
    /// Mean discounted return of greedy evaluation episodes.
    pub eval_return: f64,
    /// `eval_return` rescaled so never reaching the goal is 0 and the optimum is 1.
    pub return_normalized: f64,
    pub dormant_fraction: f64,
    pub effective_rank: usize,
    pub live_contrib: f64,
    pub dormant_contrib: f64,
    /// Mean TD loss over the updates since the previous checkpoint (0 if none).
    pub loss: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainRunRecord {
    pub run_id: String,
    pub variant: Variant,
    pub activation: ActivationKind,
    pub layer_norm: bool,
    pub seed: u64,
    pub checkpoints: Vec<RunCheckpoint>,
}

impl TrainRunRecord {
    pub fn final_checkpoint(&self) -> Option<&RunCheckpoint> {
        self.checkpoints.last()
    }
}

/// Representational diagnostics of the final hidden layer on one batch.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerDiagnostics {
    pub dormancy: DormancyReport,
    pub effective_rank: usize,
    pub live_contrib: f64,
    pub dormant_contrib: f64,
}

/// Dormancy, effective rank and live/dormant head contributions of the final
/// hidden layer of `net` on `batch`.
pub fn final_layer_diagnostics(
    net: &Network,
    batch: &Matrix,
    dormancy: &DormancyConfig,
    rank_delta: f64,
    rng: &mut Rng,
) -> Result<LayerDiagnostics> {
    let activation = net
        .final_hidden_activation()
        .ok_or_else(|| Error::InvalidInput("network has no hidden layer".into()))?;
    let trace = net.forward_batch(batch)?;
    let features = FeatureMatrix::new(trace.hidden.last().cloned().expect("hidden layer exists"))?;
    let report = classify_dormant(&features, activation, dormancy, rng)?;
    let rank = effective_rank(&features, rank_delta)?;
    let split = contribution_split(net, batch, &report)?;
    Ok(LayerDiagnostics {
        dormancy: report,
        effective_rank: rank,
        live_contrib: split.live,
        dormant_contrib: split.dormant,
    })
}

/// Observations from uniformly random episodes, for diagnostics before the
/// replay memory holds enough data.
pub fn probe_observations(env: &ChainWorld, n: usize, rng: &mut Rng) -> Result<Matrix> {
    let mut env = env.clone();
    let mut rows = Vec::with_capacity(n);
    let mut obs = env.reset(rng);
    while rows.len() < n {
        rows.push(obs.clone());
        let action = Action::from_index(rng.below(Action::COUNT))?;
        let step = env.step(action, rng)?;
        obs = if step.done() { env.reset(rng) } else { step.observation };
    }
    Matrix::from_rows(&rows)
}

/// Step-wise DQN trainer. [`train_run`] drives it to completion.
pub struct Trainer {
    config: TrainConfig,
    env: ChainWorld,
    eval_env: ChainWorld,
    buffer: ReplayBuffer,
    online: Network,
    target: Network,
    adam: AdamState,
    schedule: EpsilonSchedule,
    env_rng: Rng,
    explore_rng: Rng,
    replay_rng: Rng,
    diag_rng: Rng,
    eval_rng: Rng,
    observation: Vec<f64>,
    step: u64,
    loss_sum: f64,
    loss_count: u64,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let root = Rng::new(config.seed);
        let online = build_variant(&config)?;
        let mut env = config.env()?;
        let mut env_rng = root.substream(ENV_STREAM);
        let observation = env.reset(&mut env_rng);
        Ok(Self {
            eval_env: config.env()?,
            buffer: ReplayBuffer::new(config.buffer_capacity)?,
            target: online.clone(),
            adam: AdamState::new(online.param_count(), config.lr, config.adam_eps),
            schedule: config.epsilon_schedule(),
            online,
            env,
            env_rng,
            explore_rng: root.substream(EXPLORE_STREAM),
            replay_rng: root.substream(REPLAY_STREAM),
            diag_rng: root.substream(DIAG_STREAM),
            eval_rng: root.substream(EVAL_STREAM),
            observation,
            step: 0,
            loss_sum: 0.0,
            loss_count: 0,
            config,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn online(&self) -> &Network {
        &self.online
    }

    pub fn target(&self) -> &Network {
        &self.target
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    /// One environment step plus any scheduled update and target sync.
    pub fn step(&mut self) -> Result<()> {
        let epsilon = epsilon_at(&self.schedule, self.step);
        let action = if self.explore_rng.uniform() < epsilon {
            self.explore_rng.below(Action::COUNT)
        } else {
            greedy_action(&self.online, &self.observation)?
        };
        let outcome = self.env.step(Action::from_index(action)?, &mut self.env_rng)?;
        let next = if outcome.done() {
            self.env.reset(&mut self.env_rng)
        } else {
            outcome.observation.clone()
        };
        self.buffer.push(Transition {
            observation: std::mem::replace(&mut self.observation, next),
            action,
            reward: outcome.reward,
            next_observation: outcome.observation,
            terminal: outcome.terminal,
        });
        self.step += 1;

        if self.step > self.config.learning_starts
            && self.step.is_multiple_of(self.config.train_frequency)
            && self.buffer.len() >= self.config.batch_size
        {
            let loss = self.update()?;
            if !loss.is_finite() {
                return Err(Error::Divergence {
                    step: self.step,
                    loss,
                });
            }
            self.loss_sum += loss;
            self.loss_count += 1;
        }
        if self.step.is_multiple_of(self.config.target_update_period) {
            self.target.clone_from(&self.online);
        }
        Ok(())
    }

    fn update(&mut self) -> Result<f64> {
        let batch = self.buffer.sample(self.config.batch_size, &mut self.replay_rng)?;
        let targets = td_targets(&batch, &self.target, self.config.gamma)?;
        let obs = Matrix::from_rows(&batch.iter().map(|t| &t.observation[..]).collect::<Vec<_>>())?;
        let trace = self.online.forward_batch(&obs)?;
        let n = batch.len() as f64;
        let mut d_out = Matrix::zeros(batch.len(), Action::COUNT);
        let mut loss = 0.0;
        for (i, (t, y)) in batch.iter().zip(&targets).enumerate() {
            let diff = trace.output.get(i, t.action) - y;
            loss += diff * diff;
            d_out.set(i, t.action, 2.0 * diff / n);
        }
        let (grads, _) = self.online.backward(&trace, &d_out)?;
        let mut params = self.online.flat_params();
        adam_step(&mut self.adam, &mut params, &grads.flat_params())?;
        self.online.set_flat_params(&params)?;
        Ok(loss / n)
    }

    /// Observations for diagnostics: a replay sample of `diagnostics_batch`
    /// entries, or random-policy rollouts while the memory is smaller.
    pub fn diagnostic_batch(&mut self) -> Result<Matrix> {
        let n = self.config.diagnostics_batch;
        if self.buffer.len() >= n {
            let idx = self.buffer.sample_indices(n, &mut self.diag_rng)?;
            let rows: Vec<&[f64]> = idx
                .iter()
                .map(|&i| &self.buffer.get(i).expect("sampled index").observation[..])
                .collect();
            Matrix::from_rows(&rows)
        } else {
            probe_observations(&self.eval_env, n, &mut self.diag_rng)
        }
    }

    /// Mean discounted return of greedy episodes.
    pub fn evaluate(&mut self) -> Result<f64> {
        let mut total = 0.0;
        for _ in 0..self.config.eval_episodes {
            let mut obs = self.eval_env.reset(&mut self.eval_rng);
            let mut discount = 1.0;
            loop {
                let a = Action::from_index(greedy_action(&self.online, &obs)?)?;
                let s = self.eval_env.step(a, &mut self.eval_rng)?;
                total += discount * s.reward;
                discount *= self.config.gamma;
                if s.done() {
                    break;
                }
                obs = s.observation;
            }
        }
        Ok(total / self.config.eval_episodes as f64)
    }

    /// Records metrics at the current step and resets the loss average.
    pub fn checkpoint(&mut self) -> Result<RunCheckpoint> {
        let batch = self.diagnostic_batch()?;
        let diag = final_layer_diagnostics(
            &self.online,
            &batch,
            &self.config.dormancy,
            self.config.rank_delta,
            &mut self.diag_rng,
        )?;
        let eval_return = self.evaluate()?;
        let best = optimal_return(&self.eval_env, self.config.gamma);
        let worst = worst_return(&self.eval_env, self.config.gamma);
        let loss = if self.loss_count == 0 {
            0.0
        } else {
            self.loss_sum / self.loss_count as f64
        };
        self.loss_sum = 0.0;
        self.loss_count = 0;
        Ok(RunCheckpoint {
            step: self.step,
            eval_return,
            return_normalized: baseline_normalized(eval_return, worst, best)?,
            dormant_fraction: diag.dormancy.fraction,
            effective_rank: diag.effective_rank,
            live_contrib: diag.live_contrib,
            dormant_contrib: diag.dormant_contrib,
            loss,
        })
    }
}

/// Runs epsilon-greedy DQN for `config.total_steps` environment steps,
/// recording diagnostics at step 0, every `diagnostics_period` steps and at
/// the end.
pub fn train_run(config: &TrainConfig) -> Result<TrainRunRecord> {
    train_run_with_trainer(config).map(|(record, _)| record)
}

/// [`train_run`], also returning the finished trainer (networks, replay memory).
pub fn train_run_with_trainer(config: &TrainConfig) -> Result<(TrainRunRecord, Trainer)> {
    let mut trainer = Trainer::new(config.clone())?;
    let mut checkpoints = vec![trainer.checkpoint()?];
    while trainer.step_count() < config.total_steps {
        trainer.step()?;
        let s = trainer.step_count();
        if s % config.diagnostics_period == 0 || s == config.total_steps {
            checkpoints.push(trainer.checkpoint()?);
        }
    }
    let record = TrainRunRecord {
        run_id: config.run_id(),
        variant: config.variant,
        activation: config.activation,
        layer_norm: config.layer_norm,
        seed: config.seed,
        checkpoints,
    };
    Ok((record, trainer))
}
