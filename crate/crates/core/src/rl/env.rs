use crate::numerics::Rng;
use crate::{Error, Result};

pub const STEP_PENALTY: f64 = -0.01;
pub const GOAL_REWARD: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Left = 0,
    Right = 1,
}

impl Action {
    pub const COUNT: usize = 2;

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Action::Left),
            1 => Ok(Action::Right),
            _ => Err(Error::InvalidInput(format!("no action with index {i}"))),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Result of one environment step.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub observation: Vec<f64>,
    pub reward: f64,
    /// Reached the goal state.
    pub terminal: bool,
    /// Hit the horizon without reaching the goal.
    pub truncated: bool,
}

impl Step {
    pub fn done(&self) -> bool {
        self.terminal || self.truncated
    }
}

/// Deterministic chain of `n_states` states. RIGHT moves +1, LEFT moves -1
/// (clamped at 0). Reaching the last state pays +1 and ends the episode; every
/// other step costs 0.01. Observations are `one_hot(state)` followed by
/// `noise_dim` standard-normal distractors.
#[derive(Clone, Debug)]
pub struct ChainWorld {
    n_states: usize,
    noise_dim: usize,
    horizon: usize,
    state: usize,
    steps: usize,
    done: bool,
}

impl ChainWorld {
    /// Horizon defaults to `4 * n_states`.
    pub fn new(n_states: usize, noise_dim: usize) -> Result<Self> {
        Self::with_horizon(n_states, noise_dim, 4 * n_states)
    }

    pub fn with_horizon(n_states: usize, noise_dim: usize, horizon: usize) -> Result<Self> {
        if n_states < 2 {
            return Err(Error::InvalidInput(format!(
                "chain needs at least 2 states, got {n_states}"
            )));
        }
        if horizon == 0 {
            return Err(Error::InvalidInput("horizon must be positive".into()));
        }
        Ok(Self {
            n_states,
            noise_dim,
            horizon,
            state: 0,
            steps: 0,
            done: true,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn observation_dim(&self) -> usize {
        self.n_states + self.noise_dim
    }

    fn observe(&self, rng: &mut Rng) -> Vec<f64> {
        let mut obs = vec![0.0; self.observation_dim()];
        obs[self.state] = 1.0;
        for v in &mut obs[self.n_states..] {
            *v = rng.standard_normal();
        }
        obs
    }

    pub fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.state = 0;
        self.steps = 0;
        self.done = false;
        self.observe(rng)
    }

    pub fn step(&mut self, action: Action, rng: &mut Rng) -> Result<Step> {
        if self.done {
            return Err(Error::Contract("step called on a finished episode; reset first".into()));
        }
        self.state = match action {
            Action::Left => self.state.saturating_sub(1),
            Action::Right => self.state + 1,
        };
        self.steps += 1;
        let terminal = self.state == self.n_states - 1;
        let truncated = !terminal && self.steps >= self.horizon;
        self.done = terminal || truncated;
        Ok(Step {
            observation: self.observe(rng),
            reward: if terminal { GOAL_REWARD } else { STEP_PENALTY },
            terminal,
            truncated,
        })
    }
}

/// Discounted return of always moving RIGHT from state 0, which is optimal.
pub fn optimal_return(env: &ChainWorld, gamma: f64) -> f64 {
    let steps = env.n_states() - 1;
    let mut ret = 0.0;
    let mut discount = 1.0;
    for _ in 0..steps - 1 {
        ret += discount * STEP_PENALTY;
        discount *= gamma;
    }
    ret + discount * GOAL_REWARD
}

/// Discounted return of an episode that never reaches the goal.
pub fn worst_return(env: &ChainWorld, gamma: f64) -> f64 {
    let mut ret = 0.0;
    let mut discount = 1.0;
    for _ in 0..env.horizon() {
        ret += discount * STEP_PENALTY;
        discount *= gamma;
    }
    ret
}
