//! Desk-scale DQN on a chain MDP with distractor features.

mod dqn;
mod env;
mod replay;
mod schedule;

pub use dqn::{
    build_variant, final_layer_diagnostics, probe_observations, td_targets, train_run,
    train_run_with_trainer,
    variant_spec, LayerDiagnostics, RunCheckpoint, TrainConfig, TrainRunRecord, Trainer, Variant,
};
pub use env::{optimal_return, worst_return, Action, ChainWorld, Step, GOAL_REWARD, STEP_PENALTY};
pub use replay::{ReplayBuffer, Transition};
pub use schedule::{epsilon_at, EpsilonSchedule};
