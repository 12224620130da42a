use serde::{Deserialize, Serialize};

/// Linear exploration schedule from `start` to `end` over `decay_steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_steps: u64,
}

impl EpsilonSchedule {
    pub fn new(decay_steps: u64) -> Self {
        Self {
            start: 1.0,
            end: 0.1,
            decay_steps,
        }
    }
}

pub fn epsilon_at(schedule: &EpsilonSchedule, step: u64) -> f64 {
    if step >= schedule.decay_steps {
        return schedule.end;
    }
    let frac = step as f64 / schedule.decay_steps as f64;
    schedule.start + (schedule.end - schedule.start) * frac
}
