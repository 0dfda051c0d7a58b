use std::fmt;

use crate::state::PhaseState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    /// A non-finite component appeared; the record stops at the last finite state.
    BlewUp,
    StepUnderflow,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Completed => "completed",
            RunStatus::BlewUp => "blew_up",
            RunStatus::StepUnderflow => "step_underflow",
        })
    }
}

/// Accepted states of one run together with per-step bookkeeping.
///
/// `step_sizes[i]`, `jerk_values[i]` and `fevals[i]` belong to the step
/// that produced `states[i + 1]`; `fevals` is cumulative and includes the
/// initialization of the first state.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub states: Vec<PhaseState>,
    pub step_sizes: Vec<f64>,
    pub jerk_values: Vec<f64>,
    pub fevals: Vec<u64>,
    pub initial_fevals: u64,
    pub status: RunStatus,
}

impl TrajectoryRecord {
    pub fn new(initial: PhaseState, initial_fevals: u64) -> Self {
        TrajectoryRecord {
            states: vec![initial],
            step_sizes: Vec::new(),
            jerk_values: Vec::new(),
            fevals: Vec::new(),
            initial_fevals,
            status: RunStatus::Completed,
        }
    }

    pub fn push(&mut self, state: PhaseState, h: f64, jerk: f64, fevals: u64) {
        let total = self.feval_count() + fevals;
        self.states.push(state);
        self.step_sizes.push(h);
        self.jerk_values.push(jerk);
        self.fevals.push(total);
    }

    pub fn last(&self) -> &PhaseState {
        self.states
            .last()
            .expect("trajectory holds at least its initial state")
    }

    /// Total right-hand side evaluations including initialization.
    pub fn feval_count(&self) -> u64 {
        self.fevals.last().copied().unwrap_or(self.initial_fevals)
    }

    pub fn steps(&self) -> usize {
        self.step_sizes.len()
    }

    pub fn min_step(&self) -> Option<f64> {
        self.step_sizes.iter().copied().reduce(f64::min)
    }

    pub fn max_step(&self) -> Option<f64> {
        self.step_sizes.iter().copied().reduce(f64::max)
    }
}
