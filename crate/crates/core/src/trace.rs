use serde::{Deserialize, Serialize};

use crate::arms::ArmSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Explore,
    Exploit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// 1-based time index.
    pub t: u64,
    pub action: ArmSet,
    pub reward: f64,
    pub phase: Phase,
}

/// The per-step record of one agent run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentTrace {
    pub agent_id: String,
    pub seed: u64,
    pub steps: Vec<Step>,
    pub committed: Option<ArmSet>,
}

impl AgentTrace {
    pub fn new(agent_id: impl Into<String>, seed: u64, horizon: u64) -> Self {
        Self {
            agent_id: agent_id.into(),
            seed,
            steps: Vec::with_capacity(horizon as usize),
            committed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub(crate) fn push(&mut self, action: ArmSet, reward: f64, phase: Phase) {
        let t = self.steps.len() as u64 + 1;
        self.steps.push(Step {
            t,
            action,
            reward,
            phase,
        });
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }

    pub fn explore_steps(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.phase == Phase::Explore)
            .count()
    }

    /// Checks the trace invariants: 1-based contiguous time indices, rewards in
    /// `[0,1]`, and every exploit step playing the committed set (when set).
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (k, step) in self.steps.iter().enumerate() {
            if step.t != k as u64 + 1 {
                return Err(format!("step {k} has time index {}", step.t));
            }
            if !(0.0..=1.0).contains(&step.reward) {
                return Err(format!(
                    "reward {} at t={} outside [0,1]",
                    step.reward, step.t
                ));
            }
            if let (Phase::Exploit, Some(c)) = (step.phase, self.committed) {
                if step.action != c {
                    return Err(format!(
                        "exploit step t={} plays {} but committed is {}",
                        step.t, step.action, c
                    ));
                }
            }
        }
        Ok(())
    }
}
