use rand::{Rng, RngCore};
use serde::Serialize;

use super::budget::{compute_sample_budget, confidence_radius};
use crate::arms::ArmSet;
use crate::env::Environment;
use crate::error::Result;
use crate::trace::{AgentTrace, Phase};

/// Outcome of one RGL phase (one base arm).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub arm: usize,
    pub a_bar: f64,
    pub b_bar: f64,
    pub a_prime: f64,
    pub b_prime: f64,
    pub p: f64,
    pub accepted: bool,
    pub x: ArmSet,
    pub y: ArmSet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RglDiagnostics {
    pub horizon: u64,
    pub m: u64,
    pub rad: f64,
    /// Completed phases only; shorter than `n` when exploration was cut off
    /// by the horizon.
    pub phases: Vec<PhaseRecord>,
    pub explore_steps: u64,
    pub truncated: bool,
}

/// Acceptance probability `a'/(a'+b')` with `a' = max(a_bar,0)`,
/// `b' = max(b_bar,0)`, and `p = 1` when both are zero; then one Bernoulli
/// draw from `coins`.
pub fn rgl_phase_decision<R: Rng + ?Sized>(a_bar: f64, b_bar: f64, coins: &mut R) -> (bool, f64) {
    let a = a_bar.max(0.0);
    let b = b_bar.max(0.0);
    let p = if a + b > 0.0 { a / (a + b) } else { 1.0 };
    let accepted = coins.random::<f64>() < p;
    (accepted, p)
}

/// Randomized greedy learning.
///
/// For each arm `u` in index order, plays `X+u, X, Y, Y-u` round-robin `m`
/// times, estimates the add and remove marginals, and keeps `u` in both sets
/// with probability `p` (otherwise drops it from `Y`). Afterwards `X = Y` is
/// exploited. If the horizon ends mid-exploration the trace simply stops;
/// `committed` is then the partially built `X`.
pub fn rgl_run<E: Environment + ?Sized>(
    env: &E,
    horizon: u64,
    noise: &mut dyn RngCore,
    coins: &mut dyn RngCore,
    seed: u64,
) -> Result<(AgentTrace, RglDiagnostics)> {
    rgl_window(env, horizon, horizon, noise, coins, seed)
}

/// RGL sized for `horizon` but stopped after `steps <= horizon` plays.
pub(crate) fn rgl_window<E: Environment + ?Sized>(
    env: &E,
    horizon: u64,
    steps: u64,
    noise: &mut dyn RngCore,
    coins: &mut dyn RngCore,
    seed: u64,
) -> Result<(AgentTrace, RglDiagnostics)> {
    let m = compute_sample_budget(horizon)?;
    let limit = steps.min(horizon);
    let ground = env.ground();
    let mut trace = AgentTrace::new("RGL", seed, horizon);
    let mut x = ArmSet::EMPTY;
    let mut y = ground.full();
    let mut phases = Vec::with_capacity(ground.len());
    let mut truncated = false;

    'arms: for u in 0..ground.len() {
        let plays = [x.with(u), x, y, y.without(u)];
        let mut sum_a = 0.0;
        let mut sum_b = 0.0;
        for _ in 0..m {
            let mut f = [0.0; 4];
            for (slot, &s) in f.iter_mut().zip(&plays) {
                if trace.len() as u64 == limit {
                    truncated = true;
                    break 'arms;
                }
                *slot = env.sample(s, noise);
                trace.push(s, *slot, Phase::Explore);
            }
            sum_a += f[0] - f[1];
            sum_b += f[3] - f[2];
        }
        let a_bar = sum_a / m as f64;
        let b_bar = sum_b / m as f64;
        let (accepted, p) = rgl_phase_decision(a_bar, b_bar, coins);
        if accepted {
            x = x.with(u);
        } else {
            y = y.without(u);
        }
        phases.push(PhaseRecord {
            arm: u,
            a_bar,
            b_bar,
            a_prime: a_bar.max(0.0),
            b_prime: b_bar.max(0.0),
            p,
            accepted,
            x,
            y,
        });
    }

    let explore_steps = trace.len() as u64;
    trace.committed = Some(x);
    while (trace.len() as u64) < limit {
        let r = env.sample(x, noise);
        trace.push(x, r, Phase::Exploit);
    }
    Ok((
        trace,
        RglDiagnostics {
            horizon,
            m,
            rad: confidence_radius(horizon, m),
            phases,
            explore_steps,
            truncated,
        },
    ))
}
