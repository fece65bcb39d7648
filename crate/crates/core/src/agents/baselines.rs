use rand::{Rng, RngCore};

use crate::arms::ArmSet;
use crate::env::Environment;
use crate::error::Result;
use crate::trace::{AgentTrace, Phase};

/// Plays `opt_set` at every step.
pub fn opt_run<E: Environment + ?Sized>(
    env: &E,
    horizon: u64,
    opt_set: ArmSet,
    noise: &mut dyn RngCore,
    seed: u64,
) -> Result<AgentTrace> {
    env.ground().check(opt_set)?;
    let mut trace = AgentTrace::new("OPT", seed, horizon);
    trace.committed = Some(opt_set);
    for _ in 0..horizon {
        let r = env.sample(opt_set, noise);
        trace.push(opt_set, r, Phase::Exploit);
    }
    Ok(trace)
}

/// Plays a fresh uniformly random subset (each arm independently with
/// probability 1/2) at every step. Never commits; every step is `Explore`.
pub fn rnd_run<E: Environment + ?Sized>(
    env: &E,
    horizon: u64,
    noise: &mut dyn RngCore,
    coins: &mut dyn RngCore,
    seed: u64,
) -> AgentTrace {
    let n = env.ground().len();
    let mut trace = AgentTrace::new("RND", seed, horizon);
    for _ in 0..horizon {
        let s = (0..n).fold(ArmSet::EMPTY, |s, i| {
            if coins.random_bool(0.5) {
                s.with(i)
            } else {
                s
            }
        });
        let r = env.sample(s, noise);
        trace.push(s, r, Phase::Explore);
    }
    trace
}
