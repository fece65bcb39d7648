use rand::{Rng, RngCore};
use serde::Serialize;

use super::budget::etcg_budget;
use crate::arms::ArmSet;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::trace::{AgentTrace, Phase};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtcgDiagnostics {
    pub k: usize,
    /// Samples per candidate; `None` when `k = 0` and no greedy phase runs.
    pub m: Option<u64>,
    /// Arm added in each completed greedy phase, with its empirical mean.
    pub picks: Vec<(usize, f64)>,
    pub explore_steps: u64,
    pub truncated: bool,
}

/// Explore-then-commit greedy with a cardinality budget `k` drawn uniformly
/// from `{0, ..., n}` using `coins`.
pub fn retcg_run<E: Environment + ?Sized>(
    env: &E,
    horizon: u64,
    noise: &mut dyn RngCore,
    coins: &mut dyn RngCore,
    seed: u64,
) -> Result<(AgentTrace, EtcgDiagnostics)> {
    let k = coins.random_range(0..=env.ground().len());
    retcg_run_with_k(env, horizon, k, noise, seed)
}

/// R-ETCG with a fixed budget `k`. Each greedy phase plays every candidate
/// `S + a` (arms in index order) `m` times in a block and adds the candidate
/// with the highest empirical mean, lowest index on ties. The final set is
/// exploited; a horizon cut mid-exploration commits the current set.
pub fn retcg_run_with_k<E: Environment + ?Sized>(
    env: &E,
    horizon: u64,
    k: usize,
    noise: &mut dyn RngCore,
    seed: u64,
) -> Result<(AgentTrace, EtcgDiagnostics)> {
    let ground = env.ground();
    let n = ground.len();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    if horizon < 2 {
        return Err(Error::HorizonTooShort {
            got: horizon,
            min: 2,
        });
    }
    let m = if k == 0 {
        None
    } else {
        Some(etcg_budget(horizon, n, k)?)
    };
    let mut trace = AgentTrace::new("R-ETCG", seed, horizon);
    let mut s = ArmSet::EMPTY;
    let mut picks = Vec::with_capacity(k);
    let mut truncated = false;

    'phases: for _ in 0..k {
        let m = m.expect("k > 0");
        let mut best: Option<(usize, f64)> = None;
        for a in ground.complement(s).iter() {
            let candidate = s.with(a);
            let mut sum = 0.0;
            for _ in 0..m {
                if trace.len() as u64 == horizon {
                    truncated = true;
                    break 'phases;
                }
                let r = env.sample(candidate, noise);
                sum += r;
                trace.push(candidate, r, Phase::Explore);
            }
            let mean = sum / m as f64;
            if best.is_none_or(|(_, b)| mean > b) {
                best = Some((a, mean));
            }
        }
        let (a, mean) = best.expect("k <= n leaves a candidate");
        s = s.with(a);
        picks.push((a, mean));
    }

    let explore_steps = trace.len() as u64;
    trace.committed = Some(s);
    while (trace.len() as u64) < horizon {
        let r = env.sample(s, noise);
        trace.push(s, r, Phase::Exploit);
    }
    Ok((
        trace,
        EtcgDiagnostics {
            k,
            m,
            picks,
            explore_steps,
            truncated,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::TabularEnv;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_budget_plays_empty_set() {
        let env = TabularEnv::submodular_example(0.1).unwrap();
        let mut noise = ChaCha8Rng::seed_from_u64(0);
        let (trace, diag) = retcg_run_with_k(&env, 500, 0, &mut noise, 0).unwrap();
        assert!(trace.steps.iter().all(|s| s.action == ArmSet::EMPTY));
        assert_eq!(diag.m, None);
        assert_eq!(diag.explore_steps, 0);
        assert_eq!(trace.len(), 500);
    }

    #[test]
    fn full_budget_takes_everything() {
        let env = TabularEnv::non_submodular_example(0.3).unwrap();
        let mut noise = ChaCha8Rng::seed_from_u64(4);
        let (trace, _) = retcg_run_with_k(&env, 10_000, 2, &mut noise, 0).unwrap();
        assert_eq!(trace.committed, Some(env.ground().full()));
        trace.validate().unwrap();
    }

    #[test]
    fn noiseless_single_pick() {
        let env = TabularEnv::submodular_example(0.0).unwrap();
        let mut noise = ChaCha8Rng::seed_from_u64(0);
        let (trace, diag) = retcg_run_with_k(&env, 10_000, 1, &mut noise, 0).unwrap();
        assert_eq!(trace.committed, Some(ArmSet::parse("{2}").unwrap()));
        let m = diag.m.unwrap();
        assert_eq!(m, etcg_budget(10_000, 2, 1).unwrap());
        assert_eq!(diag.explore_steps, 2 * m);
    }

    #[test]
    fn ties_pick_lowest_index() {
        let env =
            TabularEnv::constant(3, 0.5, crate::env::NoiseSpec::gaussian(0.0).unwrap()).unwrap();
        let mut noise = ChaCha8Rng::seed_from_u64(0);
        let (_, diag) = retcg_run_with_k(&env, 10_000, 2, &mut noise, 0).unwrap();
        assert_eq!(
            diag.picks.iter().map(|p| p.0).collect::<Vec<_>>(),
            vec![0, 1]
        );
    }

    #[test]
    fn short_horizon_truncates() {
        // n = 3, k = 3, T = 5 gives m = 1 and 6 candidate plays
        let env =
            TabularEnv::constant(3, 0.5, crate::env::NoiseSpec::gaussian(0.1).unwrap()).unwrap();
        let mut noise = ChaCha8Rng::seed_from_u64(0);
        let (trace, diag) = retcg_run_with_k(&env, 5, 3, &mut noise, 0).unwrap();
        assert_eq!(diag.m, Some(1));
        assert!(diag.truncated);
        assert_eq!(trace.len(), 5);
        trace.validate().unwrap();
    }

    #[test]
    fn budget_draw_is_uniform() {
        let env =
            TabularEnv::constant(3, 0.5, crate::env::NoiseSpec::gaussian(0.0).unwrap()).unwrap();
        let mut counts = [0usize; 4];
        let mut coins = ChaCha8Rng::seed_from_u64(8);
        let mut noise = ChaCha8Rng::seed_from_u64(9);
        let reps = 8000;
        for _ in 0..reps {
            let (_, diag) = retcg_run(&env, 2, &mut noise, &mut coins, 0).unwrap();
            counts[diag.k] += 1;
        }
        // 4 binomial(8000, 1/4) counts; 5 sd is about 194
        for c in counts {
            assert!((c as f64 - reps as f64 / 4.0).abs() < 200.0, "{counts:?}");
        }
    }
}
