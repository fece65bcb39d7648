//! Exhaustive ground truth over small ground sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arms::{cmp_small_then_lex, ArmSet};
use crate::env::{exact_value, monte_carlo_mean, Environment, ENUMERATION_LIMIT};
use crate::error::{Error, Result};

/// Values within this distance of the maximum count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    pub opt_set: ArmSet,
    pub opt_value: f64,
    /// All sets attaining `opt_value`, in tie-break order.
    pub ties: Vec<ArmSet>,
    /// Whether the values were exact or Monte-Carlo estimates.
    pub exact: bool,
}

/// How [`exact_maximizer`] may obtain values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Only exact expectations (or a structural maximizer) are accepted.
    Exact,
    /// Fall back to per-set Monte-Carlo estimates with this many samples when
    /// the environment has no exact expectation for some set.
    MonteCarlo { samples: u64 },
}

/// The maximizer of the expected reward by scanning every subset, or by the
/// environment's structural shortcut when the ground set is too large.
///
/// Ties are broken by smallest cardinality, then lexicographically smallest
/// sorted index list.
pub fn exact_maximizer<E: Environment + ?Sized>(env: &E, mode: OracleMode) -> Result<OptResult> {
    let ground = env.ground();
    if ground.len() > ENUMERATION_LIMIT {
        return structural(env);
    }
    let mut exact = true;
    let values: Vec<(ArmSet, f64)> = ground
        .subsets()
        .map(|s| {
            let e = env.expected_value(s);
            if e.is_exact() {
                return Ok((s, e.value));
            }
            match mode {
                OracleMode::Exact => Err(Error::ApproximateOnly),
                OracleMode::MonteCarlo { samples } => {
                    exact = false;
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(s.mask().wrapping_mul(0x9e37_79b9_7f4a_7c15));
                    Ok((s, monte_carlo_mean(env, s, samples, &mut rng).value))
                }
            }
        })
        .collect::<Result<_>>()?;
    let best = values
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut ties: Vec<ArmSet> = values
        .iter()
        .filter(|&&(_, v)| v >= best - TIE_TOLERANCE)
        .map(|&(s, _)| s)
        .collect();
    ties.sort_by(|a, b| cmp_small_then_lex(*a, *b));
    let opt_set = ties[0];
    let opt_value = values[opt_set.mask() as usize].1;
    Ok(OptResult {
        opt_set,
        opt_value,
        ties,
        exact,
    })
}

fn structural<E: Environment + ?Sized>(env: &E) -> Result<OptResult> {
    let n = env.ground().len();
    let mut ties = env.structural_maximizers().ok_or(Error::EnumerationGuard {
        n,
        limit: ENUMERATION_LIMIT,
    })?;
    ties.sort_by(|a, b| cmp_small_then_lex(*a, *b));
    let opt_set = *ties.first().ok_or(Error::ApproximateOnly)?;
    let opt_value = exact_value(env, opt_set)?;
    Ok(OptResult {
        opt_set,
        opt_value,
        ties,
        exact: true,
    })
}

/// Exact expected marginals `(E f(X+u) - E f(X), E f(Y-u) - E f(Y))`.
pub fn exact_marginal_pair<E: Environment + ?Sized>(
    env: &E,
    x: ArmSet,
    y: ArmSet,
    u: usize,
) -> Result<(f64, f64)> {
    let ground = env.ground();
    ground.check(y)?;
    ground.check_arm(u)?;
    if !x.is_subset(y) || !y.contains(u) || x.contains(u) {
        return Err(Error::InvalidArgument(format!(
            "marginal pair needs X ⊆ Y and u ∈ Y \\ X, got X={x} Y={y} u={}",
            u + 1
        )));
    }
    let ea = exact_value(env, x.with(u))? - exact_value(env, x)?;
    let eb = exact_value(env, y.without(u))? - exact_value(env, y)?;
    Ok((ea, eb))
}
