//! Regret series, smoothing and aggregation across repetitions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arms::ArmSet;
use crate::error::{Error, Result};
use crate::oracle::OptResult;
use crate::trace::AgentTrace;

/// What the agent's reward is compared against at each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Baseline {
    /// A paired, independently sampled reward stream of the optimal set.
    SampledOpt,
    /// The exact expected value of the optimal set.
    ExpectedOpt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretSeries {
    pub per_step: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub baseline: Baseline,
    /// Approximation factor: 1 for full regret, 1/2 for half-regret.
    pub alpha: f64,
}

impl RegretSeries {
    pub fn final_value(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

/// Per-step regret `alpha * baseline_t - reward_t` and its running sum.
///
/// `opt_rewards` is required for [`Baseline::SampledOpt`] and must match the
/// trace length; it is ignored for [`Baseline::ExpectedOpt`].
pub fn regret_series(
    trace: &AgentTrace,
    opt: &OptResult,
    alpha: f64,
    baseline: Baseline,
    opt_rewards: Option<&[f64]>,
) -> Result<RegretSeries> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be in (0,1], got {alpha}"
        )));
    }
    let per_step: Vec<f64> = match baseline {
        Baseline::ExpectedOpt => trace
            .steps
            .iter()
            .map(|s| alpha * opt.opt_value - s.reward)
            .collect(),
        Baseline::SampledOpt => {
            let opt_rewards = opt_rewards.ok_or_else(|| {
                Error::InvalidArgument("sampled baseline needs an optimal reward stream".into())
            })?;
            if opt_rewards.len() != trace.len() {
                return Err(Error::LengthMismatch {
                    expected: trace.len(),
                    got: opt_rewards.len(),
                });
            }
            trace
                .steps
                .iter()
                .zip(opt_rewards)
                .map(|(s, o)| alpha * o - s.reward)
                .collect()
        }
    };
    let cumulative = per_step
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect();
    Ok(RegretSeries {
        per_step,
        cumulative,
        baseline,
        alpha,
    })
}

/// Trailing mean over `window` points; the first `window - 1` outputs average
/// the points seen so far.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (t, &x) in series.iter().enumerate() {
        sum += x;
        if t >= window {
            sum -= series[t - window];
        }
        out.push(sum / (t + 1).min(window) as f64);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateResult {
    pub mean_cumulative: Vec<f64>,
    pub rep_count: usize,
    pub per_rep_final: Vec<f64>,
    /// Committed-set tallies; runs that never commit are not counted.
    pub committed_sets: BTreeMap<ArmSet, usize>,
}

impl AggregateResult {
    pub fn mean_final(&self) -> f64 {
        self.per_rep_final.iter().sum::<f64>() / self.rep_count as f64
    }

    pub fn committed_fraction(&self, s: ArmSet) -> f64 {
        self.committed_sets.get(&s).copied().unwrap_or(0) as f64 / self.rep_count as f64
    }
}

/// Pointwise mean of cumulative regret across repetitions.
pub fn aggregate(series: &[RegretSeries], committed: &[Option<ArmSet>]) -> Result<AggregateResult> {
    let first = series
        .first()
        .ok_or_else(|| Error::InvalidArgument("nothing to aggregate".into()))?;
    let len = first.cumulative.len();
    for s in series {
        if s.cumulative.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: s.cumulative.len(),
            });
        }
        if s.alpha != first.alpha || s.baseline != first.baseline {
            return Err(Error::InvalidArgument(
                "cannot aggregate series with different alpha or baseline".into(),
            ));
        }
    }
    let reps = series.len() as f64;
    let mean_cumulative = (0..len)
        .map(|t| series.iter().map(|s| s.cumulative[t]).sum::<f64>() / reps)
        .collect();
    let mut committed_sets = BTreeMap::new();
    for s in committed.iter().flatten() {
        *committed_sets.entry(*s).or_default() += 1;
    }
    Ok(AggregateResult {
        mean_cumulative,
        rep_count: series.len(),
        per_rep_final: series.iter().map(RegretSeries::final_value).collect(),
        committed_sets,
    })
}
