use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::seed::RunKey;
use crate::arms::ArmSet;
use crate::error::{Error, Result};

pub const SUMMARY_HEADER: [&str; 10] = [
    "agent",
    "T",
    "rep",
    "committed_mask",
    "regret_full_expected",
    "regret_full_sampled",
    "regret_half_expected",
    "regret_half_sampled",
    "explore_steps",
    "m",
];

pub const SERIES_HEADER: [&str; 8] = [
    "agent",
    "T",
    "rep",
    "t",
    "reward",
    "smoothed_reward",
    "regret_full_expected",
    "regret_full_sampled",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunSeeds {
    pub env_noise: u64,
    pub agent_coins: u64,
    pub opt_stream: u64,
}

/// One downsampled point of a run's per-step series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesRow {
    pub t: u64,
    pub reward: f64,
    pub smoothed_reward: f64,
    pub regret_full_expected: f64,
    pub regret_full_sampled: f64,
}

/// Everything the runner keeps from one run after its trace is dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub key: RunKey,
    pub seeds: RunSeeds,
    pub committed: Option<ArmSet>,
    pub regret_full_expected: f64,
    pub regret_full_sampled: f64,
    pub regret_half_expected: f64,
    pub regret_half_sampled: f64,
    pub explore_steps: u64,
    pub m: Option<u64>,
    /// Cardinality budget drawn by R-ETCG.
    pub k: Option<usize>,
    pub series: Vec<SeriesRow>,
    pub wall_time_ms: f64,
}

/// Renders `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// dropped, exponent form outside `1e-5 <= |x| < 1e17`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_int<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes `summary.csv` (one row per run) and `series.csv` (downsampled
/// per-step rows) into `dir`, in the order of `results`.
pub fn write_csv(results: &[RunResult], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let summary_path = dir.join("summary.csv");
    let series_path = dir.join("series.csv");

    let mut summary = csv::Writer::from_path(&summary_path)?;
    summary.write_record(SUMMARY_HEADER)?;
    for r in results {
        summary.write_record([
            r.key.agent.name().to_string(),
            r.key.horizon.to_string(),
            r.key.rep.to_string(),
            opt_int(r.committed.map(ArmSet::mask)),
            fmt_num(r.regret_full_expected),
            fmt_num(r.regret_full_sampled),
            fmt_num(r.regret_half_expected),
            fmt_num(r.regret_half_sampled),
            r.explore_steps.to_string(),
            opt_int(r.m),
        ])?;
    }
    summary.flush().map_err(|e| Error::io(&summary_path, e))?;

    let mut series = csv::Writer::from_path(&series_path)?;
    series.write_record(SERIES_HEADER)?;
    for r in results {
        for row in &r.series {
            series.write_record([
                r.key.agent.name().to_string(),
                r.key.horizon.to_string(),
                r.key.rep.to_string(),
                row.t.to_string(),
                fmt_num(row.reward),
                fmt_num(row.smoothed_reward),
                fmt_num(row.regret_full_expected),
                fmt_num(row.regret_full_sampled),
            ])?;
        }
    }
    series.flush().map_err(|e| Error::io(&series_path, e))?;
    Ok((summary_path, series_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::AgentKind;
    use proptest::prelude::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.6), "0.59999999999999998");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-3.0), "-3");
        assert_eq!(fmt_num(12345.25), "12345.25");
        assert_eq!(fmt_num(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_num(1e20), "1e+20");
        assert_eq!(fmt_num(0.1 + 0.2), "0.30000000000000004");
    }

    proptest! {
        #[test]
        fn renders_exactly(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let s = fmt_num(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn empty_results_write_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let (summary, series) = write_csv(&[], dir.path()).unwrap();
        assert_eq!(
            fs::read_to_string(summary).unwrap().trim(),
            SUMMARY_HEADER.join(",")
        );
        assert_eq!(
            fs::read_to_string(series).unwrap().trim(),
            SERIES_HEADER.join(",")
        );
    }

    #[test]
    fn committed_mask_rendering() {
        let dir = tempfile::tempdir().unwrap();
        let r = RunResult {
            key: RunKey {
                agent: AgentKind::Rgl,
                horizon: 10,
                rep: 0,
            },
            seeds: RunSeeds {
                env_noise: 1,
                agent_coins: 2,
                opt_stream: 3,
            },
            committed: Some(ArmSet::parse("{5,6,7,8}").unwrap()),
            regret_full_expected: 1.5,
            regret_full_sampled: 1.25,
            regret_half_expected: 0.5,
            regret_half_sampled: 0.25,
            explore_steps: 10,
            m: Some(6),
            k: None,
            series: vec![],
            wall_time_ms: 0.0,
        };
        let (summary, _) = write_csv(&[r], dir.path()).unwrap();
        let text = fs::read_to_string(summary).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "RGL,10,0,240,1.5,1.25,0.5,0.25,10,6"
        );
    }
}
