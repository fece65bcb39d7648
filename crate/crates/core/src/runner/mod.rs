//! Experiment orchestration: config in, CSV files and a JSON manifest out.
//!
//! Every run is identified by a [`RunKey`] and draws all of its randomness
//! from seeds derived from the master seed and that key, so results do not
//! depend on scheduling or thread count.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::agents::{run_agent, AgentConfig, AgentKind, Diagnostics, Streams};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::metrics::{moving_average, regret_series, Baseline};
use crate::oracle::{exact_maximizer, OptResult, OracleMode};

mod config;
mod output;
mod seed;

pub use config::{EnvSpec, ExperimentConfig, SmokeScale, MAX_SERIES_ROWS, SCHEMA_VERSION};
pub use output::{
    fmt_num, write_csv, RunResult, RunSeeds, SeriesRow, SERIES_HEADER, SUMMARY_HEADER,
};
pub use seed::{derive_seed, Purpose, RunKey};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub parallel: bool,
    /// Keep downsampled per-step rows for `series.csv`.
    pub series: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            parallel: true,
            series: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub agent: AgentKind,
    pub horizon: u64,
    pub rep: u32,
    pub seeds: RunSeeds,
    /// 1-based display form.
    pub committed: Option<String>,
    pub committed_mask: Option<u64>,
    pub k: Option<usize>,
    pub m: Option<u64>,
    pub explore_steps: u64,
    pub regret_full_expected: f64,
    pub regret_full_sampled: f64,
    pub regret_half_expected: f64,
    pub regret_half_sampled: f64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AggregateRecord {
    pub agent: AgentKind,
    pub horizon: u64,
    pub repetitions: usize,
    pub mean_regret_full_expected: f64,
    pub mean_regret_full_sampled: f64,
    pub mean_regret_half_expected: f64,
    pub mean_regret_half_sampled: f64,
    /// Committed sets (1-based) and how many repetitions chose each.
    pub committed_sets: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub crate_version: &'static str,
    pub experiment_id: String,
    pub config: ExperimentConfig,
    pub oracle: OptResult,
    pub opt_set: String,
    pub warnings: Vec<String>,
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<AggregateRecord>,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub results: Vec<RunResult>,
    pub manifest: Manifest,
}

impl ExperimentOutput {
    pub fn result(&self, agent: AgentKind, horizon: u64) -> impl Iterator<Item = &RunResult> {
        self.results
            .iter()
            .filter(move |r| r.key.agent == agent && r.key.horizon == horizon)
    }

    pub fn aggregate(&self, agent: AgentKind, horizon: u64) -> Option<&AggregateRecord> {
        self.manifest
            .aggregates
            .iter()
            .find(|a| a.agent == agent && a.horizon == horizon)
    }

    /// Writes `summary.csv`, `series.csv` and `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        write_csv(&self.results, dir)?;
        let path = dir.join("manifest.json");
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &self.manifest)?;
        Ok(path)
    }
}

/// The optimum used as regret baseline. Environments without exact
/// expectations fall back to Monte-Carlo estimates, which is recorded as a
/// warning.
pub fn resolve_oracle(
    env: &dyn Environment,
    mc_samples: u64,
    warnings: &mut Vec<String>,
) -> Result<OptResult> {
    match exact_maximizer(env, OracleMode::Exact) {
        Err(Error::ApproximateOnly) => {
            let msg = format!(
                "environment has no exact expectations; optimum estimated with {mc_samples} samples per set"
            );
            log::warn!("{msg}");
            warnings.push(msg);
            exact_maximizer(
                env,
                OracleMode::MonteCarlo {
                    samples: mc_samples,
                },
            )
        }
        other => other,
    }
}

/// Runs keys in the order agents (as configured), horizons, repetitions.
pub fn run_keys(config: &ExperimentConfig) -> Vec<RunKey> {
    let mut keys = Vec::new();
    for &agent in &config.agents {
        for &horizon in &config.horizons {
            for rep in 0..config.repetitions {
                keys.push(RunKey {
                    agent,
                    horizon,
                    rep,
                });
            }
        }
    }
    keys
}

pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentOutput> {
    let started = Instant::now();
    let env = config.build_environment()?;
    let mut warnings = Vec::new();
    let opt = resolve_oracle(env.as_ref(), config.oracle_mc_samples, &mut warnings)?;
    log::info!(
        "{}: optimum {} with value {}",
        config.experiment_id,
        opt.opt_set,
        opt.opt_value
    );

    let keys = run_keys(config);
    let run = |key: &RunKey| execute(env.as_ref(), &opt, config, *key, options.series);
    let results: Vec<RunResult> = if options.parallel {
        keys.par_iter().map(run).collect::<Result<_>>()?
    } else {
        keys.iter().map(run).collect::<Result<_>>()?
    };

    let runs = results.iter().map(record).collect();
    let aggregates = aggregates(config, &results);
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION"),
        experiment_id: config.experiment_id.clone(),
        config: config.clone(),
        opt_set: opt.opt_set.to_string(),
        oracle: opt,
        warnings,
        runs,
        aggregates,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    Ok(ExperimentOutput { results, manifest })
}

/// Seeds of one run. The optimal-set reward stream is shared by every agent
/// at the same horizon and repetition, so sampled regrets are paired.
pub fn run_seeds(master_seed: u64, key: &RunKey) -> RunSeeds {
    let opt_key = RunKey {
        agent: AgentKind::Opt,
        ..*key
    };
    RunSeeds {
        env_noise: derive_seed(master_seed, key, Purpose::EnvNoise),
        agent_coins: derive_seed(master_seed, key, Purpose::AgentCoins),
        opt_stream: derive_seed(master_seed, &opt_key, Purpose::OptStream),
    }
}

fn execute(
    env: &dyn Environment,
    opt: &OptResult,
    config: &ExperimentConfig,
    key: RunKey,
    keep_series: bool,
) -> Result<RunResult> {
    let started = Instant::now();
    let seeds = run_seeds(config.master_seed, &key);
    let mut agent = AgentConfig::new(key.agent, key.horizon, seeds.agent_coins);
    match key.agent {
        AgentKind::Opt => agent = agent.with_opt_set(opt.opt_set),
        AgentKind::RglAnytime => {
            let t0 = config
                .anytime_t0
                .ok_or_else(|| Error::Config("RGL-anytime needs anytime_t0".into()))?;
            agent = agent.with_t0(t0);
        }
        _ => {}
    }
    let mut streams = Streams::from_seeds(seeds.env_noise, seeds.agent_coins);
    let run = run_agent(env, &agent, &mut streams)?;
    log::debug!("{} T={} rep={} done", key.agent, key.horizon, key.rep);

    let mut opt_rng = ChaCha8Rng::seed_from_u64(seeds.opt_stream);
    let opt_rewards: Vec<f64> = (0..run.trace.len())
        .map(|_| env.sample(opt.opt_set, &mut opt_rng))
        .collect();
    let regret =
        |alpha, baseline| regret_series(&run.trace, opt, alpha, baseline, Some(&opt_rewards));
    let full_expected = regret(1.0, Baseline::ExpectedOpt)?;
    let full_sampled = regret(1.0, Baseline::SampledOpt)?;
    let half_expected = regret(0.5, Baseline::ExpectedOpt)?.final_value();
    let half_sampled = regret(0.5, Baseline::SampledOpt)?.final_value();

    let series = if keep_series {
        let rewards = run.trace.rewards();
        let smoothed = moving_average(&rewards, config.smoothing_window)?;
        let stride = config.series_stride(key.horizon);
        let last = rewards.len();
        (1..=last)
            .filter(|&t| (t as u64).is_multiple_of(stride) || t == last)
            .map(|t| SeriesRow {
                t: t as u64,
                reward: rewards[t - 1],
                smoothed_reward: smoothed[t - 1],
                regret_full_expected: full_expected.cumulative[t - 1],
                regret_full_sampled: full_sampled.cumulative[t - 1],
            })
            .collect()
    } else {
        Vec::new()
    };

    let k = match &run.diagnostics {
        Diagnostics::REtcg(d) => Some(d.k),
        _ => None,
    };
    Ok(RunResult {
        key,
        seeds,
        committed: run.trace.committed,
        regret_full_expected: full_expected.final_value(),
        regret_full_sampled: full_sampled.final_value(),
        regret_half_expected: half_expected,
        regret_half_sampled: half_sampled,
        explore_steps: run.trace.explore_steps() as u64,
        m: run.diagnostics.m(),
        k,
        series,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn record(r: &RunResult) -> RunRecord {
    RunRecord {
        agent: r.key.agent,
        horizon: r.key.horizon,
        rep: r.key.rep,
        seeds: r.seeds,
        committed: r.committed.map(|s| s.to_string()),
        committed_mask: r.committed.map(|s| s.mask()),
        k: r.k,
        m: r.m,
        explore_steps: r.explore_steps,
        regret_full_expected: r.regret_full_expected,
        regret_full_sampled: r.regret_full_sampled,
        regret_half_expected: r.regret_half_expected,
        regret_half_sampled: r.regret_half_sampled,
        wall_time_ms: r.wall_time_ms,
    }
}

fn aggregates(config: &ExperimentConfig, results: &[RunResult]) -> Vec<AggregateRecord> {
    let mut out = Vec::new();
    for &agent in &config.agents {
        for &horizon in &config.horizons {
            let runs: Vec<&RunResult> = results
                .iter()
                .filter(|r| r.key.agent == agent && r.key.horizon == horizon)
                .collect();
            if runs.is_empty() {
                continue;
            }
            let mean = |f: fn(&RunResult) -> f64| {
                runs.iter().map(|r| f(r)).sum::<f64>() / runs.len() as f64
            };
            let mut committed_sets = BTreeMap::new();
            for s in runs.iter().filter_map(|r| r.committed) {
                *committed_sets.entry(s.to_string()).or_default() += 1;
            }
            out.push(AggregateRecord {
                agent,
                horizon,
                repetitions: runs.len(),
                mean_regret_full_expected: mean(|r| r.regret_full_expected),
                mean_regret_full_sampled: mean(|r| r.regret_full_sampled),
                mean_regret_half_expected: mean(|r| r.regret_half_expected),
                mean_regret_half_sampled: mean(|r| r.regret_half_sampled),
                committed_sets,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(agents: &str, horizons: &str, reps: u32) -> ExperimentConfig {
        let text = format!(
            r#"
schema_version = 1
experiment_id = "unit"
agents = {agents}
horizons = {horizons}
repetitions = {reps}
master_seed = 11
anytime_t0 = 50

[environment]
kind = "tabular"
values = [0.2, 0.0, 0.6, 0.2]
sigma = 0.1
"#
        );
        ExperimentConfig::from_toml_str(&text, Path::new(".")).unwrap()
    }

    #[test]
    fn key_order_and_counts() {
        let c = config(r#"["RND", "RGL"]"#, "[200, 100]", 2);
        let keys = run_keys(&c);
        assert_eq!(keys.len(), 8);
        assert_eq!(keys[0].agent, AgentKind::Rnd);
        assert_eq!(keys[0].horizon, 200);
        assert_eq!(keys[3].horizon, 100);
        assert_eq!(keys[4].agent, AgentKind::Rgl);
    }

    #[test]
    fn serial_matches_parallel() {
        let c = config(
            r#"["RGL", "OPT", "RND", "R-ETCG", "RGL-anytime"]"#,
            "[300, 1000]",
            3,
        );
        let serial = run_experiment(
            &c,
            &RunOptions {
                parallel: false,
                series: true,
            },
        )
        .unwrap();
        let parallel = run_experiment(&c, &RunOptions::default()).unwrap();
        assert_eq!(serial.results.len(), 30);
        for (a, b) in serial.results.iter().zip(&parallel.results) {
            assert_eq!(a.key, b.key);
            assert_eq!(a.series, b.series);
            assert_eq!(a.committed, b.committed);
            assert_eq!(
                a.regret_full_sampled.to_bits(),
                b.regret_full_sampled.to_bits()
            );
        }
    }

    #[test]
    fn opt_stream_is_shared_across_agents() {
        let k = |agent| RunKey {
            agent,
            horizon: 100,
            rep: 4,
        };
        let a = run_seeds(1, &k(AgentKind::Rgl));
        let b = run_seeds(1, &k(AgentKind::Rnd));
        assert_eq!(a.opt_stream, b.opt_stream);
        assert_ne!(a.env_noise, b.env_noise);
        assert_ne!(a.agent_coins, b.agent_coins);
    }

    #[test]
    fn opt_expected_regret_is_near_zero() {
        let c = config(r#"["OPT"]"#, "[10000]", 1);
        let out = run_experiment(&c, &RunOptions::default()).unwrap();
        let r = &out.results[0];
        // Sum of 1e4 clamped N(0.6, 0.1) deviations: sd about 10
        assert!(
            r.regret_full_expected.abs() < 50.0,
            "{}",
            r.regret_full_expected
        );
        assert!((r.regret_half_expected - (r.regret_full_expected - 0.3 * 10_000.0)).abs() < 1e-6);
    }

    #[test]
    fn series_rows_respect_stride() {
        let mut c = config(r#"["RND"]"#, "[1005]", 1);
        c.trace_downsample = Some(10);
        let out = run_experiment(&c, &RunOptions::default()).unwrap();
        let rows = &out.results[0].series;
        assert_eq!(rows.len(), 101);
        assert_eq!(rows[0].t, 10);
        assert_eq!(rows.last().unwrap().t, 1005);
        let no_series = run_experiment(
            &c,
            &RunOptions {
                parallel: true,
                series: false,
            },
        )
        .unwrap();
        assert!(no_series.results[0].series.is_empty());
    }
}
