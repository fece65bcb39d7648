use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::agents::AgentKind;
use crate::arms::ArmSet;
use crate::env::{load_network, Environment, LinearMinusCostEnv, NoiseSpec, TabularEnv};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Rows per run in `series.csv` when no stride is configured.
pub const MAX_SERIES_ROWS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment_id: String,
    pub environment: EnvSpec,
    pub agents: Vec<AgentKind>,
    pub horizons: Vec<u64>,
    pub repetitions: u32,
    pub master_seed: u64,
    #[serde(default = "default_window")]
    pub smoothing_window: usize,
    /// Stride for `series.csv` rows; by default chosen per run so that at most
    /// [`MAX_SERIES_ROWS`] rows are written.
    #[serde(default)]
    pub trace_downsample: Option<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// First window length of the RGL-anytime agent.
    #[serde(default)]
    pub anytime_t0: Option<u64>,
    /// Samples per set when the optimum has to be estimated by Monte-Carlo.
    #[serde(default = "default_oracle_samples")]
    pub oracle_mc_samples: u64,
    /// Reduced horizons and repetitions used with `--smoke`.
    #[serde(default)]
    pub smoke: Option<SmokeScale>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmokeScale {
    pub horizons: Vec<u64>,
    pub repetitions: u32,
}

fn default_window() -> usize {
    50
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_oracle_samples() -> u64 {
    20_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvSpec {
    /// Inline table: `values[mask]` is `g` of the subset with that bitmask.
    Tabular {
        values: Vec<f64>,
        sigma: f64,
        #[serde(default)]
        mu: f64,
    },
    /// Table read from a file (see [`TabularEnv::from_toml_str`]).
    TabularFile { path: PathBuf },
    LinearMinusCost {
        #[serde(default)]
        arm_means: Option<Vec<f64>>,
        #[serde(default)]
        sigma: Option<f64>,
        #[serde(default)]
        k_star: Option<u32>,
        /// 1-based, e.g. `"{5,6,7,8}"`.
        #[serde(default)]
        special_set: Option<String>,
        #[serde(default)]
        mc_samples: Option<u64>,
    },
    Network {
        edges: PathBuf,
        communities: PathBuf,
        alpha: f64,
        sigma: f64,
        #[serde(default)]
        f_min: Option<f64>,
        #[serde(default)]
        f_max: Option<f64>,
    },
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.base_dir = base_dir.to_path_buf();
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.experiment_id.trim().is_empty() {
            return bad("experiment_id is empty".into());
        }
        if self.agents.is_empty() {
            return bad("agents is empty".into());
        }
        let mut seen = self.agents.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.agents.len() {
            return bad("agents lists an agent twice".into());
        }
        check_scale(&self.horizons, self.repetitions)?;
        if let Some(smoke) = &self.smoke {
            check_scale(&smoke.horizons, smoke.repetitions)?;
        }
        if self.smoothing_window == 0 {
            return bad("smoothing_window must be positive".into());
        }
        if self.trace_downsample == Some(0) {
            return bad("trace_downsample must be positive".into());
        }
        if self.oracle_mc_samples < 2 {
            return bad("oracle_mc_samples must be at least 2".into());
        }
        match (
            self.agents.contains(&AgentKind::RglAnytime),
            self.anytime_t0,
        ) {
            (true, None) => return bad("RGL-anytime needs anytime_t0".into()),
            (true, Some(t0)) if t0 < 2 => return bad("anytime_t0 must be at least 2".into()),
            _ => {}
        }
        Ok(())
    }

    /// Applies the `[smoke]` scale in place.
    pub fn apply_smoke(&mut self) -> Result<()> {
        let smoke = self
            .smoke
            .clone()
            .ok_or_else(|| Error::Config("config has no [smoke] section".into()))?;
        self.horizons = smoke.horizons;
        self.repetitions = smoke.repetitions;
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Stride between rows of `series.csv` for a run of horizon `t`.
    pub fn series_stride(&self, t: u64) -> u64 {
        self.trace_downsample
            .unwrap_or_else(|| t.div_ceil(MAX_SERIES_ROWS).max(1))
    }

    pub fn build_environment(&self) -> Result<Arc<dyn Environment>> {
        let env: Arc<dyn Environment> = match &self.environment {
            EnvSpec::Tabular { values, sigma, mu } => Arc::new(TabularEnv::new(
                values.clone(),
                NoiseSpec::new(*mu, *sigma)?,
            )?),
            EnvSpec::TabularFile { path } => Arc::new(TabularEnv::from_file(&self.resolve(path))?),
            EnvSpec::LinearMinusCost {
                arm_means,
                sigma,
                k_star,
                special_set,
                mc_samples,
            } => {
                let std = LinearMinusCostEnv::standard();
                let special = match special_set {
                    Some(text) => ArmSet::parse(text)?,
                    None => std.special_set(),
                };
                let env = LinearMinusCostEnv::new(
                    arm_means
                        .clone()
                        .unwrap_or_else(|| std.arm_means().to_vec()),
                    sigma.unwrap_or(std.sigma()),
                    k_star.unwrap_or(std.k_star()),
                    special,
                )?;
                Arc::new(match mc_samples {
                    Some(s) => env.with_mc_samples(*s),
                    None => env,
                })
            }
            EnvSpec::Network {
                edges,
                communities,
                alpha,
                sigma,
                f_min,
                f_max,
            } => {
                let bounds = match (f_min, f_max) {
                    (Some(lo), Some(hi)) => Some((*lo, *hi)),
                    (None, None) => None,
                    _ => return Err(Error::Config("set both f_min and f_max or neither".into())),
                };
                Arc::new(load_network(
                    &self.resolve(edges),
                    &self.resolve(communities),
                    *alpha,
                    *sigma,
                    bounds,
                )?)
            }
        };
        Ok(env)
    }
}

fn check_scale(horizons: &[u64], repetitions: u32) -> Result<()> {
    if horizons.is_empty() {
        return Err(Error::Config("horizons is empty".into()));
    }
    if let Some(t) = horizons.iter().find(|&&t| t < 2) {
        return Err(Error::Config(format!("horizon {t} is below 2")));
    }
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    Ok(())
}
