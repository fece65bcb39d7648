use std::path::Path;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{clamp01, draw, Environment, Expectation, NoiseSpec};
use crate::arms::{ArmSet, GroundSet};
use crate::error::{Error, Result};

/// Reward `min(max(g(S) + eps, 0), 1)` with `eps ~ N(mu, sigma)` over an
/// explicit table `g` of all `2^n` subsets.
///
/// `expected_value` reports the table mean `g(S) + mu` as exact. Near 0 and 1
/// the clamp biases the true sample mean away from it; use
/// [`super::monte_carlo_mean`] for the clamped mean.
#[derive(Clone, Debug)]
pub struct TabularEnv {
    ground: GroundSet,
    values: Vec<f64>,
    noise: NoiseSpec,
}

#[derive(Deserialize, Serialize)]
struct TableFile {
    n: usize,
    sigma: f64,
    #[serde(default)]
    mu: f64,
    #[serde(rename = "row")]
    rows: Vec<TableRow>,
}

#[derive(Deserialize, Serialize)]
struct TableRow {
    mask: u64,
    g: f64,
}

impl TabularEnv {
    /// `values[mask]` is `g` of the subset with that bitmask.
    pub fn new(values: Vec<f64>, noise: NoiseSpec) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidEnvironment(format!(
                "table must have 2^n entries, got {len}"
            )));
        }
        let ground = GroundSet::new(len.trailing_zeros() as usize)?;
        if let Some((mask, g)) = values
            .iter()
            .enumerate()
            .find(|(_, g)| !(0.0..=1.0).contains(*g))
        {
            return Err(Error::InvalidEnvironment(format!(
                "g({}) = {g} is outside [0,1]",
                ArmSet::from_mask(mask as u64)
            )));
        }
        Ok(Self {
            ground,
            values,
            noise,
        })
    }

    /// First tabular experiment: submodular, non-monotone, optimum `{2}`.
    pub fn submodular_example(sigma: f64) -> Result<Self> {
        Self::new(vec![0.2, 0.0, 0.6, 0.2], NoiseSpec::gaussian(sigma)?)
    }

    /// Second tabular experiment: neither submodular nor monotone, optimum
    /// `{1,2}`.
    pub fn non_submodular_example(sigma: f64) -> Result<Self> {
        Self::new(vec![0.3, 0.0, 0.5, 0.9], NoiseSpec::gaussian(sigma)?)
    }

    pub fn constant(n: usize, c: f64, noise: NoiseSpec) -> Result<Self> {
        GroundSet::new(n)?;
        Self::new(vec![c; 1 << n], noise)
    }

    /// Parses a TOML table file:
    ///
    /// ```toml
    /// n = 2
    /// sigma = 0.1
    /// [[row]]
    /// mask = 0
    /// g = 0.2
    /// ```
    ///
    /// Every one of the `2^n` masks must appear exactly once.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: TableFile =
            toml::from_str(text).map_err(|e| Error::InvalidEnvironment(e.to_string()))?;
        GroundSet::new(file.n)?;
        if file.n > super::ENUMERATION_LIMIT {
            return Err(Error::EnumerationGuard {
                n: file.n,
                limit: super::ENUMERATION_LIMIT,
            });
        }
        let mut values = vec![None; 1 << file.n];
        for row in &file.rows {
            let slot = values.get_mut(row.mask as usize).ok_or_else(|| {
                Error::InvalidEnvironment(format!(
                    "mask {} out of range for n={}",
                    row.mask, file.n
                ))
            })?;
            if slot.replace(row.g).is_some() {
                return Err(Error::InvalidEnvironment(format!(
                    "duplicate row for mask {}",
                    row.mask
                )));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(mask, g)| {
                g.ok_or_else(|| Error::InvalidEnvironment(format!("missing row for mask {mask}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, NoiseSpec::new(file.mu, file.sigma)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        let file = TableFile {
            n: self.ground.len(),
            sigma: self.noise.sigma,
            mu: self.noise.mu,
            rows: self
                .values
                .iter()
                .enumerate()
                .map(|(mask, &g)| TableRow {
                    mask: mask as u64,
                    g,
                })
                .collect(),
        };
        toml::to_string(&file).expect("table serializes")
    }

    pub fn table(&self) -> &[f64] {
        &self.values
    }

    pub fn noise(&self) -> NoiseSpec {
        self.noise
    }

    pub fn g(&self, s: ArmSet) -> f64 {
        self.values[s.mask() as usize]
    }
}

impl Environment for TabularEnv {
    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn sample(&self, s: ArmSet, rng: &mut dyn RngCore) -> f64 {
        clamp01(self.g(s) + draw(&self.noise.normal(), rng))
    }

    fn expected_value(&self, s: ArmSet) -> Expectation {
        Expectation::exact(self.g(s) + self.noise.mu)
    }
}
