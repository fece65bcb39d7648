use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use super::{clamp01, draw, monte_carlo_mean, Environment, Expectation, DEFAULT_MC_SAMPLES};
use crate::arms::{ArmSet, GroundSet};
use crate::error::{Error, Result};

/// Linear per-arm reward minus a cardinality cost.
///
/// For `S` other than the special set, the reward is
/// `min(max(sum_{a in S} r(a) - |S|/k*, 0), 1)` with per-arm draws
/// `r(a) = min(max(N(mu_a, sigma), 0), 1)`. The special set always pays 1.
#[derive(Clone, Debug)]
pub struct LinearMinusCostEnv {
    ground: GroundSet,
    arm_means: Vec<f64>,
    arm_noise: Vec<Normal<f64>>,
    sigma: f64,
    k_star: u32,
    special_set: ArmSet,
    mc_samples: u64,
}

impl LinearMinusCostEnv {
    pub fn new(arm_means: Vec<f64>, sigma: f64, k_star: u32, special_set: ArmSet) -> Result<Self> {
        let ground = GroundSet::new(arm_means.len())?;
        ground.check(special_set)?;
        if let Some(mu) = arm_means.iter().find(|mu| !(0.0..=1.0).contains(*mu)) {
            return Err(Error::InvalidEnvironment(format!(
                "arm mean {mu} outside [0,1]"
            )));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidEnvironment(format!(
                "sigma must be >= 0, got {sigma}"
            )));
        }
        if k_star == 0 {
            return Err(Error::InvalidEnvironment("k* must be positive".into()));
        }
        let arm_noise = arm_means
            .iter()
            .map(|&mu| Normal::new(mu, sigma).expect("validated"))
            .collect();
        Ok(Self {
            ground,
            arm_means,
            arm_noise,
            sigma,
            k_star,
            special_set,
            mc_samples: DEFAULT_MC_SAMPLES,
        })
    }

    /// Eight arms with means 0, 0.05, ..., 0.35, sigma 0.02, k* = 6 and the
    /// special set `{5,6,7,8}`.
    pub fn standard() -> Self {
        let means = (0..8).map(|i| i as f64 * 0.05).collect();
        let special = ArmSet::from_mask(0b1111_0000);
        Self::new(means, 0.02, 6, special).expect("standard parameters are valid")
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        let means = std::mem::take(&mut self.arm_means);
        Ok(
            Self::new(means, sigma, self.k_star, self.special_set)?
                .with_mc_samples(self.mc_samples),
        )
    }

    /// Sample count for Monte-Carlo expectations of noisy sets.
    pub fn with_mc_samples(mut self, samples: u64) -> Self {
        self.mc_samples = samples.max(2);
        self
    }

    pub fn arm_means(&self) -> &[f64] {
        &self.arm_means
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn k_star(&self) -> u32 {
        self.k_star
    }

    pub fn special_set(&self) -> ArmSet {
        self.special_set
    }

    fn cost(&self, s: ArmSet) -> f64 {
        s.len() as f64 / self.k_star as f64
    }

    /// The reward with every arm at its mean: exact when sigma is zero.
    pub fn noiseless_value(&self, s: ArmSet) -> f64 {
        if s == self.special_set {
            return 1.0;
        }
        let sum: f64 = s.iter().map(|a| clamp01(self.arm_means[a])).sum();
        clamp01(sum - self.cost(s))
    }
}

impl Environment for LinearMinusCostEnv {
    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn sample(&self, s: ArmSet, rng: &mut dyn RngCore) -> f64 {
        if s == self.special_set {
            return 1.0;
        }
        let sum: f64 = s
            .iter()
            .map(|a| clamp01(draw(&self.arm_noise[a], rng)))
            .sum();
        clamp01(sum - self.cost(s))
    }

    fn expected_value(&self, s: ArmSet) -> Expectation {
        if s == self.special_set || s.is_empty() || self.sigma == 0.0 {
            return Expectation::exact(self.noiseless_value(s));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(s.mask() ^ 0x6c69_6e65_6172_0000);
        monte_carlo_mean(self, s, self.mc_samples, &mut rng)
    }
}
