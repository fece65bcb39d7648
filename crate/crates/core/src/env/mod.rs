//! Stochastic set-function environments.
//!
//! An [`Environment`] draws a reward in `[0,1]` for a played arm set and
//! reports the expected value of that set, either exactly or as a Monte-Carlo
//! estimate (see [`Provenance`]). Sampling never owns randomness: callers pass
//! the stream, so concurrent runs each keep a private one.

use std::fmt;

use rand::RngCore;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::arms::{ArmSet, GroundSet};
use crate::error::{Error, Result};

mod checks;
mod linear;
mod network;
mod normalize;
mod tabular;

pub use checks::{
    check_monotone, check_submodular_in_expectation, MonotoneViolation, SubmodularViolation,
};
pub use linear::LinearMinusCostEnv;
pub use network::{load_network, NetworkRevenueEnv};
pub use normalize::{normalize, Normalization, Normalized};
pub use tabular::TabularEnv;

/// Default Monte-Carlo sample count for expectations without a closed form.
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

/// Tolerance for the structural checkers on exact tables.
pub const CHECK_TOLERANCE: f64 = 1e-12;

/// Largest ground set the exhaustive checkers and oracle will enumerate.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    MonteCarlo { samples: u64, std_err: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub value: f64,
    pub provenance: Provenance,
}

impl Expectation {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Exact,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.provenance == Provenance::Exact
    }
}

pub trait Environment: Send + Sync + fmt::Debug {
    fn ground(&self) -> &GroundSet;

    /// One conditionally independent reward draw for `s`, in `[0,1]`.
    fn sample(&self, s: ArmSet, rng: &mut dyn RngCore) -> f64;

    fn expected_value(&self, s: ArmSet) -> Expectation;

    /// Maximizers of the expected value found from the environment's
    /// structure, for ground sets too large to enumerate. `None` when the
    /// environment has no such shortcut.
    fn structural_maximizers(&self) -> Option<Vec<ArmSet>> {
        None
    }
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn ground(&self) -> &GroundSet {
        (**self).ground()
    }

    fn sample(&self, s: ArmSet, rng: &mut dyn RngCore) -> f64 {
        (**self).sample(s, rng)
    }

    fn expected_value(&self, s: ArmSet) -> Expectation {
        (**self).expected_value(s)
    }

    fn structural_maximizers(&self) -> Option<Vec<ArmSet>> {
        (**self).structural_maximizers()
    }
}

impl<E: Environment + ?Sized> Environment for std::sync::Arc<E> {
    fn ground(&self) -> &GroundSet {
        (**self).ground()
    }

    fn sample(&self, s: ArmSet, rng: &mut dyn RngCore) -> f64 {
        (**self).sample(s, rng)
    }

    fn expected_value(&self, s: ArmSet) -> Expectation {
        (**self).expected_value(s)
    }

    fn structural_maximizers(&self) -> Option<Vec<ArmSet>> {
        (**self).structural_maximizers()
    }
}

/// Additive Gaussian noise `N(mu, sigma)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(default)]
    pub mu: f64,
    pub sigma: f64,
}

impl NoiseSpec {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidEnvironment(format!(
                "noise needs finite mu and sigma >= 0, got mu={mu} sigma={sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(0.0, sigma)
    }

    pub(crate) fn normal(&self) -> Normal<f64> {
        Normal::new(self.mu, self.sigma).expect("validated noise parameters")
    }
}

pub(crate) fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// The exact expected value of `s`, or [`Error::ApproximateOnly`].
pub fn exact_value<E: Environment + ?Sized>(env: &E, s: ArmSet) -> Result<f64> {
    let e = env.expected_value(s);
    if e.is_exact() {
        Ok(e.value)
    } else {
        Err(Error::ApproximateOnly)
    }
}

/// Exact expected values of every subset, indexed by bitmask.
pub fn exact_table<E: Environment + ?Sized>(env: &E) -> Result<Vec<f64>> {
    let n = env.ground().len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationGuard {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    env.ground()
        .subsets()
        .map(|s| exact_value(env, s))
        .collect()
}

/// Monte-Carlo mean and standard error of the sampled reward of `s`.
pub fn monte_carlo_mean<E: Environment + ?Sized>(
    env: &E,
    s: ArmSet,
    samples: u64,
    rng: &mut dyn RngCore,
) -> Expectation {
    let samples = samples.max(2);
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=samples {
        let x = env.sample(s, rng);
        let d = x - mean;
        mean += d / k as f64;
        m2 += d * (x - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Expectation {
        value: mean,
        provenance: Provenance::MonteCarlo {
            samples,
            std_err: (var / samples as f64).sqrt(),
        },
    }
}

pub(crate) fn draw<D: Distribution<f64>>(dist: &D, rng: &mut dyn RngCore) -> f64 {
    dist.sample(rng)
}
