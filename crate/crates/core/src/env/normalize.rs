use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{clamp01, Environment, Expectation, Provenance};
use crate::arms::{ArmSet, GroundSet};
use crate::error::{Error, Result};

/// Affine map `x -> (x - f_min) / (f_max - f_min)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub f_min: f64,
    pub f_max: f64,
}

impl Normalization {
    pub fn new(f_min: f64, f_max: f64) -> Result<Self> {
        if !f_min.is_finite() || !f_max.is_finite() || f_max <= f_min {
            return Err(Error::InvalidArgument(format!(
                "normalization needs f_max > f_min, got ({f_min}, {f_max})"
            )));
        }
        Ok(Self { f_min, f_max })
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.f_min) / (self.f_max - self.f_min)
    }

    pub fn scale(&self) -> f64 {
        1.0 / (self.f_max - self.f_min)
    }
}

/// An environment rescaled by a [`Normalization`]. Samples are clamped back
/// into `[0,1]`; expectations are mapped without clamping, which keeps their
/// ordering and so the maximizers.
#[derive(Clone, Debug)]
pub struct Normalized<E> {
    inner: E,
    norm: Normalization,
}

pub fn normalize<E: Environment>(env: E, f_min: f64, f_max: f64) -> Result<Normalized<E>> {
    Ok(Normalized {
        inner: env,
        norm: Normalization::new(f_min, f_max)?,
    })
}

impl<E> Normalized<E> {
    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }
}

impl<E: Environment> Environment for Normalized<E> {
    fn ground(&self) -> &GroundSet {
        self.inner.ground()
    }

    fn sample(&self, s: ArmSet, rng: &mut dyn RngCore) -> f64 {
        clamp01(self.norm.apply(self.inner.sample(s, rng)))
    }

    fn expected_value(&self, s: ArmSet) -> Expectation {
        let e = self.inner.expected_value(s);
        let provenance = match e.provenance {
            Provenance::MonteCarlo { samples, std_err } => Provenance::MonteCarlo {
                samples,
                std_err: std_err * self.norm.scale(),
            },
            p => p,
        };
        Expectation {
            value: self.norm.apply(e.value),
            provenance,
        }
    }

    fn structural_maximizers(&self) -> Option<Vec<ArmSet>> {
        self.inner.structural_maximizers()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{NoiseSpec, TabularEnv};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn midpoint() {
        let n = Normalization::new(0.0, 2.0).unwrap();
        assert_eq!(n.apply(1.0), 0.5);
    }

    #[test]
    fn identity_bounds() {
        let env = TabularEnv::submodular_example(0.1).unwrap();
        let wrapped = normalize(env.clone(), 0.0, 1.0).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        for s in env.ground().subsets() {
            assert_eq!(env.expected_value(s), wrapped.expected_value(s));
            assert_eq!(env.sample(s, &mut a), wrapped.sample(s, &mut b));
        }
    }

    #[test]
    fn rejects_inverted_bounds() {
        let env = TabularEnv::constant(1, 0.5, NoiseSpec::gaussian(0.0).unwrap()).unwrap();
        assert!(normalize(env.clone(), 1.0, 1.0).is_err());
        assert!(normalize(env, 2.0, 1.0).is_err());
    }

    #[test]
    fn samples_stay_clamped() {
        let env = TabularEnv::submodular_example(0.3).unwrap();
        let wrapped = normalize(env, 0.1, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10_000 {
            let r = wrapped.sample(ArmSet::from_mask(2), &mut rng);
            assert!((0.0..=1.0).contains(&r));
        }
    }
}
