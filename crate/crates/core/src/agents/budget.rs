use crate::error::{Error, Result};

fn check_horizon(horizon: u64) -> Result<f64> {
    if horizon < 2 {
        return Err(Error::HorizonTooShort {
            got: horizon,
            min: 2,
        });
    }
    Ok((horizon as f64).ln())
}

/// Per-set sample count for RGL: `ceil((T * sqrt(25/32 * ln T))^(2/3))`.
pub fn compute_sample_budget(horizon: u64) -> Result<u64> {
    let ln_t = check_horizon(horizon)?;
    let x = (horizon as f64 * (25.0 / 32.0 * ln_t).sqrt()).powf(2.0 / 3.0);
    Ok((x.ceil() as u64).max(1))
}

/// Confidence radius `sqrt(2 ln T / m)`.
pub fn confidence_radius(horizon: u64, m: u64) -> f64 {
    (2.0 * (horizon as f64).ln() / m as f64).sqrt()
}

/// Per-candidate sample count for R-ETCG with cardinality budget `k`:
/// `ceil((T sqrt(2 ln T) / (n + 2 n k sqrt(2 ln T)))^(2/3))`.
pub fn etcg_budget(horizon: u64, n: usize, k: usize) -> Result<u64> {
    let ln_t = check_horizon(horizon)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let s = (2.0 * ln_t).sqrt();
    let n = n as f64;
    let x = (horizon as f64 * s / (n + 2.0 * n * k as f64 * s)).powf(2.0 / 3.0);
    Ok((x.ceil() as u64).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from a 50-digit evaluation of the formula.
    const RGL_BUDGETS: [(u64, u64); 7] = [
        (2, 2),
        (10, 6),
        (100, 34),
        (1_000, 176),
        (10_000, 897),
        (100_000, 4481),
        (1_000_000, 22100),
    ];

    /// Independent route: `m` is the least integer with
    /// `32 m^3 >= 25 T^2 ln T`.
    fn least_cube_root(horizon: u64) -> u64 {
        let rhs = 25.0 * (horizon as f64).powi(2) * (horizon as f64).ln();
        let mut m = 1u64;
        while 32.0 * (m as f64).powi(3) < rhs {
            m += 1;
        }
        m
    }

    #[test]
    fn rgl_budget_values() {
        for (t, m) in RGL_BUDGETS {
            assert_eq!(compute_sample_budget(t).unwrap(), m, "T={t}");
            assert_eq!(least_cube_root(t), m, "T={t}");
        }
    }

    #[test]
    fn rgl_budget_monotone() {
        let ms: Vec<u64> = (1..=6)
            .map(|e| compute_sample_budget(10u64.pow(e)).unwrap())
            .collect();
        assert!(ms.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_short_horizons() {
        assert!(compute_sample_budget(0).is_err());
        assert!(compute_sample_budget(1).is_err());
        assert!(etcg_budget(1, 8, 2).is_err());
    }

    #[test]
    fn radius() {
        let r = confidence_radius(1_000_000, 22100);
        assert!((r - 0.035_359_191_855_648_37).abs() < 1e-15);
    }

    #[test]
    fn etcg_values() {
        // 50-digit evaluation for T = 10^4, n = 8, k = 0..=8
        let frozen = [307, 68, 45, 35, 29, 25, 22, 20, 19];
        for (k, m) in frozen.into_iter().enumerate() {
            assert_eq!(etcg_budget(10_000, 8, k).unwrap(), m, "k={k}");
        }
        assert!(frozen.windows(2).all(|w| w[0] >= w[1]));
    }
}
