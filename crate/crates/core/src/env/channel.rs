//! Random draws for fading, energy arrivals and primary-user occupancy, plus
//! the achievable-rate formulas.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};

use super::EnvConfig;
use crate::error::{config_err, Result};

/// Draws a Rayleigh-fading channel power gain for a link of length `distance`.
///
/// The gain is exponential with mean `distance^-alpha`. Zero draws are lifted
/// to the smallest positive double so gains stay strictly positive.
pub fn sample_gain<R: Rng + ?Sized>(rng: &mut R, distance: f64, alpha: f64) -> Result<f64> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(config_err(format!("link distance must be positive, got {distance}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(config_err(format!("path-loss exponent must be positive, got {alpha}")));
    }
    // Exp is parameterized by its rate, the reciprocal of the mean.
    let exp = Exp::new(distance.powf(alpha)).map_err(|e| config_err(e.to_string()))?;
    Ok(exp.sample(rng).max(f64::MIN_POSITIVE))
}

/// Draws the energy harvested in one slot: `mu * e` with `e ~ Gamma(k, beta)`.
pub fn sample_energy<R: Rng + ?Sized>(rng: &mut R, config: &EnvConfig) -> Result<f64> {
    let gamma = Gamma::new(config.gamma_shape, config.gamma_scale)
        .map_err(|e| config_err(e.to_string()))?;
    Ok(config.conversion_mu * gamma.sample(rng))
}

/// Occupancy vector of length `num_slots` with exactly `pu_slots` busy slots,
/// placed uniformly at random.
pub fn sample_pu_schedule<R: Rng + ?Sized>(
    rng: &mut R,
    num_slots: usize,
    pu_slots: usize,
) -> Result<Vec<bool>> {
    if pu_slots > num_slots {
        return Err(config_err(format!(
            "cannot occupy {pu_slots} of {num_slots} slots"
        )));
    }
    let mut schedule = vec![false; num_slots];
    for i in index::sample(rng, num_slots, pu_slots) {
        schedule[i] = true;
    }
    Ok(schedule)
}

/// Achievable rate in bits/s/Hz of the secondary link.
///
/// With the primary user idle this is `log2(1 + P g_ss / noise)`; with it
/// active its transmission adds `P_p g_ps` to the noise floor.
pub fn rate(
    power: f64,
    gain_ss: f64,
    pu_active: bool,
    pu_power: f64,
    gain_ps: f64,
    noise_variance: f64,
) -> f64 {
    let floor = if pu_active {
        pu_power * gain_ps + noise_variance
    } else {
        noise_variance
    };
    (power * gain_ss / floor).ln_1p() / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rate_examples() {
        assert_eq!(rate(0.0, 1.0, false, 0.2, 0.5, 1e-3), 0.0);
        let idle = rate(0.1, 1.0, false, 0.2, 0.5, 1e-3);
        assert!((idle - 101f64.log2()).abs() < 1e-12);
        assert!((idle - 6.6582).abs() < 1e-4);
        let busy = rate(0.1, 1.0, true, 0.2, 0.5, 1e-3);
        assert!((busy - (1.0 + 0.1 / 0.101f64).log2()).abs() < 1e-12);
        assert!((busy - 0.9929).abs() < 1e-4);
    }

    #[test]
    fn gain_rejects_bad_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_gain(&mut rng, 0.0, 4.0).is_err());
        assert!(sample_gain(&mut rng, -1.0, 4.0).is_err());
        assert!(sample_gain(&mut rng, 1.0, 0.0).is_err());
    }

    #[test]
    fn gain_is_deterministic_per_seed() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| sample_gain(&mut rng, 1.8, 4.0).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));
    }

    #[test]
    fn gain_mean_at_unit_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_gain(&mut rng, 1.0, 3.0).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn energy_is_zero_without_conversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = EnvConfig { conversion_mu: 0.0, ..EnvConfig::default() };
        assert!((0..1000).all(|_| sample_energy(&mut rng, &cfg).unwrap() == 0.0));
    }

    #[test]
    fn energy_variance_matches_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = EnvConfig { conversion_mu: 1.0, ..EnvConfig::default() };
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_energy(&mut rng, &cfg).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 0.5).abs() / 0.5 < 0.02, "variance {var}");
    }

    #[test]
    fn schedule_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_pu_schedule(&mut rng, 30, 0).unwrap().iter().all(|b| !b));
        assert!(sample_pu_schedule(&mut rng, 30, 30).unwrap().iter().all(|b| *b));
        for _ in 0..200 {
            let s = sample_pu_schedule(&mut rng, 30, 18).unwrap();
            assert_eq!(s.len(), 30);
            assert_eq!(s.iter().filter(|b| **b).count(), 18);
        }
        assert!(sample_pu_schedule(&mut rng, 30, 31).is_err());
    }
}
