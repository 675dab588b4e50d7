//! Channel primitives: power-law path loss, Rayleigh fast fading, log-normal
//! shadowing, received power and SINR arithmetic.
//!
//! Everything here is a pure function of its arguments plus an explicitly
//! passed random stream, so callers may fan out across threads as long as
//! each thread owns its stream.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::units::PATHLOSS_REF_PER_KM;
use crate::{Error, Result};

/// Power-law path-loss gain `|x|^-alpha`.
///
/// `x` is measured in reference units (see [`PATHLOSS_REF_PER_KM`]); the sign
/// of `x` is ignored because the road is symmetric around the receiver.
pub fn pathloss_gain(x: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::invalid("alpha", alpha, "must be > 2"));
    }
    if !x.is_finite() {
        return Err(Error::invalid("x", x, "must be finite"));
    }
    if x == 0.0 {
        return Err(Error::ZeroDistance);
    }
    Ok(x.abs().powf(-alpha))
}

/// Path-loss gain for a distance given in kilometres.
pub fn pathloss_gain_km(x_km: f64, alpha: f64) -> Result<f64> {
    pathloss_gain(x_km * PATHLOSS_REF_PER_KM, alpha)
}

/// Draws one Rayleigh-fading power gain: exponential with rate `mu`
/// (mean `1/mu`).
pub fn sample_rayleigh_power<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::invalid("mu", mu, "must be finite and > 0"));
    }
    let exp = Exp::new(mu).expect("mu validated above");
    Ok(exp.sample(rng))
}

/// Draws one log-normal shadowing gain in linear units: `10^(N/10)` with
/// `N ~ Normal(omega_db, delta_db^2)`. A zero standard deviation degenerates
/// to the constant `10^(omega_db/10)`.
pub fn sample_shadowing_linear<R: Rng + ?Sized>(
    omega_db: f64,
    delta_db: f64,
    rng: &mut R,
) -> Result<f64> {
    if !omega_db.is_finite() {
        return Err(Error::invalid("omega_db", omega_db, "must be finite"));
    }
    if !(delta_db >= 0.0) || !delta_db.is_finite() {
        return Err(Error::invalid("delta_db", delta_db, "must be finite and >= 0"));
    }
    let normal = Normal::new(omega_db, delta_db).expect("parameters validated above");
    let db = normal.sample(rng);
    Ok(10f64.powf(db / 10.0))
}

/// Received power `p_d * g * chi * |x|^-alpha` with `x` in reference units.
pub fn received_power(p_d: f64, g: f64, chi: f64, x: f64, alpha: f64) -> Result<f64> {
    if !(p_d > 0.0) {
        return Err(Error::invalid("p_d", p_d, "must be > 0"));
    }
    if !(g >= 0.0) {
        return Err(Error::invalid("g", g, "must be >= 0"));
    }
    if !(chi > 0.0) {
        return Err(Error::invalid("chi", chi, "must be > 0"));
    }
    Ok(p_d * g * chi * pathloss_gain(x, alpha)?)
}

/// SINR `serving_sum / (interference + noise)`.
pub fn sinr(serving_sum: f64, interference: f64, noise: f64) -> Result<f64> {
    if !(serving_sum >= 0.0) {
        return Err(Error::invalid("serving_sum", serving_sum, "must be >= 0"));
    }
    if !(interference >= 0.0) {
        return Err(Error::invalid("interference", interference, "must be >= 0"));
    }
    if interference + noise <= 0.0 {
        return Err(Error::DivisionGuard {
            interference,
            noise,
        });
    }
    Ok(serving_sum / (interference + noise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pathloss_hand_values() {
        assert_relative_eq!(pathloss_gain(1.0, 4.0).unwrap(), 1.0);
        assert_relative_eq!(pathloss_gain(2.0, 4.0).unwrap(), 0.0625);
        assert_relative_eq!(pathloss_gain(10.0, 2.5).unwrap(), 10f64.powf(-2.5));
        // negative distances fold onto the positive axis
        assert_relative_eq!(
            pathloss_gain(-2.0, 4.0).unwrap(),
            pathloss_gain(2.0, 4.0).unwrap()
        );
    }

    #[test]
    fn pathloss_rejects_origin_and_bad_exponent() {
        assert!(matches!(pathloss_gain(0.0, 4.0), Err(Error::ZeroDistance)));
        assert!(pathloss_gain(1.0, 2.0).is_err());
        assert!(pathloss_gain(1.0, 1.5).is_err());
    }

    #[test]
    fn rayleigh_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let g = sample_rayleigh_power(1.0, &mut rng).unwrap();
            assert!(g >= 0.0);
            sum += g;
            sum_sq += g * g;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn rayleigh_ks_against_exponential_cdf() {
        let mu = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000usize;
        let mut samples: Vec<f64> = (0..n)
            .map(|_| sample_rayleigh_power(mu, &mut rng).unwrap())
            .collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = crate::stats::ks_statistic(&samples, |x| 1.0 - (-mu * x).exp());
        let crit = crate::stats::ks_critical_value(n, 0.01);
        assert!(d < crit, "KS statistic {d} exceeds 1% critical value {crit}");
    }

    #[test]
    fn rayleigh_rejects_nonpositive_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_rayleigh_power(0.0, &mut rng).is_err());
        assert!(sample_rayleigh_power(-1.0, &mut rng).is_err());
    }

    #[test]
    fn shadowing_degenerate_is_exactly_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_shadowing_linear(0.0, 0.0, &mut rng).unwrap(), 1.0);
        }
    }

    #[test]
    fn shadowing_db_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000usize;
        let mut sum_db = 0.0;
        for _ in 0..n {
            let chi = sample_shadowing_linear(0.0, 2.0, &mut rng).unwrap();
            assert!(chi > 0.0);
            sum_db += 10.0 * chi.log10();
        }
        let mean_db = sum_db / n as f64;
        assert!(mean_db.abs() < 0.01, "dB mean {mean_db}");
    }

    #[test]
    fn shadowing_rejects_negative_std() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_shadowing_linear(0.0, -0.1, &mut rng).is_err());
    }

    #[test]
    fn received_power_hand_values() {
        assert_relative_eq!(received_power(1.0, 1.0, 1.0, 1.0, 4.0).unwrap(), 1.0);
        assert_relative_eq!(received_power(0.2, 2.0, 1.0, 2.0, 4.0).unwrap(), 0.025);
    }

    #[test]
    fn received_power_composes_pathloss() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = rng.gen_range(0.01..10.0);
            let g = rng.gen_range(0.0..5.0);
            let chi = rng.gen_range(0.1..10.0);
            let x = rng.gen_range(0.01..100.0);
            let alpha = rng.gen_range(2.1..6.0);
            assert_relative_eq!(
                received_power(p, g, chi, x, alpha).unwrap(),
                p * g * chi * pathloss_gain(x, alpha).unwrap(),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn sinr_hand_values() {
        assert_relative_eq!(sinr(1.0, 0.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(sinr(3.0, 1.0, 1.0).unwrap(), 1.5);
        assert_relative_eq!(sinr(0.0, 5.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sinr_division_guard() {
        assert!(matches!(
            sinr(1.0, 0.0, 0.0),
            Err(Error::DivisionGuard { .. })
        ));
        assert!(sinr(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<f64> = (0..32)
                .map(|_| sample_rayleigh_power(1.3, &mut rng).unwrap())
                .collect();
            let b: Vec<f64> = (0..32)
                .map(|_| sample_shadowing_linear(0.0, 2.0, &mut rng).unwrap())
                .collect();
            (a, b)
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }
}
