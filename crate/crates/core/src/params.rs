//! Network and deployment parameters.

use crate::units::dbm_to_watts;
use crate::{Error, Result};

/// Physical and deployment constants for one scenario.
///
/// Densities are per kilometre of road, powers are in dBm and shadowing
/// moments in dB; conversions to linear units happen where powers are formed.
/// `lambda_v` is scenario metadata only: vehicles other than the typical one
/// at the origin do not influence the downlink SINR.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// Base-station density (stations per km).
    pub lambda_d: f64,
    /// Vehicle density (vehicles per km); metadata only.
    pub lambda_v: f64,
    /// Base-station transmit power (dBm).
    pub p_d_dbm: f64,
    /// Downlink path-loss exponent; must exceed 2 for the interference
    /// integral to converge.
    pub alpha_d: f64,
    /// Rayleigh fading rate; the power gain is exponential with mean `1/mu`.
    /// Not part of the reference parameter table; defaults to unit-mean
    /// fading.
    pub mu: f64,
    /// Mean of the shadowing gain in dB.
    pub shadow_mean_db: f64,
    /// Standard deviation of the shadowing gain in dB.
    pub shadow_std_db: f64,
    /// Noise power (dBm).
    pub noise_dbm: f64,
    /// Simulated road length (km); the typical vehicle sits at the centre.
    pub road_length_km: f64,
    /// Connectivity order: number of nearest stations serving jointly.
    pub m: usize,
}

impl Default for NetworkParams {
    /// The reference system parameters (Table-I values), with `mu = 1` and
    /// dual connectivity.
    fn default() -> Self {
        NetworkParams {
            lambda_d: 5.0,
            lambda_v: 20.0,
            p_d_dbm: 23.0,
            alpha_d: 4.0,
            mu: 1.0,
            shadow_mean_db: 0.0,
            shadow_std_db: 2.0,
            noise_dbm: -96.0,
            road_length_km: 300.0,
            m: 2,
        }
    }
}

impl NetworkParams {
    /// Single-connectivity baseline: 10 stations/km, `m = 1`, everything else
    /// at the reference values.
    pub fn single_connectivity_baseline() -> Self {
        NetworkParams {
            lambda_d: 10.0,
            m: 1,
            ..NetworkParams::default()
        }
    }

    /// Checks every physical invariant, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_d > 0.0) || !self.lambda_d.is_finite() {
            return Err(Error::invalid("lambda_d", self.lambda_d, "must be > 0"));
        }
        if !(self.lambda_v >= 0.0) || !self.lambda_v.is_finite() {
            return Err(Error::invalid("lambda_v", self.lambda_v, "must be >= 0"));
        }
        if !self.p_d_dbm.is_finite() {
            return Err(Error::invalid("p_d_dbm", self.p_d_dbm, "must be finite"));
        }
        if !(self.alpha_d > 2.0) || !self.alpha_d.is_finite() {
            return Err(Error::invalid("alpha_d", self.alpha_d, "must be > 2"));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::invalid("mu", self.mu, "must be > 0"));
        }
        if !self.shadow_mean_db.is_finite() {
            return Err(Error::invalid(
                "shadow_mean_db",
                self.shadow_mean_db,
                "must be finite",
            ));
        }
        if !(self.shadow_std_db >= 0.0) || !self.shadow_std_db.is_finite() {
            return Err(Error::invalid(
                "shadow_std_db",
                self.shadow_std_db,
                "must be >= 0",
            ));
        }
        if !self.noise_dbm.is_finite() {
            return Err(Error::invalid("noise_dbm", self.noise_dbm, "must be finite"));
        }
        if !(self.road_length_km > 0.0) || !self.road_length_km.is_finite() {
            return Err(Error::invalid(
                "road_length_km",
                self.road_length_km,
                "must be > 0",
            ));
        }
        if self.m < 1 {
            return Err(Error::invalid("m", self.m as f64, "must be >= 1"));
        }
        Ok(())
    }

    /// Transmit power in watts.
    pub fn p_d_watts(&self) -> f64 {
        dbm_to_watts(self.p_d_dbm).expect("validated dBm value")
    }

    /// Noise power in watts.
    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm).expect("validated dBm value")
    }

    /// True when the finite road window approximates the infinite line well
    /// enough that truncation bias stays below Monte Carlo noise: the
    /// probability of an empty half-window, `exp(-lambda_d * L)`, must be
    /// below 1e-6.
    pub fn road_covers_tail(&self) -> bool {
        (-self.lambda_d * self.road_length_km).exp() < 1e-6
    }
}
