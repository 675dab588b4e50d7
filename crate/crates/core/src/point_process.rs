//! 1-D Poisson point processes on a finite road, the shadowing displacement
//! transform, and nearest-`m` association for the typical vehicle at the
//! origin.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::channel::sample_shadowing_linear;
use crate::{Error, Result};

/// One sampled realization of the station process, seen from the typical
/// vehicle at the origin.
///
/// Stations are stored sorted by transformed distance
/// `y = chi^(-1/alpha) * |x|`, so row `i` of a CSV export corresponds to the
/// `(i+1)`-th candidate in max-received-power order.
#[derive(Debug, Clone)]
pub struct Deployment {
    /// Signed positions along the road (km), relative to the origin.
    pub positions: Vec<f64>,
    /// Per-station linear shadowing gains.
    pub shadow_marks: Vec<f64>,
    /// Transformed distances (km), ascending.
    pub transformed_distances: Vec<f64>,
}

impl Deployment {
    /// Draws a deployment: Poisson station count on `[-L/2, L/2]`, one
    /// shadowing mark per station, displacement applied and stations sorted
    /// by transformed distance.
    pub fn sample<R: Rng + ?Sized>(
        lambda: f64,
        length_km: f64,
        omega_db: f64,
        delta_db: f64,
        alpha: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let positions = sample_ppp_1d(lambda, length_km, rng)?;
        let mut stations: Vec<(f64, f64, f64)> = positions
            .into_iter()
            .map(|x| {
                let chi = sample_shadowing_linear(omega_db, delta_db, rng)?;
                Ok((x, chi, chi.powf(-1.0 / alpha) * x.abs()))
            })
            .collect::<Result<_>>()?;
        stations.sort_by(|a, b| a.2.partial_cmp(&b.2).expect("finite distances"));

        Ok(Deployment {
            positions: stations.iter().map(|s| s.0).collect(),
            shadow_marks: stations.iter().map(|s| s.1).collect(),
            transformed_distances: stations.iter().map(|s| s.2).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.transformed_distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transformed_distances.is_empty()
    }

    /// Serializes the deployment as CSV rows `position_km,shadow_linear,
    /// transformed_km`, one station per line in ascending transformed order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("position_km,shadow_linear,transformed_km\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{:.9e},{:.9e},{:.9e}\n",
                self.positions[i], self.shadow_marks[i], self.transformed_distances[i]
            ));
        }
        out
    }
}

/// The `m` collaborating stations plus the interferer set they leave behind.
#[derive(Debug, Clone, PartialEq)]
pub struct ServingSet {
    /// The `m` smallest transformed distances, ascending (km).
    pub serving_distances: Vec<f64>,
    /// Largest serving distance `x_m` (km); interferers all lie beyond it.
    pub boundary: f64,
    /// Transformed distances of every non-serving station (km).
    pub interferer_distances: Vec<f64>,
}

/// Samples a 1-D homogeneous PPP on `[-length/2, length/2]`.
///
/// The point count is `Poisson(lambda * length)` and positions are i.i.d.
/// uniform; the result is sorted by distance from the origin. A point landing
/// exactly at the origin (probability zero, but representable) is redrawn
/// rather than clamped, so path-loss gains stay finite without distorting the
/// distribution.
pub fn sample_ppp_1d<R: Rng + ?Sized>(
    lambda: f64,
    length_km: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda", lambda, "must be > 0"));
    }
    if !(length_km > 0.0) || !length_km.is_finite() {
        return Err(Error::invalid("length_km", length_km, "must be > 0"));
    }
    let poisson = Poisson::new(lambda * length_km)
        .map_err(|_| Error::invalid("lambda*length", lambda * length_km, "not a valid mean"))?;
    let count = poisson.sample(rng) as usize;
    let half = length_km / 2.0;
    let mut points: Vec<f64> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut x = rng.gen_range(-half..half);
        while x == 0.0 {
            x = rng.gen_range(-half..half);
        }
        points.push(x);
    }
    points.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite positions"));
    Ok(points)
}

/// Intensity of the displaced process: `E[chi^(-1/alpha)] * lambda` for
/// log-normal shadowing with dB mean `omega_db` and dB standard deviation
/// `delta_db`.
///
/// With `chi = 10^(N/10)`, `N ~ Normal(omega, delta^2)`, the moment is
/// `exp(-omega*ln10/(10*alpha) + ((delta*ln10/(10*alpha))^2)/2)`: the mean
/// enters with a negative sign because the exponent `-1/alpha` is negative.
pub fn transformed_intensity(
    lambda: f64,
    omega_db: f64,
    delta_db: f64,
    alpha: f64,
) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda", lambda, "must be > 0"));
    }
    if !(alpha > 2.0) {
        return Err(Error::invalid("alpha", alpha, "must be > 2"));
    }
    if !omega_db.is_finite() {
        return Err(Error::invalid("omega_db", omega_db, "must be finite"));
    }
    if !(delta_db >= 0.0) || !delta_db.is_finite() {
        return Err(Error::invalid("delta_db", delta_db, "must be >= 0"));
    }
    let ln10 = std::f64::consts::LN_10;
    let scale = ln10 / (10.0 * alpha);
    Ok((-omega_db * scale + 0.5 * (delta_db * scale).powi(2)).exp() * lambda)
}

/// Applies the displacement `y_i = chi_i^(-1/alpha) * |x_i|` and returns the
/// transformed distances sorted ascending.
pub fn apply_displacement(positions: &[f64], marks: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if positions.len() != marks.len() {
        return Err(Error::invalid(
            "marks",
            marks.len() as f64,
            "must have one mark per position",
        ));
    }
    if !(alpha > 2.0) {
        return Err(Error::invalid("alpha", alpha, "must be > 2"));
    }
    let mut out = Vec::with_capacity(positions.len());
    for (&x, &chi) in positions.iter().zip(marks) {
        if !(chi > 0.0) {
            return Err(Error::invalid("chi", chi, "must be > 0"));
        }
        out.push(chi.powf(-1.0 / alpha) * x.abs());
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    Ok(out)
}

/// Splits sorted transformed distances into the `m` serving stations and the
/// interferers beyond them.
///
/// Ranking by smallest transformed distance is exactly ranking by largest
/// mean received power `P * chi * |x|^-alpha`, so this realizes
/// max-received-power association.
pub fn select_serving_set(transformed_distances: &[f64], m: usize) -> Result<ServingSet> {
    if m < 1 {
        return Err(Error::invalid("m", m as f64, "must be >= 1"));
    }
    if transformed_distances.len() < m {
        return Err(Error::InsufficientDeployment {
            available: transformed_distances.len(),
            needed: m,
        });
    }
    debug_assert!(
        transformed_distances.windows(2).all(|w| w[0] <= w[1]),
        "input must be sorted ascending"
    );
    let serving = transformed_distances[..m].to_vec();
    let interferers = transformed_distances[m..].to_vec();
    Ok(ServingSet {
        boundary: serving[m - 1],
        serving_distances: serving,
        interferer_distances: interferers,
    })
}
