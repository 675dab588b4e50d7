//! Closed-form coverage machinery: the joint distance distribution of the
//! serving set, the `n`-th nearest-station density, the Laplace transform of
//! the aggregate interference, and the coverage probability integral.
//!
//! The `m`-fold ordered coverage integral is evaluated by a change of
//! variables to the gaps between consecutive serving distances. The joint
//! density `(2L)^m exp(-2L x_m)` factorizes exactly into independent
//! `Exp(2L)` gaps, which turns the ordered region into a product domain where
//! tensor Gauss-Laguerre quadrature applies directly. Node counts double
//! until the estimate is stable to the requested relative tolerance. Above
//! [`TENSOR_MAX_ORDER`] serving stations the tensor grid is replaced by a
//! randomized Halton rule over the same gap variables.

use rayon::prelude::*;

use crate::params::NetworkParams;
use crate::point_process::transformed_intensity;
use crate::quadrature::{self, gauss_laguerre};
use crate::units::{db_to_linear, PATHLOSS_REF_PER_KM};
use crate::{Error, Result};

/// Largest connectivity order evaluated with tensor quadrature; the node
/// grid grows as `nodes^m`, so larger orders switch to the quasi-Monte Carlo
/// path.
pub const TENSOR_MAX_ORDER: usize = 6;

/// Hard ceiling on tensor kernel evaluations per refinement step.
const TENSOR_EVAL_BUDGET: f64 = 2e8;

/// Replicate count for the randomized-Halton error estimate.
const QMC_REPLICATES: usize = 16;

/// Controls for the nested coverage integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Laguerre nodes per gap dimension at the first refinement level.
    pub gap_nodes: usize,
    /// Base Gauss-Legendre nodes for the semi-infinite interference integral.
    pub inner_nodes: usize,
    /// Target relative tolerance for the outer integral.
    pub rel_tol: f64,
    /// Node-doubling refinements attempted before giving up.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            gap_nodes: 16,
            inner_nodes: 24,
            rel_tol: 1e-6,
            max_refinements: 5,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.gap_nodes < 8 {
            return Err(Error::invalid(
                "gap_nodes",
                self.gap_nodes as f64,
                "must be >= 8",
            ));
        }
        if self.inner_nodes < 16 {
            return Err(Error::invalid(
                "inner_nodes",
                self.inner_nodes as f64,
                "must be >= 16",
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 0.1) {
            return Err(Error::invalid(
                "rel_tol",
                self.rel_tol,
                "must lie in (0, 0.1)",
            ));
        }
        Ok(())
    }
}

/// Inputs of the coverage expression in linear units, with shadowing already
/// absorbed into the transformed intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticModel {
    /// Transformed station intensity (stations per km).
    pub lambda_t: f64,
    /// Transmit power (W).
    pub p_d_watts: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Rayleigh fading rate.
    pub mu: f64,
    /// Noise power (W).
    pub noise_watts: f64,
    /// Connectivity order.
    pub m: usize,
}

impl AnalyticModel {
    /// Builds the model from raw network parameters, applying the shadowing
    /// displacement to the station density.
    pub fn from_params(params: &NetworkParams) -> Result<Self> {
        params.validate()?;
        Ok(AnalyticModel {
            lambda_t: transformed_intensity(
                params.lambda_d,
                params.shadow_mean_db,
                params.shadow_std_db,
                params.alpha_d,
            )?,
            p_d_watts: params.p_d_watts(),
            alpha: params.alpha_d,
            mu: params.mu,
            noise_watts: params.noise_watts(),
            m: params.m,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_t > 0.0) || !self.lambda_t.is_finite() {
            return Err(Error::invalid("lambda_t", self.lambda_t, "must be > 0"));
        }
        if !(self.p_d_watts > 0.0) {
            return Err(Error::invalid("p_d_watts", self.p_d_watts, "must be > 0"));
        }
        if !(self.alpha > 2.0) {
            return Err(Error::invalid("alpha", self.alpha, "must be > 2"));
        }
        if !(self.mu > 0.0) {
            return Err(Error::invalid("mu", self.mu, "must be > 0"));
        }
        if !(self.noise_watts >= 0.0) {
            return Err(Error::invalid(
                "noise_watts",
                self.noise_watts,
                "must be >= 0",
            ));
        }
        if self.m < 1 {
            return Err(Error::invalid("m", self.m as f64, "must be >= 1"));
        }
        Ok(())
    }
}

fn check_ascending(xs: &[f64]) -> Result<()> {
    if xs.is_empty() || xs[0] <= 0.0 || xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotAscending);
    }
    Ok(())
}

/// Joint density of the `n` nearest transformed distances:
/// `(2 lambda)^n exp(-2 lambda x_n)` on the ordered region
/// `0 < x_1 < ... < x_n`.
pub fn joint_distance_pdf(xs: &[f64], lambda_t: f64) -> Result<f64> {
    if !(lambda_t > 0.0) {
        return Err(Error::invalid("lambda_t", lambda_t, "must be > 0"));
    }
    check_ascending(xs)?;
    let n = xs.len() as i32;
    Ok((2.0 * lambda_t).powi(n) * (-2.0 * lambda_t * xs[xs.len() - 1]).exp())
}

/// Density of the `n`-th nearest transformed distance: the Erlang(`n`,
/// `2 lambda`) density `(2 lambda x)^n / (x (n-1)!) exp(-2 lambda x)`.
pub fn nth_nearest_pdf(x: f64, n: usize, lambda_t: f64) -> Result<f64> {
    if !(lambda_t > 0.0) {
        return Err(Error::invalid("lambda_t", lambda_t, "must be > 0"));
    }
    if n < 1 {
        return Err(Error::invalid("n", n as f64, "must be >= 1"));
    }
    if !(x > 0.0) {
        return Err(Error::invalid("x", x, "must be > 0"));
    }
    let z = 2.0 * lambda_t * x;
    let mut factorial = 1.0f64;
    for k in 2..n {
        factorial *= k as f64;
    }
    Ok(z.powi(n as i32) / (x * factorial) * (-z).exp())
}

/// Laplace transform of the aggregate interference from stations beyond the
/// guard distance `x_m_km`, evaluated at `j >= 0`:
/// `exp(-2 lambda int_{x_m}^inf j P x^-a / (j P x^-a + mu) dx)`.
///
/// The semi-infinite integral is mapped onto `(0, 1]` by `x = x_m / u` and
/// integrated adaptively; convergence needs `alpha > 1` and the model
/// enforces `alpha > 2`.
pub fn interference_laplace(j: f64, x_m_km: f64, model: &AnalyticModel) -> Result<f64> {
    model.validate()?;
    if !(j >= 0.0) || !j.is_finite() {
        return Err(Error::invalid("j", j, "must be finite and >= 0"));
    }
    if !(x_m_km > 0.0) {
        return Err(Error::invalid("x_m_km", x_m_km, "must be > 0"));
    }
    Ok(laplace_unchecked(j, x_m_km, model))
}

fn laplace_unchecked(j: f64, x_m_km: f64, model: &AnalyticModel) -> f64 {
    if j == 0.0 {
        return 1.0;
    }
    let lambda_ref = model.lambda_t / PATHLOSS_REF_PER_KM;
    let xm = x_m_km * PATHLOSS_REF_PER_KM;
    let jp = j * model.p_d_watts;
    let c = model.mu * xm.powf(model.alpha);
    let alpha = model.alpha;
    // x = xm/u maps [xm, inf) to (0, 1]; the integrand vanishes at u = 0
    // like u^(alpha-2).
    let mut integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        xm * jp * u.powf(alpha - 2.0) / (jp * u.powf(alpha) + c)
    };
    let tail = quadrature::integrate_adaptive(24, 0.0, 1.0, 1e-12, &mut integrand);
    (-2.0 * lambda_ref * tail).exp().min(1.0)
}

/// The tail integral `int_{xm}^inf j P w^-a / (j P w^-a + mu) dw` in
/// reference units, through its scale similarity: with
/// `w* = (j P / mu)^(1/alpha)` the value is `w* (Psi(inf) - Psi(xm/w*))`
/// where `Psi(r) = int_0^r ds / (1 + s^alpha)` and
/// `Psi(inf) = pi / (alpha sin(pi/alpha))`.
///
/// `Psi` is evaluated by a single Gauss-Legendre pass for `r <= 2` (the
/// integrand is analytic with poles a unit circle away) and by the
/// alternating asymptotic series of the remainder for `r > 2`. This is the
/// hot path of the coverage integrals; [`interference_laplace`] retains the
/// adaptive evaluation of the same integral and the two are cross-checked in
/// tests.
fn interference_tail_ref(j: f64, xm_ref: f64, model: &AnalyticModel, gl_nodes: usize) -> f64 {
    let alpha = model.alpha;
    let w_star = (j * model.p_d_watts / model.mu).powf(1.0 / alpha);
    if w_star == 0.0 {
        return 0.0;
    }
    let r = xm_ref / w_star;
    if r > 2.0 {
        // sum_{k>=1} (-1)^(k+1) r^(1 - k alpha) / (k alpha - 1)
        let r_neg_alpha = r.powf(-alpha);
        let mut power = r * r_neg_alpha;
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=60 {
            let term = sign * power / (k as f64 * alpha - 1.0);
            sum += term;
            if term.abs() <= 1e-16 * sum.abs() {
                break;
            }
            power *= r_neg_alpha;
            sign = -sign;
        }
        w_star * sum
    } else {
        let psi_inf = std::f64::consts::PI / (alpha * (std::f64::consts::PI / alpha).sin());
        let rule = quadrature::gauss_legendre(gl_nodes.max(16));
        let psi_r = quadrature::integrate_legendre(&rule, 0.0, r, |s| 1.0 / (1.0 + s.powf(alpha)));
        w_star * (psi_inf - psi_r)
    }
}

/// Coverage probability conditioned on the serving distances: the noise
/// factor `exp(-mu t sigma^2 / S)` times the interference Laplace transform
/// at `j = mu t / S`, with `S = sum P x_i^-alpha`.
pub fn conditional_coverage_kernel(
    xs_km: &[f64],
    t_linear: f64,
    model: &AnalyticModel,
) -> Result<f64> {
    model.validate()?;
    check_ascending(xs_km)?;
    if !(t_linear > 0.0) {
        return Err(Error::invalid("t_linear", t_linear, "must be > 0"));
    }
    let mut serving_sum = 0.0;
    for &x in xs_km {
        serving_sum += model.p_d_watts * (x * PATHLOSS_REF_PER_KM).powf(-model.alpha);
    }
    let j = model.mu * t_linear / serving_sum;
    let noise_factor = (-model.mu * t_linear * model.noise_watts / serving_sum).exp();
    Ok(noise_factor * laplace_unchecked(j, xs_km[xs_km.len() - 1], model))
}

/// Kernel evaluation once the serving power sum and boundary (in reference
/// units) are known; the hot path shared by the tensor and QMC integrators.
fn kernel_from_sum(
    serving_sum: f64,
    x_m_ref: f64,
    t_linear: f64,
    model: &AnalyticModel,
    inner_nodes: usize,
) -> f64 {
    let j = model.mu * t_linear / serving_sum;
    let lambda_ref = model.lambda_t / PATHLOSS_REF_PER_KM;
    let exponent = model.mu * t_linear * model.noise_watts / serving_sum
        + 2.0 * lambda_ref * interference_tail_ref(j, x_m_ref, model, inner_nodes);
    (-exponent).exp()
}

/// Coverage probability at a linear SINR threshold.
///
/// Refinement doubles the per-dimension node count (tensor path) or the point
/// count (QMC path, orders above [`TENSOR_MAX_ORDER`]) until two consecutive
/// estimates agree to `quad.rel_tol`; failing that, returns
/// [`Error::Accuracy`] carrying the last two estimates.
pub fn coverage_probability(
    t_linear: f64,
    model: &AnalyticModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    model.validate()?;
    quad.validate()?;
    if !(t_linear > 0.0) || !t_linear.is_finite() {
        return Err(Error::invalid("t_linear", t_linear, "must be > 0"));
    }
    if model.m <= TENSOR_MAX_ORDER {
        coverage_tensor(t_linear, model, quad)
    } else {
        coverage_qmc(t_linear, model, quad).map(|(value, _se)| value)
    }
}

/// Coverage probability at a threshold given in dB.
pub fn coverage_probability_db(
    t_db: f64,
    model: &AnalyticModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    coverage_probability(db_to_linear(t_db)?, model, quad)
}

fn coverage_tensor(t_linear: f64, model: &AnalyticModel, quad: &QuadratureSpec) -> Result<f64> {
    let mut nodes = quad.gap_nodes;
    let mut previous = f64::NAN;
    let mut last = f64::NAN;
    for refinement in 0..=quad.max_refinements {
        if (nodes as f64).powi(model.m as i32) > TENSOR_EVAL_BUDGET {
            return Err(Error::Accuracy {
                rel_tol: quad.rel_tol,
                refinements: refinement,
                previous,
                last,
            });
        }
        let estimate = tensor_estimate(t_linear, model, nodes, quad.inner_nodes);
        if refinement > 0 && (estimate - last).abs() <= quad.rel_tol * estimate.abs().max(1e-12) {
            return Ok(estimate.clamp(0.0, 1.0));
        }
        previous = last;
        last = estimate;
        nodes *= 2;
    }
    Err(Error::Accuracy {
        rel_tol: quad.rel_tol,
        refinements: quad.max_refinements,
        previous,
        last,
    })
}

/// One tensor Gauss-Laguerre pass at a caller-chosen node count, without the
/// refinement loop or its error control.
///
/// Intended for sweeps over a parameter that enters the integrand
/// monotonically (density, noise): evaluating every sweep point with the
/// same node grid preserves the pointwise ordering of the kernels exactly,
/// so the sweep inherits monotonicity without needing the per-point
/// tolerance that [`coverage_probability`] enforces.
pub fn coverage_probability_fixed(
    t_linear: f64,
    model: &AnalyticModel,
    gap_nodes: usize,
    inner_nodes: usize,
) -> Result<f64> {
    model.validate()?;
    if !(t_linear > 0.0) || !t_linear.is_finite() {
        return Err(Error::invalid("t_linear", t_linear, "must be > 0"));
    }
    if model.m > TENSOR_MAX_ORDER {
        return Err(Error::invalid(
            "m",
            model.m as f64,
            "fixed-node tensor evaluation supports m <= 6",
        ));
    }
    if (gap_nodes as f64).powi(model.m as i32) > TENSOR_EVAL_BUDGET {
        return Err(Error::invalid(
            "gap_nodes",
            gap_nodes as f64,
            "tensor grid exceeds the evaluation budget",
        ));
    }
    Ok(tensor_estimate(t_linear, model, gap_nodes, inner_nodes).clamp(0.0, 1.0))
}

/// One tensor Gauss-Laguerre pass with `nodes` points per gap dimension.
///
/// Parallel over the first gap index; per-slab sums are sequential and the
/// slab results are folded in index order, so the value is bit-identical for
/// any worker count.
fn tensor_estimate(t_linear: f64, model: &AnalyticModel, nodes: usize, inner_nodes: usize) -> f64 {
    let rate = 2.0 * model.lambda_t;
    let rule = gauss_laguerre(nodes);
    // Gaps converted to reference units once; x and S accumulate in them.
    let gaps: Vec<f64> = rule
        .iter()
        .map(|&(v, _)| v / rate * PATHLOSS_REF_PER_KM)
        .collect();
    let weights: Vec<f64> = rule.iter().map(|&(_, w)| w).collect();

    let slabs: Vec<f64> = (0..nodes)
        .into_par_iter()
        .map(|first| {
            let x = gaps[first];
            let s = model.p_d_watts * x.powf(-model.alpha);
            tensor_slab(
                t_linear,
                model,
                &gaps,
                &weights,
                inner_nodes,
                model.m - 1,
                x,
                s,
                weights[first],
            )
        })
        .collect();
    slabs.iter().sum()
}

#[allow(clippy::too_many_arguments)]
fn tensor_slab(
    t_linear: f64,
    model: &AnalyticModel,
    gaps: &[f64],
    weights: &[f64],
    inner_nodes: usize,
    remaining: usize,
    x_acc: f64,
    s_acc: f64,
    w_acc: f64,
) -> f64 {
    if remaining == 0 {
        return w_acc * kernel_from_sum(s_acc, x_acc, t_linear, model, inner_nodes);
    }
    let mut sum = 0.0;
    for k in 0..gaps.len() {
        let x = x_acc + gaps[k];
        let s = s_acc + model.p_d_watts * x.powf(-model.alpha);
        sum += tensor_slab(
            t_linear,
            model,
            gaps,
            weights,
            inner_nodes,
            remaining - 1,
            x,
            s,
            w_acc * weights[k],
        );
    }
    sum
}

/// Randomized-Halton evaluation over the gap variables for high connectivity
/// orders. Returns `(estimate, standard error)`; converges when the
/// replicate standard error drops below `rel_tol * estimate`.
///
/// The random shifts derive from a fixed internal seed, so repeated calls are
/// deterministic.
pub fn coverage_qmc(
    t_linear: f64,
    model: &AnalyticModel,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    use rand::{Rng, SeedableRng};
    model.validate()?;
    quad.validate()?;
    let m = model.m;
    let bases = quadrature::halton_bases(m);
    let mut shift_rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x51_6d_63_u64);
    let shifts: Vec<Vec<f64>> = (0..QMC_REPLICATES)
        .map(|_| (0..m).map(|_| shift_rng.gen::<f64>()).collect())
        .collect();

    let rate = 2.0 * model.lambda_t;
    let mut points_per_replicate = 2048usize;
    let mut previous = f64::NAN;
    for refinement in 0..=quad.max_refinements {
        let replicate_means: Vec<f64> = shifts
            .par_iter()
            .map(|shift| {
                let mut acc = 0.0;
                for i in 0..points_per_replicate {
                    let mut x = 0.0;
                    let mut s = 0.0;
                    for (d, &base) in bases.iter().enumerate() {
                        let u = (quadrature::halton(i as u64 + 1, base) + shift[d]).fract();
                        // Inverse CDF of Exp(rate); the floor keeps the gap
                        // finite when u rounds to 1.
                        let gap = -((1.0 - u).max(1e-300)).ln() / rate;
                        x += gap * PATHLOSS_REF_PER_KM;
                        s += model.p_d_watts * x.powf(-model.alpha);
                    }
                    acc += kernel_from_sum(s, x, t_linear, model, quad.inner_nodes);
                }
                acc / points_per_replicate as f64
            })
            .collect();
        let mean = replicate_means.iter().sum::<f64>() / QMC_REPLICATES as f64;
        let var = replicate_means
            .iter()
            .map(|r| (r - mean).powi(2))
            .sum::<f64>()
            / (QMC_REPLICATES as f64 - 1.0);
        let se = (var / QMC_REPLICATES as f64).sqrt();
        if se <= quad.rel_tol * mean.abs().max(1e-12) {
            return Ok((mean.clamp(0.0, 1.0), se));
        }
        if refinement == quad.max_refinements {
            return Err(Error::Accuracy {
                rel_tol: quad.rel_tol,
                refinements: quad.max_refinements,
                previous,
                last: mean,
            });
        }
        previous = mean;
        points_per_replicate *= 2;
    }
    unreachable!("loop returns on the final refinement");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_legendre, integrate_legendre};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table_model(m: usize) -> AnalyticModel {
        let params = NetworkParams {
            m,
            ..NetworkParams::default()
        };
        AnalyticModel::from_params(&params).unwrap()
    }

    #[test]
    fn joint_pdf_boundary_and_hand_values() {
        // n = 1 at x -> 0+ approaches 2 lambda.
        assert_relative_eq!(
            joint_distance_pdf(&[1e-12], 1.0).unwrap(),
            2.0,
            max_relative = 1e-9
        );
        // n = 2, lambda = 1, (0.5, 1.0): 4 e^-2.
        assert_relative_eq!(
            joint_distance_pdf(&[0.5, 1.0], 1.0).unwrap(),
            4.0 * (-2.0f64).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(4.0 * (-2.0f64).exp(), 0.541341, max_relative = 1e-6);
    }

    #[test]
    fn joint_pdf_rejects_unordered_input() {
        assert!(matches!(
            joint_distance_pdf(&[1.0, 0.5], 1.0),
            Err(Error::NotAscending)
        ));
        assert!(joint_distance_pdf(&[0.0, 1.0], 1.0).is_err());
        assert!(joint_distance_pdf(&[], 1.0).is_err());
    }

    #[test]
    fn joint_pdf_factorizes_into_gap_densities() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let lambda = rng.gen_range(0.2..8.0);
            let n = rng.gen_range(1..6usize);
            let mut xs = Vec::with_capacity(n);
            let mut acc = 0.0;
            for _ in 0..n {
                acc += rng.gen_range(0.01..1.0);
                xs.push(acc);
            }
            let joint = joint_distance_pdf(&xs, lambda).unwrap();
            let mut product = 1.0;
            let mut prev = 0.0;
            for &x in &xs {
                product *= 2.0 * lambda * (-2.0 * lambda * (x - prev)).exp();
                prev = x;
            }
            assert_relative_eq!(joint, product, max_relative = 1e-12);
        }
    }

    #[test]
    fn joint_pdf_normalizes_over_ordered_region() {
        // Integrate exp-importance-weighted over the ordered region with a
        // deliberately mismatched rate so the quadrature does real work.
        let lambda = 1.3;
        for n in 1..=3usize {
            let importance = 0.7 * 2.0 * lambda;
            let rule = gauss_laguerre(48);
            let mut total = 0.0;
            let mut idx = vec![0usize; n];
            loop {
                let mut x = 0.0;
                let mut weight = 1.0;
                let mut xs = Vec::with_capacity(n);
                for &k in &idx {
                    let (v, w) = rule[k];
                    x += v / importance;
                    weight *= w * (v).exp() / importance;
                    xs.push(x);
                }
                // e^{+v} removed the Laguerre weight; what remains is a
                // plain integral of the pdf over the ordered region.
                total += weight * joint_distance_pdf(&xs, lambda).unwrap();
                // odometer increment
                let mut d = 0;
                loop {
                    idx[d] += 1;
                    if idx[d] < rule.len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                    if d == n {
                        break;
                    }
                }
                if d == n {
                    break;
                }
            }
            // The importance weights e^{+v_i} must cancel against the gap
            // densities; mismatch rate 0.7 keeps the ratio nontrivial.
            assert!(
                (total - 1.0).abs() < 1e-6,
                "n = {n}: ordered-region integral {total}"
            );
        }
    }

    #[test]
    fn nth_nearest_matches_first_order_pdf() {
        let lambda = 2.0;
        for i in 1..=100 {
            let x = i as f64 * 0.01;
            assert_relative_eq!(
                nth_nearest_pdf(x, 1, lambda).unwrap(),
                2.0 * lambda * (-2.0 * lambda * x).exp(),
                max_relative = 1e-12
            );
        }
        // Erlang hand value: n = 2, lambda = 1, x = 1 -> 4 e^-2.
        assert_relative_eq!(
            nth_nearest_pdf(1.0, 2, 1.0).unwrap(),
            4.0 * (-2.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn nth_nearest_is_marginal_of_joint() {
        // Integrating the joint density over x_1 .. x_{n-1} < x_n must give
        // the Erlang density, for n = 2 and 3, on a 50-point grid.
        let lambda = 1.7;
        let rule = gauss_legendre(48);
        for grid in 1..=50 {
            let xn = grid as f64 * 0.02;
            // n = 2: single finite integral over x1 in (0, xn).
            let marginal2 = integrate_legendre(&rule, 0.0, xn, |x1| {
                joint_distance_pdf(&[x1, xn], lambda).unwrap_or(0.0)
            });
            assert_relative_eq!(
                marginal2,
                nth_nearest_pdf(xn, 2, lambda).unwrap(),
                epsilon = 1e-6,
                max_relative = 1e-6
            );
            // n = 3: nested integral over 0 < x1 < x2 < xn.
            let marginal3 = integrate_legendre(&rule, 0.0, xn, |x2| {
                integrate_legendre(&rule, 0.0, x2, |x1| {
                    joint_distance_pdf(&[x1, x2, xn], lambda).unwrap_or(0.0)
                })
            });
            assert_relative_eq!(
                marginal3,
                nth_nearest_pdf(xn, 3, lambda).unwrap(),
                epsilon = 1e-6,
                max_relative = 1e-6
            );
        }
    }

    /// Closed-form antiderivative of `1/(1+u^4)`; the alpha = 4 oracle.
    fn quartic_antiderivative(u: f64) -> f64 {
        let s2 = std::f64::consts::SQRT_2;
        (1.0 / (4.0 * s2))
            * (((u * u + s2 * u + 1.0) / (u * u - s2 * u + 1.0)).ln()
                + 2.0 * (s2 * u + 1.0).atan()
                + 2.0 * (s2 * u - 1.0).atan())
    }

    fn laplace_closed_form_alpha4(j: f64, x_m_km: f64, model: &AnalyticModel) -> f64 {
        let lambda_ref = model.lambda_t / PATHLOSS_REF_PER_KM;
        let xm = x_m_km * PATHLOSS_REF_PER_KM;
        let c = model.mu / (j * model.p_d_watts);
        let k = c.powf(0.25);
        let at_infinity = std::f64::consts::PI / (2.0 * std::f64::consts::SQRT_2);
        let tail = (at_infinity - quartic_antiderivative(k * xm)) / k;
        (-2.0 * lambda_ref * tail).exp()
    }

    #[test]
    fn laplace_at_zero_and_vanishing_intensity() {
        let model = table_model(2);
        assert_eq!(interference_laplace(0.0, 0.1, &model).unwrap(), 1.0);

        let mut sparse = model.clone();
        sparse.lambda_t = 1e-12;
        for j in [1e6, 1e9, 1e12] {
            let z = interference_laplace(j, 0.1, &sparse).unwrap();
            assert!((z - 1.0).abs() < 1e-6, "lambda -> 0 gave {z}");
        }
    }

    #[test]
    fn laplace_matches_alpha4_closed_form() {
        let model = table_model(2);
        for (j, xm) in [
            (1e8, 0.1),
            (1e9, 0.1),
            (1e10, 0.25),
            (3e9, 0.05),
            (5e7, 0.4),
        ] {
            let quad = interference_laplace(j, xm, &model).unwrap();
            let closed = laplace_closed_form_alpha4(j, xm, &model);
            assert!(
                (quad - closed).abs() < 1e-8,
                "j={j}, xm={xm}: {quad} vs {closed}"
            );
        }
    }

    #[test]
    fn laplace_stays_in_unit_interval() {
        let model = table_model(1);
        for j in [1e-3, 1.0, 1e6, 1e9, 1e12, 1e15] {
            let z = interference_laplace(j, 0.05, &model).unwrap();
            assert!(z > 0.0 && z <= 1.0, "j={j}: {z}");
        }
    }

    #[test]
    fn fast_tail_matches_adaptive_laplace() {
        // The similarity-reduced tail used inside the coverage integrals and
        // the adaptive (0,1] evaluation behind `interference_laplace` are
        // independent routes to the same integral.
        for alpha in [2.3, 2.5, 3.0, 4.0, 4.5, 5.5] {
            let mut model = table_model(2);
            model.alpha = alpha;
            for j in [1e-2, 1e4, 1e7, 1e9, 1e11, 1e14] {
                for xm_km in [0.003, 0.05, 0.1, 0.5, 2.0] {
                    let adaptive = interference_laplace(j, xm_km, &model).unwrap();
                    let lambda_ref = model.lambda_t / PATHLOSS_REF_PER_KM;
                    let tail =
                        interference_tail_ref(j, xm_km * PATHLOSS_REF_PER_KM, &model, 24);
                    let fast = (-2.0 * lambda_ref * tail).exp();
                    assert!(
                        (adaptive - fast).abs() <= 1e-9,
                        "alpha={alpha}, j={j}, xm={xm_km}: {adaptive} vs {fast}"
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_shares_the_fast_tail_value() {
        let model = table_model(3);
        for (xs, t) in [
            (vec![0.05, 0.12, 0.30], 1.0),
            (vec![0.01, 0.015, 0.6], 10.0),
            (vec![0.2, 0.9, 1.4], 0.1),
        ] {
            let public = conditional_coverage_kernel(&xs, t, &model).unwrap();
            let s: f64 = xs
                .iter()
                .map(|x| model.p_d_watts * (x * PATHLOSS_REF_PER_KM).powf(-model.alpha))
                .sum();
            let fast = kernel_from_sum(s, xs[2] * PATHLOSS_REF_PER_KM, t, &model, 24);
            assert!(
                (public - fast).abs() <= 1e-9 * public.max(1e-12),
                "{public} vs {fast}"
            );
        }
    }

    #[test]
    fn kernel_degenerate_limits() {
        // No noise, (almost) no interferers: every threshold is met.
        let mut model = table_model(2);
        model.noise_watts = 0.0;
        model.lambda_t = 1e-12;
        let k = conditional_coverage_kernel(&[0.1, 0.2], 5.0, &model).unwrap();
        assert!((k - 1.0).abs() < 1e-9, "kernel {k}");

        // t -> 0+ approaches 1 for the full model.
        let model = table_model(2);
        let k = conditional_coverage_kernel(&[0.1, 0.2], 1e-12, &model).unwrap();
        assert!((k - 1.0).abs() < 1e-6, "kernel {k}");
    }

    #[test]
    fn kernel_rejects_unordered_serving_set() {
        let model = table_model(2);
        assert!(conditional_coverage_kernel(&[0.2, 0.1], 1.0, &model).is_err());
        assert!(conditional_coverage_kernel(&[0.1, 0.2], 0.0, &model).is_err());
    }

    #[test]
    fn coverage_tends_to_one_at_tiny_threshold() {
        let quad = QuadratureSpec::default();
        for m in 1..=3 {
            let cov = coverage_probability(1e-9, &table_model(m), &quad).unwrap();
            assert!((cov - 1.0).abs() < 1e-4, "m={m}: {cov}");
        }
    }

    #[test]
    fn coverage_is_nonincreasing_in_threshold() {
        let quad = QuadratureSpec::default();
        for m in 1..=3 {
            let model = table_model(m);
            let mut prev = f64::INFINITY;
            for t_db in (-10..=20).step_by(2) {
                let cov = coverage_probability_db(t_db as f64, &model, &quad).unwrap();
                assert!(
                    cov <= prev + 1e-9,
                    "m={m}: coverage rose from {prev} to {cov} at {t_db} dB"
                );
                prev = cov;
            }
        }
    }

    #[test]
    fn coverage_is_nondecreasing_in_connectivity_order() {
        let quad = QuadratureSpec::default();
        for t_db in [-10.0, 0.0, 10.0, 20.0] {
            let mut prev = 0.0;
            for m in 1..=3 {
                let cov = coverage_probability_db(t_db, &table_model(m), &quad).unwrap();
                assert!(
                    cov >= prev - 1e-9,
                    "t={t_db} dB: m={m} gave {cov} below {prev}"
                );
                prev = cov;
            }
        }
    }

    #[test]
    fn coverage_nonincreasing_in_noise_and_scale_invariant_without_interference() {
        let quad = QuadratureSpec::default();
        let mut quiet = table_model(2);
        let mut loud = table_model(2);
        loud.noise_watts *= 100.0;
        let c_quiet = coverage_probability(1.0, &quiet, &quad).unwrap();
        let c_loud = coverage_probability(1.0, &loud, &quad).unwrap();
        assert!(c_loud < c_quiet);

        // With lambda -> 0 (no interferers), scaling P and sigma^2 together
        // leaves coverage unchanged.
        quiet.lambda_t = 1e-9;
        let mut scaled = quiet.clone();
        scaled.p_d_watts *= 37.0;
        scaled.noise_watts *= 37.0;
        let a = coverage_probability(1.0, &quiet, &quad).unwrap();
        let b = coverage_probability(1.0, &scaled, &quad).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn coverage_increases_with_pathloss_exponent_at_reference_geometry() {
        let quad = QuadratureSpec::default();
        for m in 1..=3usize {
            let mut prev = 0.0;
            for alpha in [2.5, 3.0, 3.5, 4.0, 4.5] {
                let params = NetworkParams {
                    alpha_d: alpha,
                    m,
                    ..NetworkParams::default()
                };
                let model = AnalyticModel::from_params(&params).unwrap();
                let cov = coverage_probability(1.0, &model, &quad).unwrap();
                assert!(cov > prev, "m={m}, alpha={alpha}: {cov} <= {prev}");
                prev = cov;
            }
        }
    }

    #[test]
    fn qmc_agrees_with_tensor_quadrature() {
        let quad = QuadratureSpec {
            rel_tol: 2e-4,
            max_refinements: 6,
            ..QuadratureSpec::default()
        };
        for m in [2usize, 3] {
            let model = table_model(m);
            let tensor = coverage_probability(1.0, &model, &QuadratureSpec::default()).unwrap();
            let (qmc, se) = coverage_qmc(1.0, &model, &quad).unwrap();
            assert!(
                (tensor - qmc).abs() < 1e-3,
                "m={m}: tensor {tensor} vs qmc {qmc} (se {se})"
            );
        }
    }

    #[test]
    fn high_order_routes_through_qmc() {
        let quad = QuadratureSpec {
            rel_tol: 5e-4,
            max_refinements: 6,
            ..QuadratureSpec::default()
        };
        let cov = coverage_probability(1.0, &table_model(7), &quad).unwrap();
        let (six, _) = coverage_qmc(1.0, &table_model(6), &quad).unwrap();
        assert!(cov >= six - 3e-3, "m=7 coverage {cov} below m=6 {six}");
        assert!(cov <= 1.0);
    }

    #[test]
    fn fixed_node_pass_matches_refined_value() {
        let model = table_model(2);
        let refined = coverage_probability(1.0, &model, &QuadratureSpec::default()).unwrap();
        let fixed = coverage_probability_fixed(1.0, &model, 64, 24).unwrap();
        assert!(
            (refined - fixed).abs() < 1e-5,
            "refined {refined} vs fixed {fixed}"
        );
        assert!(coverage_probability_fixed(1.0, &table_model(7), 16, 24).is_err());
    }

    #[test]
    #[ignore]
    fn probe_refinement_trace() {
        for m in 1..=3usize {
            let model = table_model(m);
            for t_db in [-10.0f64, 0.0, 10.0, 16.0, 20.0] {
                let t = crate::units::db_to_linear(t_db).unwrap();
                let mut prev = f64::NAN;
                print!("m={m} t={t_db:>5}dB: ");
                for nodes in [16usize, 32, 64, 128, 256] {
                    if (nodes as f64).powi(m as i32) > 2e8 {
                        break;
                    }
                    let est = tensor_estimate(t, &model, nodes, 24);
                    let diff = (est - prev).abs() / est.abs();
                    print!("n{nodes}:{est:.10} (rd {diff:.2e})  ");
                    prev = est;
                }
                println!();
            }
        }
    }

    #[test]
    fn unreachable_tolerance_reports_last_estimates() {
        let model = table_model(2);
        let quad = QuadratureSpec {
            gap_nodes: 8,
            inner_nodes: 16,
            rel_tol: 1e-9,
            max_refinements: 0,
        };
        match coverage_probability(1.0, &model, &quad) {
            Err(Error::Accuracy { last, .. }) => assert!(last.is_finite()),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }
}
