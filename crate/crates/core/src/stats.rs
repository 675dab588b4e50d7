//! Small statistical helpers shared by the simulator and the validation
//! suite: Kolmogorov-Smirnov one-sample test and binomial confidence
//! intervals.

/// One-sample Kolmogorov-Smirnov statistic of sorted `samples` against the
/// continuous CDF `cdf`.
///
/// `samples` must be sorted ascending; the statistic is the maximum of the
/// one-sided gaps at each sample point.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let upper = ((i + 1) as f64 / n - f).abs();
        let lower = (f - i as f64 / n).abs();
        d = d.max(upper).max(lower);
    }
    d
}

/// Critical value of the one-sample KS statistic at significance `alpha`
/// (supported levels: 0.10, 0.05, 0.01) using Stephens' large-sample
/// approximation `c(alpha) / (sqrt(n) + 0.12 + 0.11/sqrt(n))`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let c = if alpha <= 0.01 {
        1.628
    } else if alpha <= 0.05 {
        1.358
    } else {
        1.224
    };
    let sqrt_n = (n as f64).sqrt();
    c / (sqrt_n + 0.12 + 0.11 / sqrt_n)
}

/// 95% half-width for a binomial proportion.
///
/// Uses the normal approximation `1.96 * sqrt(p(1-p)/n)` in the bulk; near
/// the boundaries (fewer than 5 expected successes or failures, where the
/// normal width collapses toward zero) it falls back to the Wilson score
/// half-width, which stays honest at `p` near 0 or 1.
pub fn proportion_ci_half_width(successes: u64, trials: u64) -> f64 {
    assert!(trials > 0, "trials must be positive");
    let z = 1.96f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let near_boundary = (p * n) < 5.0 || ((1.0 - p) * n) < 5.0;
    if near_boundary {
        // Wilson score interval half-width.
        let denom = 1.0 + z * z / n;
        (z / denom) * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt()
    } else {
        z * (p * (1.0 - p) / n).sqrt()
    }
}

/// CDF of the Erlang(`n`, `rate`) distribution: `1 - exp(-rx) sum_{k<n} (rx)^k/k!`.
///
/// This is the distribution of the `n`-th nearest point of a 1-D PPP when
/// `rate = 2 * lambda`.
pub fn erlang_cdf(x: f64, n: usize, rate: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = rate * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..n {
        term *= z / k as f64;
        sum += term;
    }
    1.0 - (-z).exp() * sum
}
