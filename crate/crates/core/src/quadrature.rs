//! Gauss quadrature rules and the adaptive integrator used for the
//! semi-infinite interference integral.
//!
//! Nodes and weights come from the Golub-Welsch algorithm: eigenvalues of the
//! symmetric tridiagonal Jacobi matrix of the orthogonal-polynomial
//! recurrence, with weights from the first eigenvector components. Computed
//! rules are cached per node count since the coverage integral requests the
//! same rules for every threshold.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// A quadrature rule as `(node, weight)` pairs.
pub type Rule = Arc<Vec<(f64, f64)>>;

fn cache() -> &'static Mutex<HashMap<(u8, usize), Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, usize), Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix (EISPACK
/// `imtql2`), accumulating rotations only on the first row of the
/// eigenvector matrix, which is all Golub-Welsch needs for the weights.
///
/// `diag` holds the n diagonal entries, `off` the n-1 off-diagonal entries.
/// Returns `(eigenvalue, first_component)` pairs, unsorted.
fn tridiagonal_eigen_first_components(mut diag: Vec<f64>, mut off: Vec<f64>) -> Vec<(f64, f64)> {
    let n = diag.len();
    off.push(0.0);
    let mut first = vec![0.0f64; n];
    first[0] = 1.0;

    for l in 0..n {
        let mut iterations = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations <= 50, "QL iteration failed to converge");

            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;

            for i in (l..m).rev() {
                let mut f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;

                f = first[i + 1];
                first[i + 1] = s * first[i] + c * f;
                first[i] = c * first[i] - s * f;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    diag.into_iter().zip(first).collect()
}

/// Golub-Welsch: nodes are the Jacobi-matrix eigenvalues, weights are
/// `mu0 * v0^2` with `v0` the first eigenvector component. Sorted by node.
fn golub_welsch(diag: Vec<f64>, off: Vec<f64>, mu0: f64) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = tridiagonal_eigen_first_components(diag, off)
        .into_iter()
        .map(|(node, v0)| (node, mu0 * v0 * v0))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    pairs
}

/// Gauss-Laguerre rule of `n` nodes: `int_0^inf e^-v f(v) dv ~ sum w_k f(v_k)`.
pub fn gauss_laguerre(n: usize) -> Rule {
    assert!(n >= 1, "need at least one node");
    if let Some(rule) = cache().lock().unwrap().get(&(0, n)) {
        return Arc::clone(rule);
    }
    // Recurrence for Laguerre polynomials (weight e^-x on [0, inf)):
    // a_k = 2k + 1, b_k = k, mu0 = 1.
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| k as f64).collect();
    let rule = Arc::new(golub_welsch(diag, off, 1.0));
    cache().lock().unwrap().insert((0, n), Arc::clone(&rule));
    rule
}

/// Gauss-Legendre rule of `n` nodes on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "need at least one node");
    if let Some(rule) = cache().lock().unwrap().get(&(1, n)) {
        return Arc::clone(rule);
    }
    // b_k = k / sqrt(4k^2 - 1), mu0 = 2.
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let rule = Arc::new(golub_welsch(diag, off, 2.0));
    cache().lock().unwrap().insert((1, n), Arc::clone(&rule));
    rule
}

/// Integrates `f` over `[a, b]` with a fixed Gauss-Legendre rule.
pub fn integrate_legendre<F: FnMut(f64) -> f64>(rule: &Rule, a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Adaptive Gauss-Legendre on `[a, b]`: panels are bisected until the whole-
/// panel estimate agrees with the two half-panel estimates to `rel_tol`
/// relative to the accumulated integral (with a small absolute floor).
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    base_nodes: usize,
    a: f64,
    b: f64,
    rel_tol: f64,
    f: &mut F,
) -> f64 {
    let rule = gauss_legendre(base_nodes.max(8));
    let coarse = integrate_legendre(&rule, a, b, &mut *f);
    let scale = coarse.abs().max(1e-300);
    adaptive_panel(&rule, a, b, coarse, rel_tol * scale, 48, f)
}

fn adaptive_panel<F: FnMut(f64) -> f64>(
    rule: &Rule,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    depth: usize,
    f: &mut F,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = integrate_legendre(rule, a, mid, &mut *f);
    let right = integrate_legendre(rule, mid, b, &mut *f);
    let refined = left + right;
    if (refined - whole).abs() <= abs_tol || depth == 0 {
        return refined;
    }
    adaptive_panel(rule, a, mid, left, abs_tol * 0.5, depth - 1, f)
        + adaptive_panel(rule, mid, b, right, abs_tol * 0.5, depth - 1, f)
}

/// Radical-inverse Halton point, dimension by prime base.
pub fn halton(index: u64, base: u64) -> f64 {
    let mut f = 1.0f64;
    let mut r = 0.0f64;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// The first `dim` primes, used as Halton bases.
pub fn halton_bases(dim: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(dim);
    let mut candidate = 2u64;
    while primes.len() < dim {
        if (2..candidate).all(|d| d * d > candidate || candidate % d != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}
