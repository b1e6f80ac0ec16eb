//! Legendre polynomials, their roots, and Gauss–Legendre quadrature.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// `(P_n(x), P_n'(x))` from Bonnet's recursion
/// `n P_n = (2n−1) x P_{n−1} − (n−1) P_{n−2}`.
pub fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, x);
    let (mut d_prev, mut d) = (0.0, 1.0);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        let d_next = ((2.0 * kf - 1.0) * (p + x * d) - (kf - 1.0) * d_prev) / kf;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Roots of `P_n` in increasing order, by Newton iteration from the
/// asymptotic guesses `cos(π(k − ¼)/(n + ½))`.
pub fn legendre_roots(n: usize) -> Vec<f64> {
    let mut roots = Vec::with_capacity(n);
    let nf = n as f64;
    for k in 1..=n {
        let mut x = (std::f64::consts::PI * (k as f64 - 0.25) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_p(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        roots.push(x);
    }
    roots.reverse();
    // exact symmetry, and an exact zero in the middle for odd n
    for i in 0..n / 2 {
        let m = 0.5 * (roots[n - 1 - i] - roots[i]);
        roots[i] = -m;
        roots[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        roots[n / 2] = 0.0;
    }
    roots
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let nodes = legendre_roots(n);
        let weights = nodes
            .iter()
            .map(|&x| {
                let (_, d) = legendre_p(n, x);
                2.0 / ((1.0 - x * x) * d * d)
            })
            .collect();
        Self { nodes, weights }
    }

    /// Shared rule of the given size.
    pub fn cached(n: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
    }

    /// Nodes mapped to `[a, b]` with matching weights.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Adaptive Gauss–Legendre integration. A 20-point panel is accepted when it
/// agrees with the sum over its two halves within its share of
/// `tol·max(1, |I|)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: usize = 60;
    let rule = GaussLegendre::cached(20);
    let whole = rule.integrate(a, b, &f);
    let budget = tol * whole.abs().max(1.0);
    let width = (b - a).abs().max(f64::MIN_POSITIVE);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut total = 0.0;
    let mut unresolved = 0.0f64;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &f);
        let right = rule.integrate(mid, hi, &f);
        let refined = left + right;
        let err = (refined - est).abs();
        if err <= budget * (hi - lo).abs() / width || err <= 4.0 * f64::EPSILON * refined.abs() {
            total += refined;
        } else if depth >= MAX_DEPTH {
            unresolved += err;
            total += refined;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    if unresolved > budget {
        return Err(Error::ToleranceNotMet { tol, err: unresolved });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bonnet_values() {
        assert_eq!(legendre_p(0, 0.3).0, 1.0);
        assert_eq!(legendre_p(1, 0.3).0, 0.3);
        // P_2 = (3x² − 1)/2, P_3 = (5x³ − 3x)/2
        assert!((legendre_p(2, 0.0).0 + 0.5).abs() < 1e-16);
        let x = 0.37;
        assert!((legendre_p(3, x).0 - (5.0 * x * x * x - 3.0 * x) / 2.0).abs() < 1e-15);
        assert!((legendre_p(3, x).1 - (15.0 * x * x - 3.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn roots_are_certified() {
        for n in 1..=40 {
            let roots = legendre_roots(n);
            assert_eq!(roots.len(), n);
            for w in roots.windows(2) {
                assert!(w[0] < w[1]);
            }
            for &x in &roots {
                assert!(legendre_p(n, x).0.abs() < 1e-13, "n={n} x={x}");
            }
        }
        let r3 = legendre_roots(3);
        assert!((r3[2] - (0.6f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        let g = GaussLegendre::new(8);
        // degree 15 is integrated exactly
        let v = g.integrate(-1.0, 2.0, |x| x.powi(15) + 3.0 * x.powi(4));
        let exact = (2f64.powi(16) - 1.0) / 16.0 + 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-10 * exact);
        assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_peak() {
        let v = integrate_adaptive(|x| 1.0 / (1.0 - x + 1e-6), 0.0, 1.0, 1e-12).unwrap();
        let exact = ((1.0 + 1e-6) / 1e-6f64).ln();
        assert!((v - exact).abs() < 1e-9 * exact);
    }
}
