//! Shared numerical routines: deterministic summation, adaptive quadrature
//! and standard-normal helpers.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::Scalar;

/// Fixed-order pairwise summation.
///
/// The reduction tree depends only on the slice length, so results are
/// bit-identical regardless of how the inputs were produced (in particular
/// across thread counts, as long as the slice order is fixed).
pub fn pairwise_sum<S: Scalar>(xs: &[S]) -> S {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        let mut acc = S::zero();
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<S: Scalar>(f: impl Fn(S) -> S, a: S, b: S, tol: S) -> S {
    fn simpson<S: Scalar>(f: &impl Fn(S) -> S, a: S, fa: S, b: S, fb: S) -> (S, S, S) {
        let m = (a + b) / S::of(2.0);
        let fm = f(m);
        let h = (b - a) / S::of(6.0);
        (m, fm, h * (fa + S::of(4.0) * fm + fb))
    }
    fn recurse<S: Scalar>(
        f: &impl Fn(S) -> S,
        a: S,
        fa: S,
        b: S,
        fb: S,
        m: S,
        fm: S,
        whole: S,
        tol: S,
        depth: u32,
    ) -> S {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= S::of(15.0) * tol {
            return left + right + delta / S::of(15.0);
        }
        let half = tol / S::of(2.0);
        recurse(f, a, fa, m, fm, lm, flm, left, half, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, half, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Chebyshev initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Standard normal quantile (inverse CDF).
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let seq: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - seq).abs() < 1e-9);
    }

    #[test]
    fn simpson_integrates_polynomial() {
        // int_0^1 3x^2 dx = 1
        let v = adaptive_simpson(|x: f64| 3.0 * x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_cubic_exactly() {
        let nodes = gauss_legendre(8);
        let v: f64 = nodes.iter().map(|&(x, w)| w * (x * x * x + x * x)).sum();
        // int_{-1}^{1} x^3 + x^2 = 2/3
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        let total: f64 = nodes.iter().map(|&(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn normal_helpers_are_inverse() {
        for &p in &[0.01, 0.05, 0.5, 0.9, 0.975] {
            let z = normal_quantile(p);
            assert!((normal_cdf(z) - p).abs() < 1e-9);
        }
        assert!((normal_quantile(0.95) - 1.6448536269514722).abs() < 1e-7);
    }
}
