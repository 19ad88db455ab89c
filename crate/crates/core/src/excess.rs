//! Smoothed excess-measure statistics: the fraction of time the (fitted or
//! true) mean deviates from its value at 0 by more than a level `c`.
//!
//! The indicator `1{mu(t) - mu(0) > c}` is relaxed through the kernel CDF,
//! `cdf((mu(t) - mu(0) - c)/h_d)`, which converges to the indicator as
//! `h_d -> 0` and is what makes the multiplier calibration of the test
//! possible. All inner integrals are evaluated in closed form through the
//! CDF, never numerically.

use serde::Serialize;

use crate::kernels::KernelSpec;
use crate::numeric::pairwise_sum;
use crate::regression::MeanFit;
use crate::{Error, Result, Scalar};

/// Default floor below which `|mu(0)|` is considered zero for relative
/// excess measures.
pub const RELATIVE_BASELINE_FLOOR: f64 = 1e-8;

/// Parameters of the excess estimators.
#[derive(Clone, Debug, Serialize)]
pub struct ExcessConfig<S: Scalar> {
    /// Deviation level `c > 0`.
    pub level_c: S,
    /// Number of Riemann knots `N` (the grid is `{i/N} ∪ {0}`).
    pub grid_size: usize,
    /// Smoothing bandwidth of the indicator relaxation.
    pub h_d: S,
    /// Bandwidth `b_n` of the mean fit the estimate is built from.
    pub bandwidth: S,
    /// Kernel used both for smoothing and for the mean fit.
    pub kernel: KernelSpec<S>,
}

impl<S: Scalar> ExcessConfig<S> {
    /// Validates `c > 0`, `h_d > 0`, `h_d <= b_n` and `N >= 1`.
    pub fn new(
        level_c: S,
        grid_size: usize,
        h_d: S,
        bandwidth: S,
        kernel: KernelSpec<S>,
    ) -> Result<Self> {
        if !(level_c > S::zero()) {
            return Err(Error::InvalidConfig(format!(
                "level c must be positive, got {}",
                level_c.as_f64()
            )));
        }
        if grid_size == 0 {
            return Err(Error::InvalidConfig("grid size N must be >= 1".into()));
        }
        if !(h_d > S::zero()) || h_d > bandwidth {
            return Err(Error::InvalidConfig(format!(
                "need 0 < h_d <= b_n, got h_d = {}, b_n = {}",
                h_d.as_f64(),
                bandwidth.as_f64()
            )));
        }
        Ok(ExcessConfig {
            level_c,
            grid_size,
            h_d,
            bandwidth,
            kernel,
        })
    }

    /// The rule-of-thumb smoothing bandwidth `h_d = N^{-1/2}/2`.
    pub fn default_h_d(grid_size: usize) -> S {
        S::of(0.5 / (grid_size as f64).sqrt())
    }
}

/// One-sided and total excess estimates with the settings they were
/// produced under.
#[derive(Clone, Debug, Serialize)]
pub struct ExcessEstimate<S: Scalar> {
    pub t_plus: S,
    pub t_minus: S,
    pub t_total: S,
    pub config: ExcessConfig<S>,
}

/// The smoothed one-sided indicator: closed form of
/// `int_c^inf (1/h_d) K_d((v - u)/h_d) du = cdf((v - c)/h_d)`.
///
/// Equals 0 for `v <= c - h_d` and 1 for `v >= c + h_d`.
#[inline]
pub fn smooth_indicator_plus<S: Scalar>(v: S, c: S, h_d: S, kernel: &KernelSpec<S>) -> S {
    kernel.cdf((v - c) / h_d)
}

fn check_anchored<S: Scalar>(fit: &MeanFit<S>, cfg: &ExcessConfig<S>) -> Result<()> {
    if fit.grid.first() != Some(&S::zero()) {
        return Err(Error::InvalidConfig(
            "excess estimation needs a fit anchored at t = 0".into(),
        ));
    }
    if fit.len() != cfg.grid_size + 1 {
        return Err(Error::InvalidConfig(format!(
            "fit grid has {} knots, config expects N = {}",
            fit.len() - 1,
            cfg.grid_size
        )));
    }
    Ok(())
}

fn excess_from_curve<S: Scalar>(curve: &[S], cfg: &ExcessConfig<S>) -> (S, S) {
    let anchor = curve[0];
    let nf = S::of_usize(curve.len() - 1);
    let mut plus = Vec::with_capacity(curve.len() - 1);
    let mut minus = Vec::with_capacity(curve.len() - 1);
    for &m in &curve[1..] {
        let d = m - anchor;
        plus.push(cfg.kernel.cdf((d - cfg.level_c) / cfg.h_d));
        minus.push(S::one() - cfg.kernel.cdf((d + cfg.level_c) / cfg.h_d));
    }
    (pairwise_sum(&plus) / nf, pairwise_sum(&minus) / nf)
}

/// Excess estimates from the bias-corrected curve of an anchored fit:
///
/// `T+ = (1/N) sum_i cdf((mu~(i/N) - mu~(0) - c)/h_d)` and
/// `T- = (1/N) sum_i [1 - cdf((mu~(i/N) - mu~(0) + c)/h_d)]`.
pub fn estimate_excess<S: Scalar>(
    fit: &MeanFit<S>,
    cfg: &ExcessConfig<S>,
) -> Result<ExcessEstimate<S>> {
    check_anchored(fit, cfg)?;
    let (t_plus, t_minus) = excess_from_curve(&fit.mu_tilde, cfg);
    Ok(ExcessEstimate {
        t_plus,
        t_minus,
        t_total: t_plus + t_minus,
        config: cfg.clone(),
    })
}

/// Same Riemann sums evaluated on the uncorrected curve `mu_hat`, for
/// bias-comparison diagnostics.
pub fn estimate_excess_uncorrected<S: Scalar>(
    fit: &MeanFit<S>,
    cfg: &ExcessConfig<S>,
) -> Result<ExcessEstimate<S>> {
    check_anchored(fit, cfg)?;
    let (t_plus, t_minus) = excess_from_curve(&fit.mu_hat, cfg);
    Ok(ExcessEstimate {
        t_plus,
        t_minus,
        t_total: t_plus + t_minus,
        config: cfg.clone(),
    })
}

/// Deterministic counterpart of the plus-side estimate: the same Riemann sum
/// with the true mean function plugged in. Used as an analytic anchor and in
/// the approximation-error bound checks.
pub fn deterministic_excess<S: Scalar>(mu: impl Fn(S) -> S, cfg: &ExcessConfig<S>) -> S {
    let n = cfg.grid_size;
    let nf = S::of_usize(n);
    let anchor = mu(S::zero());
    let terms: Vec<S> = (1..=n)
        .map(|i| {
            let v = mu(S::of_usize(i) / nf) - anchor;
            cfg.kernel.cdf((v - cfg.level_c) / cfg.h_d)
        })
        .collect();
    pairwise_sum(&terms) / nf
}

/// Excess of the fitted mean over the average trend of the initial period
/// `[0, t0]`: `(1/N) sum_{i >= floor(N t0)} cdf((mu~(i/N) - avg - c)/h_d)`
/// with `avg = t0^{-1} int_0^{t0} mu~(s) ds` by the trapezoid rule on the
/// fit grid.
pub fn excess_vs_average_trend<S: Scalar>(
    fit: &MeanFit<S>,
    t0: S,
    cfg: &ExcessConfig<S>,
) -> Result<S> {
    if !(t0 > S::zero()) || !(t0 < S::one()) {
        return Err(Error::InvalidWindow { t0: t0.as_f64() });
    }
    check_anchored(fit, cfg)?;
    let n = cfg.grid_size;
    let nf = S::of_usize(n);

    // Trapezoid integral of the piecewise-linear interpolant up to t0.
    let mut integral = S::zero();
    for j in 1..fit.grid.len() {
        let (t_prev, t_cur) = (fit.grid[j - 1], fit.grid[j]);
        let (m_prev, m_cur) = (fit.mu_tilde[j - 1], fit.mu_tilde[j]);
        if t_cur <= t0 {
            integral += (t_cur - t_prev) * (m_prev + m_cur) / S::of(2.0);
        } else {
            let frac = (t0 - t_prev) / (t_cur - t_prev);
            let m_t0 = m_prev + frac * (m_cur - m_prev);
            integral += (t0 - t_prev) * (m_prev + m_t0) / S::of(2.0);
            break;
        }
    }
    let avg = integral / t0;

    let start = (t0.as_f64() * n as f64).floor() as usize;
    let start = start.max(1);
    let terms: Vec<S> = (start..=n)
        .map(|i| {
            let v = fit.mu_tilde[i] - avg;
            cfg.kernel.cdf((v - cfg.level_c) / cfg.h_d)
        })
        .collect();
    Ok(pairwise_sum(&terms) / nf)
}

/// Two-sided excess of the relative deviation `(mu~(t) - mu~(0))/mu~(0)`
/// above `c`, smoothed through the same kernel CDF. Fails with
/// `ZeroBaseline` when `|mu~(0)|` is at or below `floor`.
pub fn relative_excess<S: Scalar>(
    fit: &MeanFit<S>,
    cfg: &ExcessConfig<S>,
    floor: S,
) -> Result<S> {
    check_anchored(fit, cfg)?;
    let anchor = fit.mu_tilde[0];
    if anchor.abs() <= floor {
        return Err(Error::ZeroBaseline {
            baseline: anchor.abs().as_f64(),
            floor: floor.as_f64(),
        });
    }
    let nf = S::of_usize(cfg.grid_size);
    let terms: Vec<S> = fit.mu_tilde[1..]
        .iter()
        .map(|&m| {
            let r = (m - anchor) / anchor;
            cfg.kernel.cdf((r - cfg.level_c) / cfg.h_d)
                + (S::one() - cfg.kernel.cdf((r + cfg.level_c) / cfg.h_d))
        })
        .collect();
    Ok(pairwise_sum(&terms) / nf)
}

/// Lebesgue measure of `{t in [0,1]: |mu(t) - gamma| <= delta}`, measured on
/// a midpoint grid of `grid_points` cells. This is the quantity controlling
/// the deterministic approximation error of the Riemann/smoothing scheme.
pub fn level_set_measure<S: Scalar>(
    mu: impl Fn(S) -> S,
    gamma: S,
    delta: S,
    grid_points: usize,
) -> S {
    let nf = S::of_usize(grid_points);
    let mut hits = 0usize;
    for i in 0..grid_points {
        let t = (S::of_usize(i) + S::of(0.5)) / nf;
        if (mu(t) - gamma).abs() <= delta {
            hits += 1;
        }
    }
    S::of_usize(hits) / nf
}
