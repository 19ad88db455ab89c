//! Local linear estimation of the mean trend, Jackknife bias correction,
//! and GCV bandwidth selection against a banded covariance estimate.

use crate::kernels::KernelSpec;
use crate::{Error, Result, Scalar};

/// Observations `X_1, ..., X_n` on the rescaled-time grid `i/n`.
#[derive(Clone, Debug)]
pub struct TimeSeries<S> {
    values: Vec<S>,
}

impl<S: Scalar> TimeSeries<S> {
    /// Requires at least 10 finite observations.
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.len() < 10 {
            return Err(Error::InvalidSeries(format!(
                "need n >= 10 observations, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value at index {pos}"
            )));
        }
        Ok(TimeSeries { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Observation time `i/n` of the 1-based index `i`.
    pub fn time(&self, i: usize) -> S {
        S::of_usize(i) / S::of_usize(self.n())
    }
}

/// A bias-corrected mean curve evaluated on a query grid.
///
/// `mu_tilde[j] = 2 mu_hat_{b/sqrt 2}(t_j) - mu_hat_b(t_j)` by construction;
/// the uncorrected curve `mu_hat` (at bandwidth `b`) is retained for
/// diagnostics.
#[derive(Clone, Debug)]
pub struct MeanFit<S: Scalar> {
    pub grid: Vec<S>,
    pub mu_tilde: Vec<S>,
    pub mu_hat: Vec<S>,
    pub bandwidth: S,
    pub kernel: KernelSpec<S>,
}

impl<S: Scalar> MeanFit<S> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// The query grid `{0} ∪ {i/N : i = 1..N}` used by the excess estimators:
/// the Riemann knots plus the anchor point 0.
pub fn anchored_grid<S: Scalar>(n_knots: usize) -> Vec<S> {
    let nf = S::of_usize(n_knots);
    let mut grid = Vec::with_capacity(n_knots + 1);
    grid.push(S::zero());
    for i in 1..=n_knots {
        grid.push(S::of_usize(i) / nf);
    }
    grid
}

/// Local linear fit at a single point: the exact solution `(mu, mu_dot)` of
/// the weighted 2x2 normal equations with kernel weights `K((i/n - t)/b)`.
///
/// Returns `DegenerateWindow` when fewer than two distinct design points
/// carry positive weight (in particular whenever `b < 2/n`).
pub fn local_linear<S: Scalar>(
    series: &TimeSeries<S>,
    t: S,
    bandwidth: S,
    kernel: &KernelSpec<S>,
) -> Result<(S, S)> {
    if t < S::zero() || t > S::one() {
        return Err(Error::InvalidConfig(format!(
            "query point t = {} outside [0, 1]",
            t.as_f64()
        )));
    }
    let n = series.n();
    let nf = S::of_usize(n);
    let degenerate = || Error::DegenerateWindow {
        t: t.as_f64(),
        bandwidth: bandwidth.as_f64(),
    };
    if !(bandwidth > S::zero()) || bandwidth * nf < S::of(2.0) {
        return Err(degenerate());
    }

    let tf = t.as_f64();
    let bf = bandwidth.as_f64();
    let lo = (((tf - bf) * n as f64).ceil() as isize).max(1) as usize;
    let hi = (((tf + bf) * n as f64).floor() as isize).min(n as isize) as usize;
    if lo > hi {
        return Err(degenerate());
    }

    let values = series.values();
    let (mut s0, mut s1, mut s2) = (S::zero(), S::zero(), S::zero());
    let (mut t0, mut t1) = (S::zero(), S::zero());
    for i in lo..=hi {
        let x = S::of_usize(i) / nf - t;
        let w = kernel.evaluate(x / bandwidth);
        if w == S::zero() {
            continue;
        }
        let wx = w * x;
        s0 += w;
        s1 += wx;
        s2 += wx * x;
        t0 += w * values[i - 1];
        t1 += wx * values[i - 1];
    }

    // denom >= 0 by Cauchy-Schwarz; it vanishes iff the weighted design
    // points coincide.
    let denom = s0 * s2 - s1 * s1;
    if !(denom > S::of(1e-12) * s0 * s2) || !denom.is_finite() {
        return Err(degenerate());
    }
    let mu = (s2 * t0 - s1 * t1) / denom;
    let mu_dot = (s0 * t1 - s1 * t0) / denom;
    Ok((mu, mu_dot))
}

/// Jackknife (bias-corrected) fit on a query grid:
/// `mu_tilde(t) = 2 mu_hat_{b/sqrt 2}(t) - mu_hat_b(t)`.
pub fn jackknife_fit<S: Scalar>(
    series: &TimeSeries<S>,
    grid: &[S],
    bandwidth: S,
    kernel: &KernelSpec<S>,
) -> Result<MeanFit<S>> {
    let b_small = bandwidth / S::of(2.0).sqrt();
    let mut mu_tilde = Vec::with_capacity(grid.len());
    let mut mu_hat = Vec::with_capacity(grid.len());
    for &t in grid {
        let (m_full, _) = local_linear(series, t, bandwidth, kernel)?;
        let (m_half, _) = local_linear(series, t, b_small, kernel)?;
        mu_hat.push(m_full);
        mu_tilde.push(S::of(2.0) * m_half - m_full);
    }
    Ok(MeanFit {
        grid: grid.to_vec(),
        mu_tilde,
        mu_hat,
        bandwidth,
        kernel: kernel.clone(),
    })
}

/// Default GCV candidate grid: 15 log-spaced bandwidths in
/// `[max(0.05, 4/n), 0.4]`.
pub fn gcv_default_candidates<S: Scalar>(n: usize) -> Vec<S> {
    let lo: f64 = (4.0 / n as f64).max(0.05);
    let hi: f64 = 0.4;
    let count = 15;
    (0..count)
        .map(|k| {
            let frac = k as f64 / (count - 1) as f64;
            S::of((lo.ln() + frac * (hi.ln() - lo.ln())).exp())
        })
        .collect()
}

/// Default banding parameter for the covariance estimate: `floor(n^{1/3})`.
pub fn default_band(n: usize) -> usize {
    (n as f64).powf(1.0 / 3.0).floor() as usize
}

/// Generalized cross validation over a candidate bandwidth grid with the
/// default banding parameter. See [`gcv_bandwidth_banded`].
pub fn gcv_bandwidth<S: Scalar>(
    series: &TimeSeries<S>,
    candidates: &[S],
    kernel: &KernelSpec<S>,
) -> Result<S> {
    gcv_bandwidth_banded(series, candidates, default_band(series.n()), kernel)
}

/// Generalized cross validation:
///
/// `GCV(b) = (n^{-1} e_b' Gamma^{-1} e_b) / (1 - K*(0)/(n b))^2`
///
/// where `e_b` are the Jackknife residuals `X_i - mu_tilde_b(i/n)`. `Gamma`
/// is the banded covariance built once from the residuals of a pilot fit at
/// the median candidate; scoring every candidate against the same norm keeps
/// the criterion from chasing its own over- or under-fit residual structure.
/// The quadratic form is evaluated through a banded Cholesky solve.
/// Candidates whose fit degenerates are skipped; ties break toward the
/// smaller bandwidth.
pub fn gcv_bandwidth_banded<S: Scalar>(
    series: &TimeSeries<S>,
    candidates: &[S],
    band: usize,
    kernel: &KernelSpec<S>,
) -> Result<S> {
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("empty GCV candidate grid".into()));
    }
    let n = series.n();
    let nf = S::of_usize(n);
    let grid: Vec<S> = (1..=n).map(|i| S::of_usize(i) / nf).collect();
    let k_star_zero = kernel.jackknife().k_star_at_zero();

    let mut sorted: Vec<S> = candidates.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite bandwidths"));

    let residuals_at = |b: S| -> Result<Vec<S>> {
        let fit = jackknife_fit(series, &grid, b, kernel)?;
        Ok(series
            .values()
            .iter()
            .zip(&fit.mu_tilde)
            .map(|(&x, &m)| x - m)
            .collect())
    };

    // Pilot covariance: median candidate first, then the nearest workable one.
    let mid = sorted.len() / 2;
    let mut order: Vec<usize> = (0..sorted.len()).collect();
    order.sort_by_key(|&i| (i.abs_diff(mid), i));
    let mut cov = None;
    for &i in &order {
        match residuals_at(sorted[i]) {
            Ok(resid) => {
                cov = Some(banded_covariance(&resid, band));
                break;
            }
            Err(Error::DegenerateWindow { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let cov = cov.ok_or(Error::AllCandidatesDegenerate)?;

    let mut best: Option<(S, S)> = None;
    for &b in &sorted {
        let shrink = k_star_zero / (nf * b);
        if shrink >= S::one() {
            continue;
        }
        let residuals = match residuals_at(b) {
            Ok(r) => r,
            Err(Error::DegenerateWindow { .. }) => continue,
            Err(e) => return Err(e),
        };
        let solved = cov.solve(&residuals);
        let mut quad = S::zero();
        for (&e, &y) in residuals.iter().zip(&solved) {
            quad += e * y;
        }
        let denom = (S::one() - shrink) * (S::one() - shrink);
        let score = quad / nf / denom;
        match best {
            Some((s, _)) if score >= s => {}
            _ => best = Some((score, b)),
        }
    }
    best.map(|(_, b)| b).ok_or(Error::AllCandidatesDegenerate)
}

/// Banded, Toeplitz covariance estimate of the residual process: entry
/// `(i, j)` holds the sample autocovariance at lag `|i - j|` for
/// `|i - j| <= band`, zero beyond, plus a ridge `delta * gamma_0 * I` with
/// `delta` escalated through `{0, 1e-8, 1e-6, ...}` until the matrix is
/// positive definite. Scaling the ridge by the residual variance keeps the
/// regularisation (and everything downstream of the solve) invariant under
/// rescaling the data.
#[derive(Clone, Debug)]
pub struct BandedCovariance<S> {
    n: usize,
    band: usize,
    autocov: Vec<S>,
    ridge: S,
    chol: BandedCholesky<S>,
}

pub fn banded_covariance<S: Scalar>(residuals: &[S], band: usize) -> BandedCovariance<S> {
    let n = residuals.len();
    assert!(n > 0, "empty residual vector");
    let band = band.min(n - 1);
    let nf = S::of_usize(n);
    let mean = crate::numeric::pairwise_sum(residuals) / nf;

    let mut autocov = Vec::with_capacity(band + 1);
    for lag in 0..=band {
        let mut acc = S::zero();
        for i in 0..n - lag {
            acc += (residuals[i] - mean) * (residuals[i + lag] - mean);
        }
        autocov.push(acc / nf);
    }

    let scale = if autocov[0] > S::zero() {
        autocov[0]
    } else {
        S::one()
    };
    let mut delta = S::zero();
    loop {
        let ridge = delta * scale;
        let chol = BandedCholesky::factor(n, band, |i, j| {
            let lag = if i >= j { i - j } else { j - i };
            let base = autocov[lag];
            if i == j {
                base + ridge
            } else {
                base
            }
        });
        if let Some(chol) = chol {
            return BandedCovariance {
                n,
                band,
                autocov,
                ridge,
                chol,
            };
        }
        delta = if delta == S::zero() {
            S::of(1e-8)
        } else {
            delta * S::of(100.0)
        };
    }
}

impl<S: Scalar> BandedCovariance<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn band_width(&self) -> usize {
        self.band
    }

    pub fn ridge(&self) -> S {
        self.ridge
    }

    /// Matrix entry `(i, j)` (0-based), ridge included.
    pub fn entry(&self, i: usize, j: usize) -> S {
        let lag = if i >= j { i - j } else { j - i };
        if lag > self.band {
            return S::zero();
        }
        let base = self.autocov[lag];
        if i == j {
            base + self.ridge
        } else {
            base
        }
    }

    /// Solve `Gamma x = rhs` through the banded Cholesky factor.
    pub fn solve(&self, rhs: &[S]) -> Vec<S> {
        self.chol.solve(rhs)
    }

    /// Dense copy, for diagnostics and eigenvalue checks in tests.
    pub fn to_dense(&self) -> Vec<Vec<S>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// Cholesky factorization of a symmetric banded matrix, stored as a lower
/// band of width `band + 1`. Factorization fails (returns `None`) on a
/// non-positive pivot, which is the positive-definiteness test used by the
/// ridge escalation.
#[derive(Clone, Debug)]
struct BandedCholesky<S> {
    n: usize,
    band: usize,
    factor: Vec<S>,
}

impl<S: Scalar> BandedCholesky<S> {
    fn factor(n: usize, band: usize, entry: impl Fn(usize, usize) -> S) -> Option<Self> {
        let w = band + 1;
        let mut f = vec![S::zero(); n * w];
        for i in 0..n {
            let jlo = i.saturating_sub(band);
            for j in jlo..=i {
                let mut sum = entry(i, j);
                for k in jlo..j {
                    sum -= f[i * w + (k + band - i)] * f[j * w + (k + band - j)];
                }
                if i == j {
                    if !(sum > S::zero()) || !sum.is_finite() {
                        return None;
                    }
                    f[i * w + band] = sum.sqrt();
                } else {
                    f[i * w + (j + band - i)] = sum / f[j * w + band];
                }
            }
        }
        Some(BandedCholesky { n, band, factor: f })
    }

    fn solve(&self, rhs: &[S]) -> Vec<S> {
        let (n, band, w) = (self.n, self.band, self.band + 1);
        let f = &self.factor;
        let mut y = vec![S::zero(); n];
        for i in 0..n {
            let jlo = i.saturating_sub(band);
            let mut acc = rhs[i];
            for k in jlo..i {
                acc -= f[i * w + (k + band - i)] * y[k];
            }
            y[i] = acc / f[i * w + band];
        }
        let mut x = vec![S::zero(); n];
        for i in (0..n).rev() {
            let khi = (i + band).min(n - 1);
            let mut acc = y[i];
            for k in i + 1..=khi {
                acc -= f[k * w + (i + band - k)] * x[k];
            }
            x[i] = acc / f[i * w + band];
        }
        x
    }
}
