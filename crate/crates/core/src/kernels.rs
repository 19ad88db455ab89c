//! Kernel functions on `[-1, 1]`, their moments and CDFs, and the
//! Jackknife-derived kernels `K*` and `Kbar*` used by the bias-corrected
//! estimators downstream.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::numeric::adaptive_simpson;
use crate::{Error, Result, Scalar};

/// Quadrature tolerance used when deriving moments/CDF of custom kernels.
const QUAD_TOL: f64 = 1e-12;

type KernelFn<S> = Arc<dyn Fn(S) -> S + Send + Sync>;

/// A continuous symmetric kernel supported on `[-1, 1]` with unit mass,
/// together with its CDF and the one-sided moments
/// `mu_l = int_0^1 x^l K(x) dx` for `l = 0..=3`.
///
/// Immutable after construction and cheap to clone (function objects are
/// shared), so it can be used freely across threads.
#[derive(Clone)]
pub struct KernelSpec<S> {
    name: String,
    evaluate: KernelFn<S>,
    cdf: KernelFn<S>,
    moments: [S; 4],
}

impl<S: Scalar> KernelSpec<S> {
    /// The Epanechnikov kernel `K(x) = 0.75 (1 - x^2)` with closed-form CDF
    /// and moments. This is the default kernel everywhere.
    pub fn epanechnikov() -> Self {
        let evaluate: KernelFn<S> = Arc::new(|x: S| {
            if x.abs() > S::one() {
                S::zero()
            } else {
                S::of(0.75) * (S::one() - x * x)
            }
        });
        let cdf: KernelFn<S> = Arc::new(|x: S| {
            if x <= -S::one() {
                S::zero()
            } else if x >= S::one() {
                S::one()
            } else {
                // int_{-1}^{x} 0.75 (1 - u^2) du
                S::of(0.5) + S::of(0.75) * x - S::of(0.25) * x * x * x
            }
        });
        KernelSpec {
            name: "epanechnikov".to_string(),
            evaluate,
            cdf,
            moments: [
                S::of(0.5),
                S::of(3.0 / 16.0),
                S::of(0.1),
                S::of(1.0 / 16.0),
            ],
        }
    }

    /// Build a kernel from an arbitrary symmetric density on `[-1, 1]`.
    ///
    /// Moments are computed by adaptive quadrature (tolerance `1e-12`) and
    /// the CDF is evaluated by quadrature on demand. Construction fails if
    /// the function is visibly asymmetric or does not integrate to one.
    pub fn from_fn(
        name: impl Into<String>,
        f: impl Fn(S) -> S + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        let f = Arc::new(f);
        let tol = S::of(QUAD_TOL);

        for k in 1..=20 {
            let x = S::of(k as f64 / 20.0);
            let diff = (f(x) - f(-x)).abs();
            if diff > S::of(1e-9) {
                return Err(Error::InvalidKernel(format!(
                    "{name}: asymmetric at x = {}",
                    x.as_f64()
                )));
            }
        }
        let mass = adaptive_simpson(|x| f(x), -S::one(), S::one(), tol);
        if (mass - S::one()).abs() > S::of(1e-10) {
            return Err(Error::InvalidKernel(format!(
                "{name}: mass {} differs from 1",
                mass.as_f64()
            )));
        }

        let mut moments = [S::zero(); 4];
        for (l, slot) in moments.iter_mut().enumerate() {
            let fl = f.clone();
            *slot = adaptive_simpson(
                move |x: S| x.powi(l as i32) * fl(x),
                S::zero(),
                S::one(),
                tol,
            );
        }

        let fe = f.clone();
        let evaluate: KernelFn<S> = Arc::new(move |x: S| {
            if x.abs() > S::one() {
                S::zero()
            } else {
                fe(x)
            }
        });
        let fc = f.clone();
        let cdf: KernelFn<S> = Arc::new(move |x: S| {
            if x <= -S::one() {
                S::zero()
            } else if x >= S::one() {
                S::one()
            } else {
                adaptive_simpson(|u| fc(u), -S::one(), x, S::of(QUAD_TOL))
            }
        });
        Ok(KernelSpec {
            name,
            evaluate,
            cdf,
            moments,
        })
    }

    /// Kernel value at `x`; zero outside `[-1, 1]`.
    #[inline]
    pub fn evaluate(&self, x: S) -> S {
        (self.evaluate)(x)
    }

    /// CDF value `int_{-1}^{x} K(u) du`.
    #[inline]
    pub fn cdf(&self, x: S) -> S {
        (self.cdf)(x)
    }

    /// One-sided moments `[mu_0, mu_1, mu_2, mu_3]`.
    pub fn moments(&self) -> [S; 4] {
        self.moments
    }

    /// `mu_l` for `l <= 3`.
    pub fn moment(&self, l: usize) -> S {
        self.moments[l]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The constants `c0 = mu_0 mu_2 - mu_1^2` and `c2 = mu_2^2 - mu_1 mu_3`
    /// appearing in the asymptotic bias and variance formulas.
    pub fn constants(&self) -> (S, S) {
        let [m0, m1, m2, m3] = self.moments;
        (m0 * m2 - m1 * m1, m2 * m2 - m1 * m3)
    }

    /// Derive the Jackknife kernel pair `K*`, `Kbar*`.
    pub fn jackknife(&self) -> JackknifeKernels<S> {
        JackknifeKernels::derive(self)
    }
}

impl<S: Scalar> fmt::Debug for KernelSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("moments", &self.moments)
            .finish()
    }
}

impl<S: Scalar> Serialize for KernelSpec<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        serializer.serialize_str(&self.name)
    }
}

/// Look up a registered kernel by name. Only `"epanechnikov"` ships in v1;
/// custom kernels enter through [`KernelSpec::from_fn`].
pub fn kernel_by_name<S: Scalar>(name: &str) -> Result<KernelSpec<S>> {
    match name {
        "epanechnikov" => Ok(KernelSpec::epanechnikov()),
        other => Err(Error::InvalidKernel(format!("unknown kernel '{other}'"))),
    }
}

/// The Jackknife transform of a base kernel:
///
/// `K*(x)  = 2 sqrt(2) K(sqrt(2) x) - K(x)`
/// `Kbar*(x) = 2 sqrt(2) Kbar(sqrt(2) x) - Kbar(x)` with
/// `Kbar(x) = (mu_2 - x mu_1) K(x) / c0`.
///
/// `K*` integrates to one with vanishing first and second moments, which is
/// what removes the order-`b^2` bias of the plain local linear fit.
#[derive(Clone)]
pub struct JackknifeKernels<S> {
    k_star: KernelFn<S>,
    k_bar_star: KernelFn<S>,
    k_star_at_zero: S,
}

impl<S: Scalar> JackknifeKernels<S> {
    fn derive(base: &KernelSpec<S>) -> Self {
        let sqrt2 = S::of(2.0).sqrt();
        let two_sqrt2 = S::of(2.0) * sqrt2;

        let eval = base.evaluate.clone();
        let k_star: KernelFn<S> =
            Arc::new(move |x: S| two_sqrt2 * eval(sqrt2 * x) - eval(x));

        let eval = base.evaluate.clone();
        let [_, m1, m2, _] = base.moments;
        let (c0, _) = base.constants();
        let k_bar = move |x: S| (m2 - x * m1) * eval(x) / c0;
        let k_bar_star: KernelFn<S> =
            Arc::new(move |x: S| two_sqrt2 * k_bar(sqrt2 * x) - k_bar(x));

        let k_star_at_zero = (two_sqrt2 - S::one()) * base.evaluate(S::zero());
        JackknifeKernels {
            k_star,
            k_bar_star,
            k_star_at_zero,
        }
    }

    /// `K*(x)`; supported on `[-1, 1]`.
    #[inline]
    pub fn k_star(&self, x: S) -> S {
        (self.k_star)(x)
    }

    /// `Kbar*(x)`; supported on `[-1, 1]`, not symmetric.
    #[inline]
    pub fn k_bar_star(&self, x: S) -> S {
        (self.k_bar_star)(x)
    }

    /// `K*(0) = (2 sqrt(2) - 1) K(0)`, used by the GCV denominator.
    #[inline]
    pub fn k_star_at_zero(&self) -> S {
        self.k_star_at_zero
    }
}

impl<S: Scalar> fmt::Debug for JackknifeKernels<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JackknifeKernels")
            .field("k_star_at_zero", &self.k_star_at_zero)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::adaptive_simpson;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn epan() -> KernelSpec<f64> {
        KernelSpec::epanechnikov()
    }

    #[test]
    fn epanechnikov_closed_forms() {
        let k = epan();
        assert_abs_diff_eq!(k.evaluate(0.0), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(k.cdf(0.0), 0.5, epsilon = 1e-15);
        assert_eq!(k.cdf(-1.0), 0.0);
        assert_eq!(k.cdf(1.0), 1.0);
        // mu_0 .. mu_3 against closed-form integration.
        let m = k.moments();
        assert_abs_diff_eq!(m[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 3.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[2], 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(m[3], 1.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn epanechnikov_moments_match_quadrature_oracle() {
        let k = epan();
        for l in 0..4usize {
            let oracle = adaptive_simpson(
                |x: f64| x.powi(l as i32) * 0.75 * (1.0 - x * x),
                0.0,
                1.0,
                1e-13,
            );
            assert_abs_diff_eq!(k.moment(l), oracle, epsilon = 1e-12);
        }
    }

    #[test]
    fn kernel_constants_epanechnikov() {
        let (c0, c2) = epan().constants();
        // 1/20 - 9/256 and 1/100 - 3/256
        assert_abs_diff_eq!(c0, 0.05 - 9.0 / 256.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c2, 0.01 - 3.0 / 256.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c0, 0.0148438, epsilon = 5e-7);
        assert_abs_diff_eq!(c2, -0.0017188, epsilon = 1e-7);
    }

    #[test]
    fn kernel_constants_zero_odd_moments() {
        // A kernel with mu_1 = mu_3 = 0 reduces the constants to products of
        // the even moments. Exercised through a synthetic moment vector.
        let k = KernelSpec {
            name: "synthetic".into(),
            evaluate: Arc::new(|_| 0.0),
            cdf: Arc::new(|_| 0.0),
            moments: [0.5, 0.0, 0.1, 0.0],
        };
        let (c0, c2) = k.constants();
        assert_eq!(c0, 0.5 * 0.1);
        assert_eq!(c2, 0.1 * 0.1);
    }

    #[test]
    fn unit_mass_within_quadrature_tolerance() {
        let k = epan();
        let mass = adaptive_simpson(|x| k.evaluate(x), -1.0, 1.0, 1e-13);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cdf_derivative_matches_kernel() {
        // Finite-difference check of cdf' = K at 101 interior points.
        let k = epan();
        let h = 1e-6;
        let mut max_err: f64 = 0.0;
        for j in 0..=100 {
            let x = -0.99 + 1.98 * j as f64 / 100.0;
            let fd = (k.cdf(x + h) - k.cdf(x - h)) / (2.0 * h);
            max_err = max_err.max((fd - k.evaluate(x)).abs());
        }
        assert!(max_err <= 1e-6, "max error {max_err}");
    }

    #[test]
    fn jackknife_moment_cancellation() {
        let jk = epan().jackknife();
        let tol = 1e-12;
        let mass = adaptive_simpson(|x| jk.k_star(x), -1.0, 1.0, tol);
        let first = adaptive_simpson(|x| x * jk.k_star(x), -1.0, 1.0, tol);
        let second = adaptive_simpson(|x| x * x * jk.k_star(x), -1.0, 1.0, tol);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(first, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(second, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn k_star_at_zero_value() {
        let jk = epan().jackknife();
        assert_abs_diff_eq!(
            jk.k_star_at_zero(),
            (2.0 * 2.0_f64.sqrt() - 1.0) * 0.75,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(jk.k_star_at_zero(), 1.371320, epsilon = 5e-7);
    }

    #[test]
    fn k_star_supported_on_unit_interval() {
        let jk = epan().jackknife();
        assert_eq!(jk.k_star(1.001), 0.0);
        assert_eq!(jk.k_star(-1.2), 0.0);
        assert_eq!(jk.k_bar_star(1.001), 0.0);
    }

    #[test]
    fn custom_kernel_derives_moments_by_quadrature() {
        // Triangular kernel 1 - |x|.
        let k = KernelSpec::from_fn("triangular", |x: f64| 1.0 - x.abs()).unwrap();
        assert_abs_diff_eq!(k.moment(0), 0.5, epsilon = 1e-11);
        assert_abs_diff_eq!(k.moment(1), 1.0 / 6.0, epsilon = 1e-11);
        assert_abs_diff_eq!(k.moment(2), 1.0 / 12.0, epsilon = 1e-11);
        assert_abs_diff_eq!(k.cdf(0.0), 0.5, epsilon = 1e-10);
        assert!(kernel_by_name::<f64>("triangular").is_err());
        assert!(kernel_by_name::<f64>("epanechnikov").is_ok());
    }

    #[test]
    fn custom_kernel_rejects_bad_mass() {
        let err = KernelSpec::from_fn("half", |x: f64| 0.5 * (1.0 - x.abs()));
        assert!(err.is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let k: KernelSpec<f32> = KernelSpec::epanechnikov();
        assert!((k.evaluate(0.0) - 0.75).abs() < 1e-6);
        assert!((k.cdf(0.5) - 0.84375).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn kernel_symmetry(x in -1.5f64..1.5) {
            let k = epan();
            prop_assert!((k.evaluate(x) - k.evaluate(-x)).abs() < 1e-14);
        }

        #[test]
        fn cdf_nondecreasing(a in -1.2f64..1.2, b in -1.2f64..1.2) {
            let k = epan();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(k.cdf(lo) <= k.cdf(hi) + 1e-15);
        }

        #[test]
        fn cdf_complement_symmetry(x in -1.0f64..1.0) {
            // cdf(-x) = 1 - cdf(x) for symmetric kernels.
            let k = epan();
            prop_assert!((k.cdf(-x) - (1.0 - k.cdf(x))).abs() < 1e-12);
        }
    }
}
