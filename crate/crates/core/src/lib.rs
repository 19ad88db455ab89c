//! Detection of relevant changes in the mean of a non-stationary time
//! series.
//!
//! The library estimates the fraction of time `T_c` at which a smoothly
//! varying mean trend deviates from its initial value by more than a level
//! `c`, and tests `H0: T_c <= Delta` with a Gaussian-multiplier calibration.
//! The pipeline is
//!
//! 1. [`regression`] — bias-corrected (Jackknife) local linear estimation of
//!    the mean, with GCV bandwidth selection against a banded covariance
//!    estimate of the error process;
//! 2. [`excess`] — kernel-smoothed excess-measure statistics built from the
//!    fitted mean curve;
//! 3. [`lrv`] — difference-based estimation of the time-varying long-run
//!    variance;
//! 4. [`testing`] — the test decision from the closed-form multiplier
//!    variance, with [`theory`] providing asymptotic-variance oracles;
//! 5. [`simulate`] — locally stationary data generators and the Monte Carlo
//!    harness; [`multivar`] and [`sojourn`] extend the test to vector data
//!    and sojourn-time measures.
//!
//! Everything numeric is generic over a floating [`Scalar`] (`f32`/`f64`);
//! `f64` type aliases are exported at the crate root.

pub mod error;
pub mod excess;
pub mod kernels;
pub mod numeric;
pub mod regression;
mod scalar;

pub use error::{Error, Result};
pub use kernels::{kernel_by_name, JackknifeKernels, KernelSpec};
pub use regression::{MeanFit, TimeSeries};
pub use scalar::Scalar;

/// Default-precision aliases.
pub type KernelSpecF64 = KernelSpec<f64>;
pub type TimeSeriesF64 = TimeSeries<f64>;
pub type MeanFitF64 = MeanFit<f64>;
