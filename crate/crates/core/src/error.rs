use thiserror::Error;

/// Errors surfaced by the estimation and testing routines.
///
/// Numeric payloads are carried as `f64` so the error type stays independent
/// of the scalar parameter.
#[derive(Debug, Error)]
pub enum Error {
    /// The weighted design matrix of a local linear fit is singular; the
    /// bandwidth leaves fewer than two distinct points with positive weight.
    #[error("degenerate local-linear window at t = {t} (bandwidth {bandwidth})")]
    DegenerateWindow { t: f64, bandwidth: f64 },

    /// Every candidate bandwidth offered to GCV produced a degenerate fit.
    #[error("all GCV candidate bandwidths produced degenerate fits")]
    AllCandidatesDegenerate,

    /// Average-trend comparisons need a split point strictly inside (0, 1).
    #[error("average-trend split t0 = {t0} outside (0, 1)")]
    InvalidWindow { t0: f64 },

    /// The anchor value is too close to zero for a relative excess measure.
    #[error("baseline |mu(0)| = {baseline:e} at or below floor {floor:e}")]
    ZeroBaseline { baseline: f64, floor: f64 },

    /// Long-run variance tuning parameters outside their admissible range.
    #[error("invalid long-run variance tuning: {reason}")]
    InvalidTuning { reason: String },

    /// Minimal-volatility selection needs a +-2 neighbourhood in each grid.
    #[error("minimal-volatility grids need >= 5 entries each, got {m_len} x {tau_len}")]
    GridTooSmall { m_len: usize, tau_len: usize },

    /// Regular-case variance formulas require non-vanishing first derivatives.
    #[error("zero first derivative at critical root t = {t}")]
    ZeroDerivative { t: f64 },

    /// A kernel failed its construction-time checks (symmetry, mass one).
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// Mutually inconsistent or out-of-range configuration values.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Input series violating basic requirements (length, finiteness).
    #[error("invalid series: {0}")]
    InvalidSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
