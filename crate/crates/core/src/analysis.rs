//! Closed-form error analysis: pairwise error probabilities through a Gamma
//! moment-matching approximation, and the SEP union bound.
//!
//! Deciding `k` over the transmitted `m` is the event that a weighted sum of
//! a noncentral and a central chi-squared variable crosses a threshold. The
//! weighted sum `Z = eta X^2 + delta Y^2` is approximated by a Gamma law with
//! matched first and second moments, so each pairwise probability reduces to
//! one regularized incomplete gamma evaluation.

use thiserror::Error;

use crate::channel::ChannelStats;
use crate::config::{Constellation, SystemParams};
use crate::detector::variance_terms;
use crate::scalar::{real, Real};
use crate::specfun::{gamma_lower_reg, SpecFunError};

/// Shape/scale pair of the fitted Gamma law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams<T = f64> {
    /// Shape.
    pub zeta: T,
    /// Scale.
    pub theta: T,
}

/// Which side of the threshold constitutes the error event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventSense {
    /// Error when `Z > threshold` (transmitted symbol below the competitor).
    Above,
    /// Error when `Z < threshold` (transmitted symbol above the competitor).
    Below,
}

/// How the event threshold maps onto the Gamma CDF argument.
///
/// A Gamma CDF takes the raw threshold divided by the scale exactly once;
/// that is `ScaleOnce`, the default, and it is validated against pairwise
/// Monte Carlo. `ScaleTwice` divides by the scale a second time and exists
/// only as a negative control: enabling it must make that validation fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdConvention {
    #[default]
    ScaleOnce,
    ScaleTwice,
}

/// Geometry of one ordered symbol pair `(m, k)`: quadratic-form weights,
/// Gaussian moments, and the event threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry<T = f64> {
    pub b_m: T,
    pub b_k: T,
    pub d_m: T,
    pub d_k: T,
    /// Mean of the shifted real-part Gaussian.
    pub mu_x: T,
    /// Variance of the real-part Gaussian, `B_m / 2`.
    pub sigma_x_sq: T,
    /// Variance of the imaginary-part Gaussian, `D_m / 2`.
    pub sigma_y_sq: T,
    /// Weight of the squared real part; positive in both orderings.
    pub eta: T,
    /// Weight of the squared imaginary part; positive in both orderings.
    pub delta: T,
    /// Right-hand side of the probability event.
    pub threshold: T,
    pub sense: EventSense,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("pairwise geometry requires two distinct symbols")]
    IdenticalSymbols,
    #[error("symbol index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("moment matching is degenerate: both weighted variances vanish")]
    DegenerateMoments,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Fits a Gamma law to `Z = eta X^2 + delta Y^2` with `X ~ N(mu_x, sigma_x^2)`
/// and `Y ~ N(0, sigma_y^2)` by matching the first two moments:
///
/// `zeta theta   = eta (sigma_x^2 + mu_x^2) + delta sigma_y^2`
/// `zeta theta^2 = 2 eta^2 sigma_x^2 (sigma_x^2 + 2 mu_x^2) + 2 delta^2 sigma_y^4`
pub fn gamma_approx<T: Real>(
    mu_x: T,
    sigma_x_sq: T,
    sigma_y_sq: T,
    eta: T,
    delta: T,
) -> Result<GammaParams<T>, AnalysisError> {
    let two = real::<T>(2.0);
    let mean = eta * (sigma_x_sq + mu_x * mu_x) + delta * sigma_y_sq;
    let variance = two * eta * eta * sigma_x_sq * (sigma_x_sq + two * mu_x * mu_x)
        + two * delta * delta * sigma_y_sq * sigma_y_sq;
    let degenerate = |v: T| v <= T::zero() || v.is_nan();
    if degenerate(mean) || degenerate(variance) {
        return Err(AnalysisError::DegenerateMoments);
    }
    Ok(GammaParams {
        zeta: mean * mean / variance,
        theta: variance / mean,
    })
}

/// Quadratic-form geometry of the ordered pair `(m, k)`, zero-based.
pub fn pair_geometry<T: Real>(
    m: usize,
    k: usize,
    constellation: &Constellation<T>,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> Result<PairGeometry<T>, AnalysisError> {
    let order = constellation.order();
    for index in [m, k] {
        if index >= order {
            return Err(AnalysisError::IndexOutOfRange { index, order });
        }
    }
    if m == k {
        return Err(AnalysisError::IdenticalSymbols);
    }
    let e_m = constellation.energy(m);
    let e_k = constellation.energy(k);
    if e_m == e_k {
        return Err(AnalysisError::IdenticalSymbols);
    }
    let (b_m, d_m) = variance_terms(e_m, stats, params);
    let (b_k, d_k) = variance_terms(e_k, stats, params);
    let s_m = e_m.sqrt();
    let s_k = e_k.sqrt();
    let half = real::<T>(0.5);
    let mu_f = stats.mu_f;
    // Mean of the completed-square Gaussian; its sign is immaterial because
    // only mu_x^2 enters the moment match.
    let mu_x = -(mu_f * b_m * (s_m - s_k)) / (b_m - b_k);
    let (eta, delta, threshold, sense) = if e_m < e_k {
        (
            b_m.recip() - b_k.recip(),
            d_m.recip() - d_k.recip(),
            half * ((b_k * d_k) / (b_m * d_m)).ln()
                + mu_f * mu_f * (s_k - s_m) * (s_k - s_m) / (b_k - b_m),
            EventSense::Above,
        )
    } else {
        (
            b_k.recip() - b_m.recip(),
            d_k.recip() - d_m.recip(),
            half * ((b_m * d_m) / (b_k * d_k)).ln()
                + mu_f * mu_f * (s_m - s_k) * (s_m - s_k) / (b_m - b_k),
            EventSense::Below,
        )
    };
    Ok(PairGeometry {
        b_m,
        b_k,
        d_m,
        d_k,
        mu_x,
        sigma_x_sq: half * b_m,
        sigma_y_sq: half * d_m,
        eta,
        delta,
        threshold,
        sense,
    })
}

/// Pairwise error probability of deciding `k` when `m` was sent, under the
/// default threshold convention.
pub fn pep<T: Real>(
    m: usize,
    k: usize,
    constellation: &Constellation<T>,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> Result<T, AnalysisError> {
    pep_with(
        ThresholdConvention::ScaleOnce,
        m,
        k,
        constellation,
        stats,
        params,
    )
}

/// [`pep`] with an explicit threshold convention (see
/// [`ThresholdConvention`]).
pub fn pep_with<T: Real>(
    convention: ThresholdConvention,
    m: usize,
    k: usize,
    constellation: &Constellation<T>,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> Result<T, AnalysisError> {
    let geometry = pair_geometry(m, k, constellation, stats, params)?;
    let gamma = gamma_approx(
        geometry.mu_x,
        geometry.sigma_x_sq,
        geometry.sigma_y_sq,
        geometry.eta,
        geometry.delta,
    )?;
    // Z >= 0 almost surely, so a (rounding-induced) negative threshold pins
    // the CDF at zero.
    let raw = geometry.threshold.max(T::zero());
    let arg = match convention {
        ThresholdConvention::ScaleOnce => raw / gamma.theta,
        ThresholdConvention::ScaleTwice => raw / (gamma.theta * gamma.theta),
    };
    let cdf = gamma_lower_reg(gamma.zeta, arg)?;
    let p = match geometry.sense {
        EventSense::Above => T::one() - cdf,
        EventSense::Below => cdf,
    };
    Ok(p.max(T::zero()).min(T::one()))
}

/// Union bound on the symbol error probability:
/// `(1/M) sum_m sum_{k != m} P(m -> k)`. The raw value may exceed one at low
/// SNR; clamp at the reporting layer when a probability is needed.
pub fn sep_union_bound<T: Real>(
    constellation: &Constellation<T>,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> Result<T, AnalysisError> {
    sep_union_bound_with(ThresholdConvention::ScaleOnce, constellation, stats, params)
}

/// [`sep_union_bound`] with an explicit threshold convention.
pub fn sep_union_bound_with<T: Real>(
    convention: ThresholdConvention,
    constellation: &Constellation<T>,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> Result<T, AnalysisError> {
    let order = constellation.order();
    let mut total = T::zero();
    for m in 0..order {
        for k in 0..order {
            if k != m {
                total = total + pep_with(convention, m, k, constellation, stats, params)?;
            }
        }
    }
    Ok(total / real(order as f64))
}
