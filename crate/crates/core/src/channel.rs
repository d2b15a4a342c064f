//! Cascaded-channel statistics and exact physical-channel sampling.
//!
//! After RIS phase alignment the effective channel is
//! `g = sum_l |h_1l| |h_2l| + h_d`. The sum of magnitude products is
//! approximated for analysis as Gaussian with moments derived from the
//! per-element Rician statistics; the exact sampler draws every element.

use serde::{Deserialize, Serialize};

use crate::config::SystemParams;
use crate::rng::RandomStream;
use crate::scalar::{real, Real};
use crate::specfun::{laguerre_half, SpecFunError};

/// Gaussian surrogate statistics of the cascade gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats<T = f64> {
    /// Mean coefficient: `mu_f = alpha sigma_h^2`.
    pub alpha: T,
    /// Variance coefficient: `sigma_f^2 = beta sigma_h^4`.
    pub beta: T,
    /// Cascade-gain mean.
    pub mu_f: T,
    /// Cascade-gain variance.
    pub sigma_f_sq: T,
}

/// One draw of the physical channel, after RIS phase alignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample {
    /// `sum_l |h_1l| |h_2l|`, always non-negative.
    pub cascade_gain: f64,
    /// Real part of the direct channel.
    pub direct_re: f64,
    /// Imaginary part of the direct channel.
    pub direct_im: f64,
}

/// Moments of the aligned cascade gain.
///
/// ```
/// use risask_core::{channel::compute_stats, SystemParams64};
///
/// let params = SystemParams64 {
///     l: 64, sigma_h_sq: 1.0, sigma_hd_sq: 1.0, sigma_n_sq: 1.0,
///     k1: 0.0, k2: 0.0,
/// };
/// let stats = compute_stats(&params).unwrap();
/// // With no line of sight the Laguerre factors collapse to one:
/// assert!((stats.alpha - 16.0 * std::f64::consts::PI).abs() < 1e-12);
/// ```
pub fn compute_stats<T: Real>(params: &SystemParams<T>) -> Result<ChannelStats<T>, SpecFunError> {
    let l = real::<T>(params.l as f64);
    let lag1 = laguerre_half(-params.k1)?;
    let lag2 = laguerre_half(-params.k2)?;
    let quarter_pi = T::PI() / real(4.0);
    let alpha = l * quarter_pi * lag1 * lag2;
    let beta = l
        * ((T::one() + params.k1) * (T::one() + params.k2)
            - quarter_pi * quarter_pi * lag1 * lag1 * lag2 * lag2);
    let sh2 = params.sigma_h_sq;
    Ok(ChannelStats {
        alpha,
        beta,
        mu_f: alpha * sh2,
        sigma_f_sq: beta * sh2 * sh2,
    })
}

/// Draws the exact channel: per element `h_il ~ CN(|mu_i|, sigma_h^2)` with
/// independent real/imaginary parts of variance `sigma_h^2 / 2`, plus
/// `h_d ~ CN(0, sigma_hd^2)`.
///
/// Draw order (fixed for reproducibility): for each element, one normal pair
/// for `h_1l` then one for `h_2l`; finally one pair for `h_d`.
pub fn sample_exact(params: &SystemParams<f64>, rng: &mut RandomStream) -> ChannelSample {
    let mean1 = params.mean_1();
    let mean2 = params.mean_2();
    let comp_sigma = (params.sigma_h_sq / 2.0).sqrt();
    let mut gain = 0.0;
    for _ in 0..params.l {
        let (re1, im1) = rng.next_normal_pair();
        let (re2, im2) = rng.next_normal_pair();
        let h1_re = mean1 + comp_sigma * re1;
        let h1_im = comp_sigma * im1;
        let h2_re = mean2 + comp_sigma * re2;
        let h2_im = comp_sigma * im2;
        // |h1| |h2| = sqrt(|h1|^2 |h2|^2); one root per element
        gain += ((h1_re * h1_re + h1_im * h1_im) * (h2_re * h2_re + h2_im * h2_im)).sqrt();
    }
    let (direct_re, direct_im) = direct_pair(params, rng);
    ChannelSample {
        cascade_gain: gain,
        direct_re,
        direct_im,
    }
}

/// Draws the Gaussian-surrogate channel: `gain ~ N(mu_f, sigma_f^2)` clamped
/// at zero, plus the direct channel. The returned flag reports whether the
/// clamp fired (probability below 1e-6 at the element counts of interest).
pub fn sample_clt(
    stats: &ChannelStats<f64>,
    params: &SystemParams<f64>,
    rng: &mut RandomStream,
) -> (ChannelSample, bool) {
    let (z, _) = rng.next_normal_pair();
    let raw = stats.mu_f + stats.sigma_f_sq.sqrt() * z;
    let clamped = raw < 0.0;
    let (direct_re, direct_im) = direct_pair(params, rng);
    (
        ChannelSample {
            cascade_gain: if clamped { 0.0 } else { raw },
            direct_re,
            direct_im,
        },
        clamped,
    )
}

fn direct_pair(params: &SystemParams<f64>, rng: &mut RandomStream) -> (f64, f64) {
    let sigma = (params.sigma_hd_sq / 2.0).sqrt();
    let (re, im) = rng.next_normal_pair();
    (sigma * re, sigma * im)
}
