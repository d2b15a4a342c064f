//! Optimal noncoherent ML symbol detection.
//!
//! Conditioned on energy `E`, the received signal has independent Gaussian
//! real and imaginary parts with
//! `Var(Re) = B/2`, `B = (2 sigma_f^2 + sigma_hd^2) E + sigma_n^2` and
//! `Var(Im) = D/2`, `D = sigma_hd^2 E + sigma_n^2`. Minimizing the negative
//! log-likelihood (constants dropped) gives the decision metric below.

use crate::channel::ChannelStats;
use crate::config::{Constellation, SystemParams};
use crate::scalar::{real, Real};

/// A complex received sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedSample<T = f64> {
    pub re: T,
    pub im: T,
}

/// Per-symbol variance terms `(B, D)` for energy `E`.
#[inline]
pub(crate) fn variance_terms<T: Real>(
    energy: T,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> (T, T) {
    let two = real::<T>(2.0);
    let b = (two * stats.sigma_f_sq + params.sigma_hd_sq) * energy + params.sigma_n_sq;
    let d = params.sigma_hd_sq * energy + params.sigma_n_sq;
    (b, d)
}

/// Noncoherent ML decision metric for one candidate energy; the decision is
/// the metric's argmin over the constellation.
///
/// `(Re r - mu_f sqrt(E))^2 / B + (Im r)^2 / D + ln(B)/2 + ln(D)/2`
pub fn decision_metric<T: Real>(
    r: ReceivedSample<T>,
    energy: T,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> T {
    let (b, d) = variance_terms(energy, stats, params);
    let re_shift = r.re - stats.mu_f * energy.sqrt();
    let half = real::<T>(0.5);
    re_shift * re_shift / b + r.im * r.im / d + half * (b.ln() + d.ln())
}

/// ML decision: index (zero-based) of the metric-minimizing symbol.
/// Ties break toward the smaller index.
pub fn detect<T: Real>(
    r: ReceivedSample<T>,
    constellation: &Constellation<T>,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> usize {
    let mut best = 0;
    let mut best_metric = decision_metric(r, constellation.energy(0), stats, params);
    for m in 1..constellation.order() {
        let metric = decision_metric(r, constellation.energy(m), stats, params);
        if metric < best_metric {
            best = m;
            best_metric = metric;
        }
    }
    best
}

/// Per-symbol metric constants, precomputed once per constellation.
///
/// The variance and log terms do not depend on the received sample, so
/// Monte Carlo loops build this table once and decide millions of samples
/// against it. Equivalent to [`decision_metric`] / [`detect`] exactly.
#[derive(Debug, Clone)]
pub struct MetricTable<T = f64> {
    symbols: Vec<SymbolTerms<T>>,
}

#[derive(Debug, Clone, Copy)]
struct SymbolTerms<T> {
    mean: T,
    b: T,
    d: T,
    log_term: T,
}

impl<T: Real> MetricTable<T> {
    pub fn new(
        constellation: &Constellation<T>,
        stats: &ChannelStats<T>,
        params: &SystemParams<T>,
    ) -> Self {
        let half = real::<T>(0.5);
        let symbols = (0..constellation.order())
            .map(|m| {
                let energy = constellation.energy(m);
                let (b, d) = variance_terms(energy, stats, params);
                SymbolTerms {
                    mean: stats.mu_f * energy.sqrt(),
                    b,
                    d,
                    log_term: half * (b.ln() + d.ln()),
                }
            })
            .collect();
        Self { symbols }
    }

    pub fn order(&self) -> usize {
        self.symbols.len()
    }

    /// Metric of symbol `index` for sample `r`.
    #[inline]
    pub fn metric(&self, index: usize, r: ReceivedSample<T>) -> T {
        let s = &self.symbols[index];
        let re_shift = r.re - s.mean;
        re_shift * re_shift / s.b + r.im * r.im / s.d + s.log_term
    }

    /// Metric-minimizing symbol; ties toward the smaller index.
    #[inline]
    pub fn detect(&self, r: ReceivedSample<T>) -> usize {
        let mut best = 0;
        let mut best_metric = self.metric(0, r);
        for m in 1..self.symbols.len() {
            let metric = self.metric(m, r);
            if metric < best_metric {
                best = m;
                best_metric = metric;
            }
        }
        best
    }
}
