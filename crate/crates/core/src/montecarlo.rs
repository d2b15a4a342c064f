//! Seeded, reproducible Monte Carlo SEP estimation.
//!
//! Every trial owns Philox stream `(seed, trial_index)`, so estimates are
//! bit-identical for any thread count and any chunk size; chunks only shape
//! the parallel work split. Per trial the draw order is fixed: symbol index
//! (full-system runs only), channel, then noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_clt, sample_exact, ChannelSample, ChannelStats};
use crate::config::{Constellation, SystemParams};
use crate::detector::{MetricTable, ReceivedSample};
use crate::rng::RandomStream;

/// Which channel model feeds the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMode {
    /// Per-element Rician sampling of the physical model (the default
    /// validation mode; it exercises the Gaussian surrogate itself).
    Exact,
    /// The Gaussian surrogate, isolating moment-matching error from
    /// surrogate error.
    Clt,
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    /// Number of trials (at least one).
    pub trials: u64,
    /// Base seed; trial `i` uses stream `(seed, i)`.
    pub seed: u64,
    pub channel_mode: ChannelMode,
    /// Trials per parallel chunk; clamped into `1..=trials`.
    pub chunk: u64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, channel_mode: ChannelMode) -> Self {
        Self {
            trials: trials.max(1),
            seed,
            channel_mode,
            chunk: 65_536,
        }
    }

    fn effective_chunk(&self) -> u64 {
        self.chunk.clamp(1, self.trials)
    }
}

/// An estimated error probability with its 95% Wilson confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SepEstimate {
    /// `errors / trials`.
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub errors: u64,
    pub trials: u64,
    /// Diagnostic: CLT-mode gain draws clamped at zero.
    pub clamped_draws: u64,
}

impl SepEstimate {
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub fn standard_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    fn from_counts(errors: u64, trials: u64, clamped_draws: u64) -> Self {
        // Wilson interval: stays meaningful at zero or near-zero counts,
        // which dominate high-SNR cells.
        const Z95: f64 = 1.959963984540054;
        let n = trials as f64;
        let p = errors as f64 / n;
        let z_sq = Z95 * Z95;
        let denom = 1.0 + z_sq / n;
        let center = (p + z_sq / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z_sq / (4.0 * n * n)).sqrt() / denom;
        SepEstimate {
            p_hat: p,
            ci_low: (center - half).max(0.0),
            ci_high: (center + half).min(1.0),
            errors,
            trials,
            clamped_draws,
        }
    }
}

fn draw_channel(
    mode: ChannelMode,
    stats: &ChannelStats<f64>,
    params: &SystemParams<f64>,
    rng: &mut RandomStream,
) -> (ChannelSample, bool) {
    match mode {
        ChannelMode::Exact => (sample_exact(params, rng), false),
        ChannelMode::Clt => sample_clt(stats, params, rng),
    }
}

fn received(
    sample: &ChannelSample,
    amplitude: f64,
    params: &SystemParams<f64>,
    rng: &mut RandomStream,
) -> ReceivedSample<f64> {
    let noise_sigma = (params.sigma_n_sq / 2.0).sqrt();
    let (n_re, n_im) = rng.next_normal_pair();
    ReceivedSample {
        re: (sample.cascade_gain + sample.direct_re) * amplitude + noise_sigma * n_re,
        im: sample.direct_im * amplitude + noise_sigma * n_im,
    }
}

fn run_chunked<F>(mc: &McConfig, trial_body: F) -> SepEstimate
where
    F: Fn(u64) -> (bool, bool) + Sync,
{
    let chunk = mc.effective_chunk();
    let n_chunks = mc.trials.div_ceil(chunk);
    let (errors, clamped) = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(mc.trials);
            let mut errors = 0u64;
            let mut clamped = 0u64;
            for trial in start..end {
                let (error, clamp) = trial_body(trial);
                errors += error as u64;
                clamped += clamp as u64;
            }
            (errors, clamped)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    SepEstimate::from_counts(errors, mc.trials, clamped)
}

/// Full-system SEP estimate: per trial, draw a uniform symbol, the channel,
/// and noise; decide with the noncoherent ML rule; count mismatches.
pub fn mc_sep(
    constellation: &Constellation<f64>,
    stats: &ChannelStats<f64>,
    params: &SystemParams<f64>,
    mc: &McConfig,
) -> SepEstimate {
    let order = constellation.order() as u64;
    let table = MetricTable::new(constellation, stats, params);
    let amplitudes: Vec<f64> = (0..constellation.order())
        .map(|m| constellation.amplitude(m))
        .collect();
    run_chunked(mc, |trial| {
        let mut rng = RandomStream::new(mc.seed, trial);
        let symbol = rng.next_index(order) as usize;
        let (sample, clamp) = draw_channel(mc.channel_mode, stats, params, &mut rng);
        let r = received(&sample, amplitudes[symbol], params, &mut rng);
        (table.detect(r) != symbol, clamp)
    })
}

/// Pairwise error estimate: transmit symbol `m` every trial and compare the
/// decision metrics of `m` and `k` only (two-hypothesis test). Metric ties
/// resolve toward the smaller index, matching the detector.
pub fn mc_pairwise(
    m: usize,
    k: usize,
    constellation: &Constellation<f64>,
    stats: &ChannelStats<f64>,
    params: &SystemParams<f64>,
    mc: &McConfig,
) -> SepEstimate {
    assert!(m != k, "pairwise estimation requires two distinct symbols");
    let table = MetricTable::new(constellation, stats, params);
    let amplitude_m = constellation.amplitude(m);
    run_chunked(mc, |trial| {
        let mut rng = RandomStream::new(mc.seed, trial);
        let (sample, clamp) = draw_channel(mc.channel_mode, stats, params, &mut rng);
        let r = received(&sample, amplitude_m, params, &mut rng);
        let metric_m = table.metric(m, r);
        let metric_k = table.metric(k, r);
        let error = metric_k < metric_m || (metric_k == metric_m && k < m);
        (error, clamp)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::compute_stats;

    fn fixture() -> (ChannelStats<f64>, SystemParams<f64>) {
        let params = SystemParams {
            l: 16,
            sigma_h_sq: 1.0,
            sigma_hd_sq: 1.0,
            sigma_n_sq: 1.0,
            k1: 2.0,
            k2: 2.0,
        };
        let stats = compute_stats(&params).unwrap();
        (stats, params)
    }

    #[test]
    fn noiseless_limit_has_zero_errors() {
        // All variances driven to ~zero in surrogate mode: symbols separate
        // perfectly and the estimate must be exactly zero.
        let params = SystemParams {
            l: 64,
            sigma_h_sq: 1.0,
            sigma_hd_sq: 1e-12,
            sigma_n_sq: 1e-12,
            k1: 2.0,
            k2: 2.0,
        };
        let mut stats = compute_stats(&params).unwrap();
        stats.sigma_f_sq = 1e-12;
        let c = Constellation::new(vec![0.0, 1.0, 4.0, 9.0]).unwrap();
        let mc = McConfig::new(100_000, 7, ChannelMode::Clt);
        let est = mc_sep(&c, &stats, &params, &mc);
        assert_eq!(est.errors, 0);
        assert_eq!(est.p_hat, 0.0);
        assert!(est.ci_high > 0.0, "Wilson upper bound stays positive");
    }

    #[test]
    fn estimates_are_invariant_to_chunking() {
        let (stats, params) = fixture();
        let c = Constellation::new(vec![0.0, 0.005, 0.02, 0.045]).unwrap();
        let mut a_cfg = McConfig::new(20_000, 99, ChannelMode::Exact);
        a_cfg.chunk = 1_000;
        let mut b_cfg = a_cfg;
        b_cfg.chunk = 7_777;
        let a = mc_sep(&c, &stats, &params, &a_cfg);
        let b = mc_sep(&c, &stats, &params, &b_cfg);
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
    }

    #[test]
    fn chunk_larger_than_trials_is_clamped() {
        let (stats, params) = fixture();
        let c = Constellation::new(vec![0.0, 0.01]).unwrap();
        let mut oversized = McConfig::new(500, 1, ChannelMode::Exact);
        oversized.chunk = 1_000_000;
        let mut unit = oversized;
        unit.chunk = 1;
        let a = mc_pairwise(1, 0, &c, &stats, &params, &oversized);
        let b = mc_pairwise(1, 0, &c, &stats, &params, &unit);
        assert_eq!(a, b);
    }

    #[test]
    fn same_seed_replays_exactly() {
        let (stats, params) = fixture();
        let c = Constellation::new(vec![0.0, 0.01]).unwrap();
        let mc = McConfig::new(10_000, 3, ChannelMode::Exact);
        let a = mc_pairwise(1, 0, &c, &stats, &params, &mc);
        let b = mc_pairwise(1, 0, &c, &stats, &params, &mc);
        assert_eq!(a, b);
    }

    #[test]
    fn ci_width_shrinks_like_inverse_sqrt_trials() {
        let (stats, params) = fixture();
        let c = Constellation::new(vec![0.0, 0.002, 0.008, 0.018]).unwrap();
        let small = mc_sep(&c, &stats, &params, &McConfig::new(50_000, 11, ChannelMode::Exact));
        let large = mc_sep(&c, &stats, &params, &McConfig::new(200_000, 11, ChannelMode::Exact));
        let ratio = (small.ci_high - small.ci_low) / (large.ci_high - large.ci_low);
        assert!((ratio - 2.0).abs() < 0.4, "quadrupling should halve: {ratio}");
    }

    #[test]
    fn wilson_interval_brackets_the_estimate() {
        let (stats, params) = fixture();
        let c = Constellation::new(vec![0.0, 0.004]).unwrap();
        let est = mc_pairwise(0, 1, &c, &stats, &params, &McConfig::new(5_000, 1, ChannelMode::Exact));
        assert!(est.ci_low <= est.p_hat && est.p_hat <= est.ci_high);
        assert!(est.p_hat == est.errors as f64 / est.trials as f64);
    }

    #[test]
    #[should_panic(expected = "distinct symbols")]
    fn pairwise_rejects_identical_indices() {
        let (stats, params) = fixture();
        let c = Constellation::new(vec![0.0, 1.0]).unwrap();
        mc_pairwise(1, 1, &c, &stats, &params, &McConfig::new(10, 1, ChannelMode::Exact));
    }

    #[test]
    fn clt_mode_counts_clamps() {
        // Zero-mean surrogate clamps about half of the draws.
        let params = SystemParams {
            l: 8,
            sigma_h_sq: 1.0,
            sigma_hd_sq: 1.0,
            sigma_n_sq: 1.0,
            k1: 0.0,
            k2: 0.0,
        };
        let stats = ChannelStats {
            alpha: 0.0,
            beta: 1.0,
            mu_f: 0.0,
            sigma_f_sq: 1.0,
        };
        let c = Constellation::new(vec![0.0, 1.0]).unwrap();
        let est = mc_sep(&c, &stats, &params, &McConfig::new(4_000, 5, ChannelMode::Clt));
        assert!(
            (1_500..2_500).contains(&est.clamped_draws),
            "clamps {}",
            est.clamped_draws
        );
    }
}
