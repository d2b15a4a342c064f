//! Energy-constrained optimal ASK constellation design.
//!
//! The design target is the common adjacent-pair error probability `t`:
//! starting from `E_1 = 0`, each next energy is placed so the probability of
//! confusing a symbol with its lower neighbour equals `t`. The outer loop
//! bisects on `t` until the mean symbol energy meets the budget, using the
//! fact that the required mean energy grows as `t` shrinks.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{pep, AnalysisError};
use crate::channel::ChannelStats;
use crate::config::{ConfigError, Constellation, SystemParams};
use crate::scalar::{real, Real};

/// Default tolerance: absolute on the bisection interval, relative on the
/// energy constraint. The energy misfit bottoms out near 1e-12 relative
/// (set by the precision of the pairwise-error evaluations the roots are
/// solved against), so the default keeps two orders of margin above that
/// floor.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Iteration cap for the outer bisection.
const MAX_BISECTION_ITERS: u32 = 200;

/// Iteration cap for the per-symbol root finder. The bisection runs until
/// the midpoint is no longer representable strictly inside the bracket, so
/// the root carries full double precision; 200 steps always suffice from
/// the widest bracket the growth loop can produce.
const MAX_ROOT_ITERS: u32 = 200;

/// Growth cap while bracketing a root from above.
const MAX_BRACKET_DOUBLINGS: u32 = 60;

/// Average SNR target and the per-symbol energy budget it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBudget<T = f64> {
    /// Target average SNR per symbol (linear).
    pub gamma_av: T,
    /// Mean energy budget `C = sigma_n^2 gamma_av / ((alpha^2 + beta) sigma_h^4 + sigma_hd^2)`.
    pub c: T,
}

/// Mean received channel power `(alpha^2 + beta) sigma_h^4 + sigma_hd^2`
/// (equivalently `mu_f^2 + sigma_f^2 + sigma_hd^2`).
pub fn average_channel_power<T: Real>(stats: &ChannelStats<T>, params: &SystemParams<T>) -> T {
    let sh2 = params.sigma_h_sq;
    (stats.alpha * stats.alpha + stats.beta) * sh2 * sh2 + params.sigma_hd_sq
}

/// Per-symbol SNR `Gamma_m = ((alpha^2 + beta) sigma_h^4 + sigma_hd^2) E_m / sigma_n^2`.
pub fn per_symbol_snr<T: Real>(energy: T, stats: &ChannelStats<T>, params: &SystemParams<T>) -> T {
    average_channel_power(stats, params) * energy / params.sigma_n_sq
}

impl<T: Real> EnergyBudget<T> {
    /// Budget for a target average SNR per symbol (linear scale).
    pub fn from_average_snr(
        gamma_av: T,
        stats: &ChannelStats<T>,
        params: &SystemParams<T>,
    ) -> Result<Self, OptimizeError> {
        if gamma_av <= T::zero() || !gamma_av.is_finite() {
            return Err(OptimizeError::InvalidBudget);
        }
        Ok(Self {
            gamma_av,
            c: params.sigma_n_sq * gamma_av / average_channel_power(stats, params),
        })
    }
}

/// Why no energy level can hit the requested pairwise error target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleKind {
    /// Even the closest admissible spacing has a pairwise error below `t`.
    TargetTooHigh,
    /// No finite bracket reached a pairwise error down at `t`.
    TargetTooLow,
}

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("constellation order must be at least 2")]
    OrderTooSmall,
    #[error("pairwise error target must lie strictly inside (0, 1)")]
    InvalidTarget,
    #[error("energy budget must be positive and finite")]
    InvalidBudget,
    /// Not an abort: the requested `t` has no admissible constellation.
    #[error("design infeasible for symbol {symbol}: {kind:?}")]
    Infeasible { symbol: usize, kind: InfeasibleKind },
    #[error("root finder did not converge for symbol {symbol}")]
    RootNoConvergence { symbol: usize },
    #[error("bisection produced no feasible iterate")]
    NoFeasibleIterate,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Constellation(#[from] ConfigError),
}

/// Result of [`bisection_optimize`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerResult<T: Real = f64> {
    /// The designed constellation (`E_1 = 0`).
    #[serde(rename = "energies")]
    pub constellation: Constellation<T>,
    /// Equalized adjacent pairwise error probability.
    pub t_star: T,
    /// Outer bisection iterations executed.
    pub iterations: u32,
    /// Mean energy of the returned constellation.
    pub achieved_energy: T,
    /// Both the interval and the energy tolerance were met.
    pub converged: bool,
}

/// Traditional equispaced one-sided ASK: amplitudes `sqrt(E_m) = (m-1) d`
/// with `d` normalized so the mean energy matches the budget exactly.
///
/// ```
/// use risask_core::optimizer::{traditional_ask, EnergyBudget};
///
/// let budget = EnergyBudget { gamma_av: 1.0, c: 3.5 };
/// let c = traditional_ask(4, &budget).unwrap();
/// assert_eq!(c.energies(), &[0.0, 1.0, 4.0, 9.0]);
/// ```
pub fn traditional_ask<T: Real>(
    order: usize,
    budget: &EnergyBudget<T>,
) -> Result<Constellation<T>, OptimizeError> {
    if order < 2 {
        return Err(OptimizeError::OrderTooSmall);
    }
    if budget.c <= T::zero() || !budget.c.is_finite() {
        return Err(OptimizeError::InvalidBudget);
    }
    let sum_squares: f64 = (0..order).map(|m| (m * m) as f64).sum();
    let d_sq = real::<T>(order as f64) * budget.c / real(sum_squares);
    let energies = (0..order)
        .map(|m| real::<T>((m * m) as f64) * d_sq)
        .collect();
    Ok(Constellation::new(energies)?)
}

/// Probability of confusing symbol `m` with its lower neighbour, as a
/// function of the candidate upper energy.
fn adjacent_pep<T: Real>(
    lower: T,
    upper: T,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> Result<T, AnalysisError> {
    let pair = Constellation::new(vec![lower, upper]).expect("bracketing keeps upper > lower");
    pep(1, 0, &pair, stats, params)
}

/// Places `E_2 .. E_M` above `E_1 = 0` so every adjacent downward pairwise
/// error equals `t`. Signals infeasibility (not an abort) when `t` is outside
/// the attainable range for some symbol.
pub fn constellation_design<T: Real>(
    t: T,
    order: usize,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> Result<Constellation<T>, OptimizeError> {
    if order < 2 {
        return Err(OptimizeError::OrderTooSmall);
    }
    if t <= T::zero() || t >= T::one() || t.is_nan() {
        return Err(OptimizeError::InvalidTarget);
    }
    let mut energies = Vec::with_capacity(order);
    energies.push(T::zero());
    for symbol in 1..order {
        let previous = energies[symbol - 1];
        let next = solve_adjacent_energy(t, previous, symbol, stats, params)?;
        energies.push(next);
    }
    Ok(Constellation::new(energies)?)
}

/// Root of `pep(upper vs lower) = t` in the upper energy, by bracketed
/// bisection with geometric bracket growth. The pairwise error decreases
/// from its supremum (at vanishing spacing) toward zero, so a sign change
/// brackets the root whenever `t` is attainable.
fn solve_adjacent_energy<T: Real>(
    t: T,
    previous: T,
    symbol: usize,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
) -> Result<T, OptimizeError> {
    let unit = previous.max(T::one());
    let mut lo = previous + unit * real(1e-13);
    if adjacent_pep(previous, lo, stats, params)? < t {
        return Err(OptimizeError::Infeasible {
            symbol,
            kind: InfeasibleKind::TargetTooHigh,
        });
    }
    let mut hi = previous + unit;
    let mut bracketed = false;
    for _ in 0..=MAX_BRACKET_DOUBLINGS {
        if adjacent_pep(previous, hi, stats, params)? < t {
            bracketed = true;
            break;
        }
        lo = hi;
        hi = previous + (hi - previous) * real(2.0);
    }
    if !bracketed {
        return Err(OptimizeError::Infeasible {
            symbol,
            kind: InfeasibleKind::TargetTooLow,
        });
    }
    for _ in 0..MAX_ROOT_ITERS {
        let mid = (lo + hi) / real(2.0);
        if mid <= lo || mid >= hi {
            return Ok(mid); // interval exhausted at this precision
        }
        if adjacent_pep(previous, mid, stats, params)? >= t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(OptimizeError::RootNoConvergence { symbol })
}

/// Finds the constellation whose mean energy meets the budget by bisecting
/// on the pairwise error target.
///
/// The mean energy required by [`constellation_design`] is decreasing in
/// `t`, so the interval updates are `t_high <- t` when the design undershoots
/// the budget and `t_low <- t` otherwise. Iteration stops when the interval
/// is below `eps` (absolute) and the energy misfit below `eps` (relative),
/// or after the cap; the flag on the result records which.
pub fn bisection_optimize<T: Real>(
    order: usize,
    budget: &EnergyBudget<T>,
    stats: &ChannelStats<T>,
    params: &SystemParams<T>,
    eps: T,
) -> Result<OptimizerResult<T>, OptimizeError> {
    if order < 2 {
        return Err(OptimizeError::OrderTooSmall);
    }
    if budget.c <= T::zero() || !budget.c.is_finite() {
        return Err(OptimizeError::InvalidBudget);
    }
    let mut t_low = T::zero();
    let mut t_high = T::one();
    let mut best: Option<(Constellation<T>, T, T)> = None; // (c, t, mean)
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_BISECTION_ITERS {
        let t = (t_low + t_high) / real(2.0);
        if t <= t_low || t >= t_high {
            break; // interval exhausted at this precision
        }
        iterations += 1;
        match constellation_design(t, order, stats, params) {
            Ok(c) => {
                let mean = c.mean_energy();
                let misfit = ((mean - budget.c) / budget.c).abs();
                if best
                    .as_ref()
                    .map(|(_, _, m)| ((*m - budget.c) / budget.c).abs() > misfit)
                    .unwrap_or(true)
                {
                    best = Some((c, t, mean));
                }
                if mean < budget.c {
                    t_high = t;
                } else {
                    t_low = t;
                }
                if (t_high - t_low) < eps && misfit < eps {
                    converged = true;
                    break;
                }
            }
            // Unattainably high target collapses the constellation (mean
            // energy short of budget), unattainably low explodes it.
            Err(OptimizeError::Infeasible { kind, .. }) => match kind {
                InfeasibleKind::TargetTooHigh => t_high = t,
                InfeasibleKind::TargetTooLow => t_low = t,
            },
            Err(other) => return Err(other),
        }
    }
    let (constellation, t_star, mean) = best.ok_or(OptimizeError::NoFeasibleIterate)?;
    Ok(OptimizerResult {
        constellation,
        t_star,
        iterations,
        achieved_energy: mean,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::compute_stats;

    fn fixture() -> (ChannelStats<f64>, SystemParams<f64>) {
        let params = SystemParams {
            l: 64,
            sigma_h_sq: 1.0,
            sigma_hd_sq: 1.0,
            sigma_n_sq: 1.0,
            k1: 2.0,
            k2: 2.0,
        };
        let stats = compute_stats(&params).unwrap();
        (stats, params)
    }

    fn budget_at_db(db: f64, stats: &ChannelStats<f64>, params: &SystemParams<f64>) -> EnergyBudget {
        EnergyBudget::from_average_snr(10f64.powf(db / 10.0), stats, params).unwrap()
    }

    #[test]
    fn traditional_examples() {
        let c = traditional_ask(4, &EnergyBudget { gamma_av: 1.0, c: 3.5 }).unwrap();
        assert_eq!(c.energies(), &[0.0, 1.0, 4.0, 9.0]);
        assert_eq!(c.mean_energy(), 3.5);

        let c2 = traditional_ask(2, &EnergyBudget { gamma_av: 1.0, c: 0.5 }).unwrap();
        assert_eq!(c2.energies(), &[0.0, 1.0]);
    }

    #[test]
    fn traditional_meets_budget_exactly() {
        for order in 2..=9 {
            for c in [0.013f64, 1.0, 47.5] {
                let budget = EnergyBudget { gamma_av: 1.0, c };
                let cons = traditional_ask(order, &budget).unwrap();
                assert!(
                    (cons.mean_energy() - c).abs() <= 1e-12 * c,
                    "order {order} budget {c}"
                );
            }
        }
    }

    #[test]
    fn design_hits_the_target_on_every_adjacent_pair() {
        let (stats, params) = fixture();
        let c = constellation_design(0.05, 4, &stats, &params).unwrap();
        assert_eq!(c.energy(0), 0.0);
        for m in 1..4 {
            let p = pep(m, m - 1, &c, &stats, &params).unwrap();
            assert!((p - 0.05).abs() / 0.05 < 1e-9, "pair {m}: {p}");
        }
    }

    #[test]
    fn design_energies_shrink_as_target_grows() {
        let (stats, params) = fixture();
        let mut prev: Option<Vec<f64>> = None;
        for t in [0.01, 0.05, 0.1, 0.2, 0.3] {
            let c = constellation_design(t, 4, &stats, &params).unwrap();
            if let Some(p) = prev {
                for (a, b) in c.energies().iter().zip(&p) {
                    assert!(a <= b, "t {t}");
                }
            }
            prev = Some(c.energies().to_vec());
        }
    }

    #[test]
    fn design_rejects_unattainable_targets() {
        let (stats, params) = fixture();
        match constellation_design(0.9, 4, &stats, &params) {
            Err(OptimizeError::Infeasible {
                kind: InfeasibleKind::TargetTooHigh,
                ..
            }) => {}
            other => panic!("expected infeasible-high, got {other:?}"),
        }
        assert!(constellation_design(0.0, 4, &stats, &params).is_err());
        assert!(constellation_design(1.0, 4, &stats, &params).is_err());
    }

    #[test]
    fn bisection_meets_budget_and_equalizes() {
        let (stats, params) = fixture();
        let budget = budget_at_db(15.0, &stats, &params);
        let out = bisection_optimize(4, &budget, &stats, &params, DEFAULT_EPS).unwrap();
        assert!(out.converged);
        assert_eq!(out.constellation.energy(0), 0.0);
        let misfit = ((out.achieved_energy - budget.c) / budget.c).abs();
        assert!(misfit <= 1e-9, "misfit {misfit:.2e}");
        for m in 1..4 {
            let p = pep(m, m - 1, &out.constellation, &stats, &params).unwrap();
            assert!(
                (p - out.t_star).abs() / out.t_star <= 1e-6,
                "pair {m}: {p} vs t* {}",
                out.t_star
            );
        }
    }

    #[test]
    fn bisection_is_bit_deterministic() {
        let (stats, params) = fixture();
        let budget = budget_at_db(20.0, &stats, &params);
        let a = bisection_optimize(4, &budget, &stats, &params, DEFAULT_EPS).unwrap();
        let b = bisection_optimize(4, &budget, &stats, &params, DEFAULT_EPS).unwrap();
        assert_eq!(a, b);
        assert!(a
            .constellation
            .energies()
            .iter()
            .zip(b.constellation.energies())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn mean_design_energy_nonincreasing_in_target() {
        let (stats, params) = fixture();
        let mut prev = f64::INFINITY;
        for t in [0.01, 0.02, 0.05, 0.1, 0.2, 0.3] {
            let mean = constellation_design(t, 4, &stats, &params)
                .unwrap()
                .mean_energy();
            assert!(mean <= prev, "t {t}: {mean} !<= {prev}");
            prev = mean;
        }
    }

    #[test]
    fn optimal_gaps_widen_with_energy_at_defaults() {
        let (stats, params) = fixture();
        for order in [4usize, 8] {
            let budget = budget_at_db(25.0, &stats, &params);
            let out = bisection_optimize(order, &budget, &stats, &params, DEFAULT_EPS).unwrap();
            let amps: Vec<f64> = (0..order).map(|m| out.constellation.amplitude(m)).collect();
            for w in amps.windows(3) {
                let (g1, g2) = (w[1] - w[0], w[2] - w[1]);
                assert!(g2 >= g1 - 1e-12, "order {order}: gaps {g1} then {g2}");
            }
        }
    }

    #[test]
    fn result_serializes_with_flat_energies() {
        let (stats, params) = fixture();
        let budget = budget_at_db(10.0, &stats, &params);
        let out = bisection_optimize(2, &budget, &stats, &params, DEFAULT_EPS).unwrap();
        let json = serde_json::to_value(&out).unwrap();
        assert!(json["energies"].is_array());
        assert!(json["t_star"].is_f64());
        assert!(json["converged"].is_boolean());
        assert!(json["achieved_energy"].is_f64());
    }

    #[test]
    fn order_one_is_rejected() {
        let (stats, params) = fixture();
        let budget = budget_at_db(10.0, &stats, &params);
        assert!(matches!(
            bisection_optimize(1, &budget, &stats, &params, DEFAULT_EPS),
            Err(OptimizeError::OrderTooSmall)
        ));
        assert!(matches!(
            traditional_ask(1, &budget),
            Err(OptimizeError::OrderTooSmall)
        ));
    }
}
