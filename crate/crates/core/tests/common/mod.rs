//! Shared oracle helpers for the integration suites.

use risask_core::analysis::{pair_geometry, EventSense};
use risask_core::channel::ChannelStats;
use risask_core::specfun::gamma_lower_reg;
use risask_core::{Constellation64, SystemParams64};

pub fn normal_sf(z: f64) -> f64 {
    let p = gamma_lower_reg(0.5, z * z / 2.0).unwrap();
    if z >= 0.0 {
        0.5 * (1.0 - p)
    } else {
        0.5 * (1.0 + p)
    }
}

/// Adaptive Simpson, refined until each branch's Richardson correction is
/// below `rel_tol` of that branch (plus a rounding floor). For an integral
/// dominated by a few branches this bounds the global relative error.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, rel_tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, 0.5 * (a + m), m);
        let right = simpson(f, m, 0.5 * (m + b), b);
        let sum = left + right;
        if depth > 40 || (sum - whole).abs() <= 15.0 * rel_tol * sum.abs().max(1e-300) {
            sum + (sum - whole) / 15.0
        } else {
            recurse(f, a, m, left, rel_tol, depth + 1)
                + recurse(f, m, b, right, rel_tol, depth + 1)
        }
    }
    let m = 0.5 * (a + b);
    recurse(f, a, b, simpson(f, a, m, b), rel_tol, 0)
}

/// Exact probability of the pairwise error event under the Gaussian
/// surrogate, by direct quadrature over the quadratic form; entirely
/// independent of the Gamma moment-matching path.
pub fn true_pep_quadrature(
    m: usize,
    k: usize,
    c: &Constellation64,
    stats: &ChannelStats<f64>,
    params: &SystemParams64,
) -> f64 {
    let g = pair_geometry(m, k, c, stats, params).unwrap();
    let (sx, sy) = (g.sigma_x_sq.sqrt(), g.sigma_y_sq.sqrt());
    let y_lim = (g.threshold / g.delta).sqrt();
    let integrand = |y: f64| {
        let q = ((g.threshold - g.delta * y * y) / g.eta).max(0.0).sqrt();
        let pdf_y = (-y * y / (2.0 * sy * sy)).exp() / (sy * (2.0 * std::f64::consts::PI).sqrt());
        pdf_y * (normal_sf((q - g.mu_x) / sx) + normal_sf((q + g.mu_x) / sx))
    };
    let inner = 2.0 * adaptive_simpson(&integrand, 0.0, y_lim, 1e-13);
    let p_above = inner + 2.0 * normal_sf(y_lim / sy);
    match g.sense {
        EventSense::Above => p_above,
        EventSense::Below => 1.0 - p_above,
    }
}
