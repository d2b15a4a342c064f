//! Grid-scan root oracle for the constellation designer.

use risask_core::analysis::pep;
use risask_core::channel::{compute_stats, ChannelStats};
use risask_core::optimizer::constellation_design;
use risask_core::{Constellation64, SystemParams64};

fn fixture() -> (ChannelStats<f64>, SystemParams64) {
    let params = SystemParams64 {
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

fn adjacent_pep(e: f64, stats: &ChannelStats<f64>, params: &SystemParams64) -> f64 {
    let c = Constellation64::new(vec![0.0, e]).unwrap();
    pep(1, 0, &c, stats, params).unwrap()
}

/// Exhaustive two-stage scan for the crossing of pep(2->1) = t over
/// (0, e_max]: coarse pass to bracket, fine pass to localize.
fn grid_scan_root(t: f64, e_max: f64, stats: &ChannelStats<f64>, params: &SystemParams64) -> f64 {
    let coarse = 20_000;
    let mut bracket = None;
    let mut prev_e = e_max * 1e-9;
    for i in 1..=coarse {
        let e = e_max * i as f64 / coarse as f64;
        if adjacent_pep(e, stats, params) < t {
            bracket = Some((prev_e, e));
            break;
        }
        prev_e = e;
    }
    let (lo, hi) = bracket.expect("crossing not bracketed; raise e_max");
    let fine = 20_000;
    for i in 1..=fine {
        let e = lo + (hi - lo) * i as f64 / fine as f64;
        if adjacent_pep(e, stats, params) < t {
            return e;
        }
    }
    hi
}

#[test]
fn two_level_design_matches_grid_scan() {
    let (stats, params) = fixture();
    for t in [0.2, 0.05, 0.01] {
        let designed = constellation_design(t, 2, &stats, &params).unwrap();
        let e_design = designed.energy(1);
        let e_scan = grid_scan_root(t, 4.0 * e_design.max(1e-6), &stats, &params);
        let tol = 1e-6_f64.max(1e-6 * e_scan);
        assert!(
            (e_design - e_scan).abs() <= tol + (e_scan * 4.0 / 20_000.0 / 20_000.0),
            "t={t}: designed {e_design:.9e} vs scanned {e_scan:.9e}"
        );
    }
}
