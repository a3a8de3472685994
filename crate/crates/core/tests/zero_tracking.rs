use beltrami_core::fields::{eval_b_n, eval_w};
use beltrami_core::solver::{self, SolverConfig};
use beltrami_core::zeros::{first_zero_time, zero_count_series, ScanConfig};
use beltrami_core::{Error, GridSpec, PhysicalField, SpectralField};

const EPS: f64 = 1e-4;

/// `ε (s₀/3 · B_3 + W)`: vorticity `ε (s₀ B_3 − (cos x3, cos x1, cos x2))`.
/// The shear part dominates at first and decays eight times faster.
fn mixed(g: GridSpec, s0: f64) -> SpectralField {
    PhysicalField::from_fn(g, |x| {
        let b = eval_b_n(3.0, x);
        let w = eval_w(x);
        [EPS * (s0 / 3.0 * b[0] + w[0]), EPS * (s0 / 3.0 * b[1] + w[1]), EPS * w[2]]
    })
    .forward()
    .unwrap()
}

/// Smallest shear weight `s` for which `(cos x3, cos x1, 0) = s (sin 3x3, cos 3x3, 0)`
/// still has solutions, by a fine sweep over the first equation's roots.
fn critical_weight() -> f64 {
    let has_zero = |s: f64| {
        let n = 200_000;
        let f = |x: f64| x.cos() - s * (3.0 * x).sin();
        let h = 2.0 * std::f64::consts::PI / n as f64;
        (0..n).any(|i| {
            let (a, b) = (-std::f64::consts::PI + i as f64 * h, -std::f64::consts::PI + (i + 1) as f64 * h);
            if f(a) * f(b) > 0.0 {
                return false;
            }
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if f(lo) * f(m) <= 0.0 {
                    hi = m
                } else {
                    lo = m
                }
            }
            (s * (3.0 * lo).cos()).abs() <= 1.0
        })
    };
    let (mut lo, mut hi) = (0.5, 50.0);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if has_zero(m) {
            lo = m
        } else {
            hi = m
        }
    }
    lo
}

#[test]
fn first_zero_time_matches_linear_prediction() {
    let g = GridSpec::with_periods(16, 1).unwrap();
    let s0 = 4.0;
    let s_star = critical_weight();
    assert!(s_star < s0, "{s_star}");
    // Shear weight relative to W decays as e^{-8νt}.
    let t_star = (s0 / s_star).ln() / 8.0;
    let cfg = SolverConfig::new(1.0, 1e-3, 1.0);
    let width = 1e-4;
    // Zeros are born in fold pairs with a near-singular Jacobian, so the
    // linearized step from nearby nodes overshoots; a wider reach seeds them.
    let scan = ScanConfig { reach: 4.0, ..ScanConfig::default() };
    let fz = first_zero_time(&mixed(g, s0), &cfg, (0.0, 0.5), width, &scan).unwrap();
    assert!(fz.hi - fz.lo <= width);
    assert!(fz.at_hi.count() > 0);
    assert!((fz.midpoint() - t_star).abs() < 2e-3, "bracket [{}, {}] vs {t_star}", fz.lo, fz.hi);
}

#[test]
fn first_zero_time_reports_empty_and_occupied_windows() {
    let g = GridSpec::with_periods(16, 1).unwrap();
    let cfg = SolverConfig::new(1.0, 1e-2, 1.0);
    let shear = PhysicalField::from_fn(g, |x| eval_b_n(3.0, x)).forward().unwrap().scaled(EPS);
    let r = first_zero_time(&shear, &cfg, (0.0, 0.2), 1e-3, &ScanConfig::default());
    assert!(matches!(r, Err(Error::NoZeroInWindow { .. })), "{r:?}");
    let r = first_zero_time(&mixed(g, 0.5), &cfg, (0.0, 0.2), 1e-3, &ScanConfig::default());
    assert!(matches!(r, Err(Error::ZerosAtWindowStart { .. })), "{r:?}");
}

#[test]
fn zero_counts_along_a_trajectory() {
    let g = GridSpec::with_periods(16, 1).unwrap();
    let shear = PhysicalField::from_fn(g, |x| eval_b_n(3.0, x)).forward().unwrap();
    let cfg = SolverConfig::new(1.0, 1e-2, 0.1).with_snapshots(vec![0.0, 0.05, 0.1]);
    let series = zero_count_series(&solver::run(&shear, &cfg).unwrap(), &ScanConfig::default()).unwrap();
    assert_eq!(series.len(), 3);
    assert!(series.iter().all(|c| c.count == 0));

    let tr = solver::run(&mixed(g, 0.5), &cfg).unwrap();
    let series = zero_count_series(&tr, &ScanConfig::default()).unwrap();
    assert!(series.iter().all(|c| c.count > 0 && c.hyperbolic_count > 0));
}
