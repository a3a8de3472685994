use beltrami_core::fields::eval_b_n;
use beltrami_core::solver::{self, SolverConfig};
use beltrami_core::{ops, GridSpec, PhysicalField, SpectralField};

fn taylor_green(g: GridSpec) -> SpectralField {
    PhysicalField::from_fn(g, |[x, y, z]| [x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), 0.0])
        .forward()
        .unwrap()
}

fn beltrami(g: GridSpec, freq: f64) -> SpectralField {
    PhysicalField::from_fn(g, |x| eval_b_n(freq, x)).forward().unwrap()
}

fn final_state(u0: &SpectralField, cfg: &SolverConfig) -> SpectralField {
    solver::run_with(u0, cfg, |_, _, _| Ok(())).unwrap().0
}

#[test]
fn beltrami_oracle_holds_at_every_step() {
    let g = GridSpec::with_periods(32, 1).unwrap();
    let (nu, lam) = (1.0, 2.0);
    let b = beltrami(g, lam);
    let times: Vec<f64> = (0..=10).map(|i| 0.01 * i as f64).collect();
    let tr = solver::run(&b, &SolverConfig::new(nu, 1e-3, 0.1).with_snapshots(times)).unwrap();
    let b_sup = b.inverse().max_abs();
    for s in &tr.snapshots {
        let exact = b.scaled((-nu * lam * lam * s.t_step).exp());
        let rel = s.u.inverse().max_diff(&exact.inverse()) / (b_sup * (-nu * lam * lam * s.t_step).exp());
        assert!(rel < 1e-8, "t={} rel={rel:e}", s.t);
    }
    // Enstrophy of the exact solution decays at twice the energy rate.
    let d0 = tr.diagnostics[0];
    for d in &tr.diagnostics {
        let want = d0.enstrophy * (-2.0 * nu * lam * lam * d.t).exp();
        assert!((d.enstrophy - want).abs() < 1e-10 * d0.enstrophy);
    }
    assert!(tr.energy_identity_residual() < 1e-12);
}

#[test]
fn taylor_green_invariants() {
    let g = GridSpec::with_periods(32, 1).unwrap();
    let mut u0 = taylor_green(g);
    // Add a uniform drift to exercise momentum conservation.
    u0.comps[2][0] += num_complex::Complex64::new(0.3, 0.0);
    let cfg = SolverConfig::new(0.05, 0.01, 1.0).with_snapshots(vec![0.0, 0.5, 1.0]);
    let tr = solver::run(&u0, &cfg).unwrap();
    let e: Vec<f64> = tr.diagnostics.iter().map(|d| d.energy).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]), "energy increased");
    let h1_0 = tr.diagnostics[0].h1;
    assert!(tr.diagnostics.iter().all(|d| d.h1 <= h1_0 * (1.0 + 1e-12)));
    assert!(tr.max_divergence() < 1e-10, "{}", tr.max_divergence());
    let res = tr.energy_identity_residual();
    assert!(res < 1e-6, "energy identity residual {res:e}");
    for s in &tr.snapshots {
        assert_eq!(s.u.mean(), u0.mean());
    }
}

#[test]
fn divergence_free_output_after_one_step() {
    let g = GridSpec::with_periods(16, 1).unwrap();
    let u0 = taylor_green(g);
    let (u, _) = solver::step(&u0, 0.1, 0.01, true).unwrap();
    let div = ops::divergence(&u).unwrap().inverse().max_abs();
    assert!(div < 1e-12, "{div:e}");
}

#[test]
fn fourth_order_in_time() {
    let g = GridSpec::with_periods(16, 1).unwrap();
    let u0 = taylor_green(g);
    let t_end = 0.8;
    let reference = final_state(&u0, &SolverConfig::new(0.05, t_end / 256.0, t_end));
    let err = |steps: usize| {
        let u = final_state(&u0, &SolverConfig::new(0.05, t_end / steps as f64, t_end));
        u.sub(&reference).unwrap().max_coeff()
    };
    let (e1, e2, e3) = (err(8), err(16), err(32));
    let (r1, r2) = (e1 / e2, e2 / e3);
    assert!((12.0..=20.0).contains(&r1) && (12.0..=20.0).contains(&r2), "ratios {r1} {r2} ({e1:e} {e2:e} {e3:e})");
}

#[test]
fn duhamel_remainder_starts_at_zero_and_grows() {
    let g = GridSpec::with_periods(16, 1).unwrap();
    let u0 = taylor_green(g);
    let times = vec![0.0, 0.02, 0.04, 0.08];
    let tr = solver::run(&u0, &SolverConfig::new(0.1, 0.01, 0.08).with_snapshots(times.clone())).unwrap();
    let norms: Vec<f64> = times.iter().map(|&t| solver::duhamel_remainder(&tr, t).unwrap().max_abs()).collect();
    assert_eq!(norms[0], 0.0);
    assert!(norms.windows(2).all(|w| w[1] > w[0]), "{norms:?}");
    assert!(solver::duhamel_remainder(&tr, 0.05).is_err());
}

#[test]
fn biot_savart_inverts_vorticity() {
    let g = GridSpec::with_periods(16, 1).unwrap();
    let u0 = taylor_green(g);
    let back = ops::biot_savart(&solver::vorticity(&u0).unwrap()).unwrap();
    assert!(back.sub(&u0).unwrap().inverse().max_abs() < 1e-10);
}

#[test]
fn diagnostics_csv_layout() {
    let g = GridSpec::with_periods(8, 1).unwrap();
    let tr = solver::run(&beltrami(g, 1.0), &SolverConfig::new(1.0, 0.1, 0.2)).unwrap();
    let csv = tr.diagnostics_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,energy,enstrophy,h1,h2,h3,div_max,cfl");
    assert_eq!(lines.count(), 3);
}
