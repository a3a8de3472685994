use beltrami_core::fields::{self, eval_b_n, eval_w, DatumConfig, LocalizerSpec};
use beltrami_core::norms::{self, TimeGrid};
use beltrami_core::zeros::{classify, jacobian_at, scan_zeros, ScanConfig, ZeroClass};
use beltrami_core::{ops, GridSpec, PhysicalField};
use std::f64::consts::PI;

#[test]
fn curl_eigenfield_identities() {
    let g = GridSpec::new(128, 16.0 * PI).unwrap();
    for freq in [1.0, 2.0, 4.0] {
        let b = PhysicalField::from_fn(g, |x| eval_b_n(freq, x)).forward().unwrap();
        let err = ops::curl(&b).unwrap().sub(&b.scaled(freq)).unwrap().inverse().max_abs();
        assert!(err < 1e-10, "N={freq}: {err:e}");
    }
    let w = PhysicalField::from_fn(g, eval_w).forward().unwrap();
    let cc = ops::curl(&ops::curl(&w).unwrap()).unwrap();
    assert!(cc.sub(&w).unwrap().inverse().max_abs() < 1e-10);
}

/// `(1/νT) [[0, 1+νT, −1/4], [−1/4, 0, 1+νT], [1+νT, −1/4, 0]]`.
fn expected_jacobian(nu_t: f64) -> [[f64; 3]; 3] {
    let (a, b) = ((1.0 + nu_t) / nu_t, -0.25 / nu_t);
    [[0.0, a, b], [b, 0.0, a], [a, b, 0.0]]
}

#[test]
fn hyperbolic_zero_of_the_heat_target() {
    let g = GridSpec::new(128, 8.0 * PI).unwrap();
    for nu_t in [0.5, 1.0, 2.0] {
        let parts = fields::build_u02_omega02(g, nu_t, 1.0).unwrap();
        let f = &parts.target;
        let v = beltrami_core::zeros::eval_off_grid(f, [0.0; 3]);
        assert!(v.iter().all(|c| c.abs() < 1e-12), "{v:?}");
        let j = jacobian_at(f, [0.0; 3]);
        let want = expected_jacobian(nu_t);
        for r in 0..3 {
            for c in 0..3 {
                assert!((j[r][c] - want[r][c]).abs() < 1e-6, "νT={nu_t} J[{r}][{c}] = {} vs {}", j[r][c], want[r][c]);
            }
        }
        let (class, eig) = classify(&j, 1e-8, 1e-6);
        assert_eq!(class, ZeroClass::Hyperbolic);
        let lambda1 = eig.iter().find(|z| z.im.abs() < 1e-12).unwrap().re;
        assert!((lambda1 - (1.0 + 3.0 / (4.0 * nu_t))).abs() < 1e-6);
        // λ₂ = −((3+4νT) + (5+4νT)√3 i)/(8νT)
        let re2 = -(3.0 + 4.0 * nu_t) / (8.0 * nu_t);
        let im2 = (5.0 + 4.0 * nu_t) * 3f64.sqrt() / (8.0 * nu_t);
        let pair = eig.iter().find(|z| z.im > 0.0).unwrap();
        assert!((pair.re - re2).abs() < 1e-6 && (pair.im - im2).abs() < 1e-6, "{pair}");
    }
}

#[test]
fn heat_target_scan_finds_the_origin() {
    let g = GridSpec::new(64, 4.0 * PI).unwrap();
    let parts = fields::build_u02_omega02(g, 1.0, 1.0).unwrap();
    let res = scan_zeros(&parts.target, &ScanConfig::default()).unwrap();
    let z = &res.zeros[0];
    assert!(z.radius() < 1e-8, "{:?}", z.location);
    assert_eq!(z.class, ZeroClass::Hyperbolic);
    // Forward heat flow of the prepared vorticity lands on the target.
    let back = ops::heat(&parts.omega02, parts.nu_t).unwrap();
    let rel = back.sub(&parts.target).unwrap().inverse().max_abs() / parts.target.inverse().max_abs();
    assert!(rel < 1e-7, "{rel:e}");
}

#[test]
fn beltrami_datum_carries_no_nonlinear_forcing() {
    let g = GridSpec::new(64, 4.0 * PI).unwrap();
    let b = PhysicalField::from_fn(g, |x| eval_b_n(2.0, x)).forward().unwrap();
    let bp = b.inverse();
    let mut adv = PhysicalField::zeros(g, 3);
    for axis in 0..3 {
        let d = ops::partial(&b, axis).inverse();
        for c in 0..3 {
            for i in 0..g.len_physical() {
                adv.comps[c][i] += bp.comps[axis][i] * d.comps[c][i];
            }
        }
    }
    let forcing = ops::leray_project(&adv.forward().unwrap()).unwrap().inverse().max_abs();
    assert!(forcing < 1e-9, "{forcing:e}");
    let tg = TimeGrid::log(1e-3, 10.0, 8).unwrap();
    let e = norms::e_norm(&b, &tg).unwrap();
    assert!(e.report.value < 1e-9, "{:?}", e);
}

#[test]
fn reconnection_datum_pieces() {
    let g = GridSpec::new(64, 4.0 * PI).unwrap();
    let cfg = DatumConfig { freq: 4, ..DatumConfig::default() };
    let d = fields::build_theorem2_datum(g, &cfg, 1.0).unwrap();
    assert_eq!(d.rho, 4f64.powi(-4));
    // u₀¹(0) = N B_N(0) = (0, N, 0), up to the periodic images of the
    // algebraically decaying localizer (about 2e-4 relative on this box).
    let v = beltrami_core::zeros::eval_off_grid(&d.u01, [0.0; 3]);
    assert!(v[0].abs() < 1e-12 && (v[1] - 4.0).abs() < 4.0 * 1e-3 && v[2].abs() < 1e-12, "{v:?}");
    let div = ops::divergence(&d.u0).unwrap().inverse().max_abs();
    assert!(div < 1e-10 * d.u0.inverse().max_abs());
    // Every Sobolev norm is homogeneous in ρ.
    let mut unscaled = d.u01.clone();
    unscaled.axpy(1.0, &d.parts2.u02).unwrap();
    let ratio = norms::sobolev_norm(&d.u0, 3.0) / norms::sobolev_norm(&unscaled, 3.0);
    assert!((ratio / d.rho - 1.0).abs() < 1e-12);
    // Coarser grids are refused.
    let coarse = GridSpec::new(32, 4.0 * PI).unwrap();
    assert!(fields::build_theorem2_datum(coarse, &cfg, 1.0).is_err());
}

#[test]
fn large_datum_is_linear_in_amplitude() {
    let g = GridSpec::new(64, 32.0 * PI).unwrap();
    let one = fields::build_theorem1_datum(g, 1.0, 8.0, 1.0, 2.0).unwrap();
    let ten = fields::build_theorem1_datum(g, 10.0, 8.0, 1.0, 2.0).unwrap();
    assert!(ten.spectral.sub(&one.spectral.scaled(10.0)).unwrap().max_coeff() <= 1e-12 * ten.spectral.max_coeff());
    assert!(ops::divergence(&one.spectral).unwrap().inverse().max_abs() < 1e-10);
    assert!(fields::build_theorem1_datum(g, 1.0, 20.0, 1.0, 2.0).is_err());
    let loc = LocalizerSpec::inverse_power(2.0).dilated(8.0);
    assert!(loc.face_ratio(&g) < 1.0);
}
