//! Norms on the periodic box: Lebesgue, Sobolev, Littlewood–Paley blocks,
//! homogeneous Besov norms (dyadic and heat-flow forms), the space-time
//! E-norm of the projected forcing `PΩ_{u₀}` and its smallness test, and the
//! commutator and weighted quantities used by the localization estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::fields::{self, LocalizerSpec};
use crate::grid::GridSpec;
use crate::ops::{self, Mode};
use crate::par;
use crate::tolerances::{POINTS_PER_DECADE, T_MAX, T_MIN};

/// Pointwise Euclidean magnitude raised to `p`, integrated with the midpoint
/// rule; `p = ∞` is the grid maximum.
pub fn lp_norm(f: &PhysicalField, p: f64) -> f64 {
    let len = f.grid.len_physical();
    let mag = |i: usize| f.comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt();
    if p.is_infinite() {
        return par::max_by(len, mag);
    }
    let s = par::sum_by(len, |i| mag(i).powf(p));
    (s * f.grid.cell_volume()).powf(1.0 / p)
}

fn weighted_sum_sq(f: &SpectralField, weight: impl Fn(&Mode) -> f64 + Sync + Send) -> f64 {
    let g = f.grid;
    let w = g.wavenumbers();
    let mut total = 0.0;
    for comp in &f.comps {
        total += par::sum_by(comp.len(), |i| {
            let (a, b3, b2) = w.split(i);
            let m = Mode {
                idx: i,
                a,
                b3,
                b2,
                k: [w.k1[a], w.k2[b2], w.k3[b3]],
                d: [w.d1[a], w.d2[b2], w.d3[b3]],
            };
            w.weight(a) * weight(&m) * comp[i].norm_sqr()
        });
    }
    total * g.volume()
}

/// `‖f‖_{H^r}` with weights `(1 + |k|²)^r`; equals the L² norm at `r = 0`.
pub fn sobolev_norm(f: &SpectralField, r: f64) -> f64 {
    weighted_sum_sq(f, |m| (1.0 + m.k2()).powf(r)).sqrt()
}

/// Homogeneous `‖f‖_{Ḣ^r}` with weights `|k|^{2r}` (the mean is dropped for r > 0).
pub fn homogeneous_sobolev_norm(f: &SpectralField, r: f64) -> f64 {
    weighted_sum_sq(f, |m| {
        let k2 = m.k2();
        if k2 == 0.0 {
            if r == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            k2.powf(r)
        }
    })
    .sqrt()
}

/// Smooth cutoff: 1 on `[0, 1/2]`, 0 on `[1, ∞)`, `C^∞` in between.
pub fn cutoff(r: f64) -> f64 {
    if r <= 0.5 {
        return 1.0;
    }
    if r >= 1.0 {
        return 0.0;
    }
    let bump = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let s = 2.0 * (r - 0.5);
    bump(1.0 - s) / (bump(1.0 - s) + bump(s))
}

/// Symbol of `Δ_j` at `|ξ|`: `χ(ξ/2^j) − χ(ξ/2^{j−1})`, supported in
/// `2^{j−2} < |ξ| < 2^j` and equal to 1 at `|ξ| = 2^{j−1}`.
pub fn block_symbol(j: i32, kabs: f64) -> f64 {
    cutoff(kabs / 2f64.powi(j)) - cutoff(kabs / 2f64.powi(j - 1))
}

/// Dyadic indices whose blocks together cover every nonzero wavenumber of the
/// grid: `Σ_{j_min..=j_max} Δ_j = 1` away from `k = 0`.
pub fn block_range(grid: &GridSpec) -> (i32, i32) {
    let j_min = grid.dk().log2().floor() as i32 + 1;
    let j_max = (3f64.sqrt() * grid.k_max()).log2().ceil() as i32 + 1;
    (j_min, j_max)
}

/// Littlewood–Paley block `Δ_j f`.
pub fn lp_block(f: &SpectralField, j: i32) -> Result<SpectralField> {
    let (lo, hi) = block_range(&f.grid);
    if j < lo || j > hi {
        return Err(Error::Parameter(format!("block {j} outside the resolvable range {lo}..={hi}")));
    }
    Ok(ops::apply_symbol(f, |m| block_symbol(j, m.kabs())))
}

/// Smooth low-pass projection `P_{≤ρ}` with symbol `χ(ξ/ρ)`.
pub fn low_pass(f: &SpectralField, rho: f64) -> SpectralField {
    ops::apply_symbol(f, |m| cutoff(m.kabs() / rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        let ok = s.is_finite() && p >= 1.0 && q >= 1.0;
        if ok {
            Ok(Self { s, p, q })
        } else {
            Err(Error::Parameter(format!("invalid Besov indices s={s}, p={p}, q={q}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dyadic,
    Caloric,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub method: Method,
    pub j_min: Option<i32>,
    pub j_max: Option<i32>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub quadrature: String,
}

/// `ℓ^q` combination, `q = ∞` as supremum.
fn lq(vals: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        vals.fold(0.0, f64::max)
    } else {
        vals.map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `(Σ_j 2^{jqs} ‖Δ_j f‖^q_{L^p})^{1/q}` over the grid's dyadic range.
pub fn besov_dyadic(f: &SpectralField, params: BesovParams) -> NormReport {
    let (lo, hi) = block_range(&f.grid);
    let terms: Vec<f64> = (lo..=hi)
        .map(|j| {
            let b = ops::apply_symbol(f, |m| block_symbol(j, m.kabs()));
            2f64.powf(j as f64 * params.s) * lp_norm(&b.inverse(), params.p)
        })
        .collect();
    NormReport {
        value: lq(terms.into_iter(), params.q),
        method: Method::Dyadic,
        j_min: Some(lo),
        j_max: Some(hi),
        t_min: None,
        t_max: None,
        quadrature: "blocks j_min..=j_max; modes beyond the grid band are truncated".into(),
    }
}

/// Logarithmic time grid with trapezoid weights for `∫ g(t) dt/t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub times: Vec<f64>,
    /// Weights for `∫ · dt/t` (trapezoid in `log t`).
    pub log_weights: Vec<f64>,
}

impl TimeGrid {
    pub fn log(t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && per_decade >= 1) {
            return Err(Error::Parameter(format!(
                "time grid needs 0 < t_min < t_max and at least one point per decade, got {t_min}, {t_max}, {per_decade}"
            )));
        }
        let decades = (t_max / t_min).log10();
        let intervals = (decades * per_decade as f64).ceil().max(1.0) as usize;
        let h = (t_max / t_min).ln() / intervals as f64;
        let times: Vec<f64> = (0..=intervals).map(|i| t_min * (h * i as f64).exp()).collect();
        let mut log_weights = vec![h; times.len()];
        log_weights[0] = 0.5 * h;
        log_weights[intervals] = 0.5 * h;
        Ok(Self { times, log_weights })
    }

    /// Default grid for a box: spans `[min(T_MIN, k_max^-2), T_MAX]`.
    pub fn for_grid(grid: &GridSpec) -> Self {
        let t_min = T_MIN.min(grid.k_max().powi(-2));
        Self::log(t_min, T_MAX, POINTS_PER_DECADE).expect("default time grid is valid")
    }

    pub fn t_min(&self) -> f64 {
        self.times[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().expect("time grid is nonempty")
    }

    fn describe(&self) -> String {
        format!("log grid, {} points, trapezoid in log t", self.times.len())
    }
}

/// `‖e^{tΔ}f‖_{L^p}` at every time of the grid; shared by all caloric norms
/// with the same `p`.
pub fn caloric_profile(f: &SpectralField, p: f64, tgrid: &TimeGrid) -> Result<Vec<f64>> {
    if tgrid.times.is_empty() {
        return Err(Error::Parameter("empty time grid".into()));
    }
    tgrid.times.iter().map(|&t| Ok(lp_norm(&ops::heat(f, t)?.inverse(), p))).collect()
}

/// Combine a caloric profile into `‖t^{−s/2} profile(t)‖_{L^q(dt/t)}`.
pub fn besov_from_profile(profile: &[f64], params: BesovParams, tgrid: &TimeGrid) -> Result<NormReport> {
    if params.s >= 0.0 {
        return Err(Error::Parameter(format!("heat-flow form needs s < 0, got {}", params.s)));
    }
    if profile.len() != tgrid.times.len() {
        return Err(Error::Parameter("profile and time grid lengths differ".into()));
    }
    let vals = tgrid.times.iter().zip(profile).map(|(&t, &v)| t.powf(-0.5 * params.s) * v);
    let value = if params.q.is_infinite() {
        vals.fold(0.0, f64::max)
    } else {
        vals.zip(&tgrid.log_weights).map(|(v, w)| w * v.powf(params.q)).sum::<f64>().powf(1.0 / params.q)
    };
    Ok(NormReport {
        value,
        method: Method::Caloric,
        j_min: None,
        j_max: None,
        t_min: Some(tgrid.t_min()),
        t_max: Some(tgrid.t_max()),
        quadrature: tgrid.describe(),
    })
}

/// `‖t^{−s/2}‖e^{tΔ}f‖_{L^p}‖_{L^q(dt/t)}` on a logarithmic time grid.
pub fn besov_caloric(f: &SpectralField, params: BesovParams, tgrid: &TimeGrid) -> Result<NormReport> {
    if params.s >= 0.0 {
        return Err(Error::Parameter(format!("heat-flow form needs s < 0, got {}", params.s)));
    }
    besov_from_profile(&caloric_profile(f, params.p, tgrid)?, params, tgrid)
}

/// `Ω_{u₀}(t) = (e^{tΔ}u₀·∇)e^{tΔ}u₀`, computed on the 2/3-dealiased heat
/// flow and dealiased again; Leray-projected when `project` is set.
pub fn omega_u0(u0: &SpectralField, t: f64, project: bool) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("omega_u0 needs t ≥ 0, got {t}")));
    }
    let v = ops::dealias(&ops::heat(u0, t)?);
    let vp = v.inverse();
    let g = v.grid;
    let mut out = PhysicalField::zeros(g, 3);
    for axis in 0..3 {
        let dv = ops::partial(&v, axis).inverse();
        for i in 0..3 {
            let (vj, dvi) = (&vp.comps[axis], &dv.comps[i]);
            par::for_each_chunk(&mut out.comps[i], g.n * g.n, |z, chunk| {
                let base = z * g.n * g.n;
                for (o, x) in chunk.iter_mut().enumerate() {
                    *x += vj[base + o] * dvi[base + o];
                }
            });
        }
    }
    let omega = ops::dealias(&out.forward()?);
    if project {
        ops::leray_project(&omega)
    } else {
        Ok(omega)
    }
}

/// Both summands of the E-norm of `F = PΩ_{u₀}` and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ENormReport {
    /// `∫ ‖F(t)‖_{Ḃ⁻¹_{∞,1}} dt`.
    pub integrated_besov: f64,
    /// `Σ_j 2^{−j} (∫ ‖Δ_j F(t)‖²_{L^∞} t dt)^{1/2}`.
    pub square_function: f64,
    pub report: NormReport,
}

pub fn e_norm(u0: &SpectralField, tgrid: &TimeGrid) -> Result<ENormReport> {
    let (lo, hi) = block_range(&u0.grid);
    let nb = (hi - lo + 1) as usize;
    let mut integrated = 0.0;
    let mut squares = vec![0.0; nb];
    for (&t, &w) in tgrid.times.iter().zip(&tgrid.log_weights) {
        let f = omega_u0(u0, t, true)?;
        let mut besov = 0.0;
        for (b, j) in (lo..=hi).enumerate() {
            let sup = lp_norm(&ops::apply_symbol(&f, |m| block_symbol(j, m.kabs())).inverse(), f64::INFINITY);
            besov += 2f64.powi(-j) * sup;
            // dt = t · d(log t)
            squares[b] += w * t * t * sup * sup;
        }
        integrated += w * t * besov;
    }
    let square_function: f64 = squares.iter().enumerate().map(|(b, s)| 2f64.powi(-(lo + b as i32)) * s.sqrt()).sum();
    Ok(ENormReport {
        integrated_besov: integrated,
        square_function,
        report: NormReport {
            value: integrated + square_function,
            method: Method::Caloric,
            j_min: Some(lo),
            j_max: Some(hi),
            t_min: Some(tgrid.t_min()),
            t_max: Some(tgrid.t_max()),
            quadrature: format!("{}; dyadic blocks j_min..=j_max", tgrid.describe()),
        },
    })
}

/// Numerical comparison of `‖PΩ_{u₀}‖_E` with `C*^{-1} exp(−C*‖u₀‖⁴_{Ḃ⁻¹_{∞,2}})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgCheck {
    pub c_star: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub besov_inf_2: f64,
    pub satisfied: bool,
    /// `rhs − lhs`.
    pub margin: f64,
    pub e_norm: ENormReport,
}

pub fn check_cg_condition(u0: &SpectralField, c_star: f64, tgrid: &TimeGrid) -> Result<CgCheck> {
    if !(c_star > 0.0) {
        return Err(Error::Parameter(format!("C* must be positive, got {c_star}")));
    }
    let b = besov_caloric(u0, BesovParams::new(-1.0, f64::INFINITY, 2.0)?, tgrid)?.value;
    let e = e_norm(u0, tgrid)?;
    let lhs = e.report.value;
    let rhs = (-c_star * b.powi(4)).exp() / c_star;
    Ok(CgCheck { c_star, lhs, rhs, besov_inf_2: b, satisfied: lhs <= rhs, margin: rhs - lhs, e_norm: e })
}

/// `‖e^{tΔ}(φ_L B_λ) − φ_L e^{tΔ}B_λ‖_{L^p}` on the grid. The shear field
/// decays exactly as `e^{−tλ²}`.
pub fn commutator_norm(grid: GridSpec, loc: &LocalizerSpec, freq: f64, t: f64, p: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    grid.require_resolves(freq)?;
    let flowed = ops::heat(&fields::sample_localized_beltrami(grid, loc, freq).forward()?, t)?.inverse();
    let decay = (-t * freq * freq).exp();
    let diff = PhysicalField::from_fn(grid, |x| {
        let b = fields::eval_b_n(freq, x);
        let s = decay * loc.value(x);
        [s * b[0], s * b[1], s * b[2]]
    });
    Ok(lp_norm(&flowed.sub(&diff)?, p))
}

/// `‖e^{tΔ}(∇φ_L ∧ B_λ)‖_{L^p}`.
pub fn heat_gradient_wedge_norm(grid: GridSpec, loc: &LocalizerSpec, freq: f64, t: f64, p: f64) -> Result<f64> {
    grid.require_resolves(freq)?;
    let wedge = PhysicalField::from_fn(grid, |x| {
        let (_, g, _) = loc.jet(x);
        let b = fields::eval_b_n(freq, x);
        [g[1] * b[2] - g[2] * b[1], g[2] * b[0] - g[0] * b[2], g[0] * b[1] - g[1] * b[0]]
    });
    Ok(lp_norm(&ops::heat(&wedge.forward()?, t)?.inverse(), p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    /// `(1 + |x|)^γ`.
    OnePlusAbs,
    /// `(1 + |x|²)^γ`.
    OnePlusSquare,
}

/// Grid maximum of `w(x)|f(x)|`.
pub fn weighted_sup(f: &PhysicalField, gamma: f64, weight: Weight) -> f64 {
    let g = f.grid;
    par::max_by(g.len_physical(), |i| {
        let x = g.point(i);
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let w = match weight {
            Weight::OnePlusAbs => (1.0 + r2.sqrt()).powf(gamma),
            Weight::OnePlusSquare => (1.0 + r2).powf(gamma),
        };
        w * f.comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()
    })
}

/// Measured Bernstein ratios for the low-pass piece at radius `rho`:
/// `‖P f‖_q / (ρ^{3(1/p−1/q)} ‖P f‖_p)` and `‖∇P f‖_p / (ρ ‖P f‖_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinRatios {
    pub rho: f64,
    pub lp_to_lq: f64,
    pub gradient: f64,
}

pub fn bernstein_ratios(f: &SpectralField, rho: f64, p: f64, q: f64) -> Result<BernsteinRatios> {
    if !(rho > 0.0 && p >= 1.0 && q >= p) {
        return Err(Error::Parameter(format!("Bernstein ratios need ρ > 0 and 1 ≤ p ≤ q, got {rho}, {p}, {q}")));
    }
    let low = low_pass(f, rho);
    let base = lp_norm(&low.inverse(), p);
    if base == 0.0 {
        return Ok(BernsteinRatios { rho, lp_to_lq: 0.0, gradient: 0.0 });
    }
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let lq_norm = lp_norm(&low.inverse(), q);
    let mut grad = PhysicalField::zeros(f.grid, 3 * f.ncomp());
    for axis in 0..3 {
        let d = ops::partial(&low, axis).inverse();
        for (c, comp) in d.comps.into_iter().enumerate() {
            grad.comps[3 * c + axis] = comp;
        }
    }
    Ok(BernsteinRatios {
        rho,
        lp_to_lq: lq_norm / (rho.powf(3.0 * (inv(p) - inv(q))) * base),
        gradient: lp_norm(&grad, p) / (rho * base),
    })
}

/// `‖∇Δ_j f‖_{L²} / (2^j ‖Δ_j f‖_{L²})`.
pub fn block_bernstein_ratio(f: &SpectralField, j: i32) -> Result<f64> {
    let b = lp_block(f, j)?;
    let l2 = sobolev_norm(&b, 0.0);
    if l2 == 0.0 {
        return Ok(0.0);
    }
    Ok(homogeneous_sobolev_norm(&b, 1.0) / (2f64.powi(j) * l2))
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beltrami(g: GridSpec, freq: f64) -> SpectralField {
        PhysicalField::from_fn(g, |x| fields::eval_b_n(freq, x)).forward().unwrap()
    }

    #[test]
    fn beltrami_sup_norm_is_one() {
        let g = GridSpec::with_periods(16, 1).unwrap();
        let b = PhysicalField::from_fn(g, |x| fields::eval_b_n(3.0, x));
        assert!((lp_norm(&b, f64::INFINITY) - 1.0).abs() < 1e-14);
        // |B| = 1 pointwise, so ‖B‖_p^p is the box volume.
        assert!((lp_norm(&b, 2.0) - g.volume().sqrt()).abs() < 1e-10);
    }

    #[test]
    fn sobolev_zero_matches_l2() {
        let g = GridSpec::with_periods(16, 1).unwrap();
        let f = PhysicalField::from_fn(g, |[x, y, z]| [(x + y).sin().exp(), z.cos(), (x - z).sin()]);
        let s = f.forward().unwrap();
        assert!((sobolev_norm(&s, 0.0) - lp_norm(&f, 2.0)).abs() < 1e-10 * lp_norm(&f, 2.0));
    }

    #[test]
    fn cutoff_is_monotone_and_partitions() {
        let mut prev = 1.0;
        for i in 0..=400 {
            let r = i as f64 / 200.0;
            let c = cutoff(r);
            assert!(c <= prev + 1e-15 && (0.0..=1.0).contains(&c));
            prev = c;
        }
        assert_eq!(block_symbol(3, 4.0), 1.0);
        assert_eq!(block_symbol(2, 4.0), 0.0);
        assert_eq!(block_symbol(4, 4.0), 0.0);
        assert_eq!(block_symbol(3, 2.0), 0.0);
        assert_eq!(block_symbol(3, 8.0), 0.0);
    }

    #[test]
    fn single_wavenumber_sits_in_one_block() {
        let g = GridSpec::with_periods(32, 1).unwrap();
        let f = beltrami(g, 4.0);
        let b = lp_block(&f, 3).unwrap();
        assert!(b.sub(&f).unwrap().max_coeff() < 1e-15);
        assert!(lp_block(&f, 2).unwrap().max_coeff() < 1e-15);
        assert!(lp_block(&f, 4).unwrap().max_coeff() < 1e-15);
    }

    #[test]
    fn caloric_norm_of_unit_beltrami() {
        let g = GridSpec::with_periods(16, 1).unwrap();
        let f = beltrami(g, 1.0);
        let tg = TimeGrid::log(1e-3, 1e2, 400).unwrap();
        let r = besov_caloric(&f, BesovParams::new(-1.0, f64::INFINITY, f64::INFINITY).unwrap(), &tg).unwrap();
        assert!((r.value - (2.0 * std::f64::consts::E).powf(-0.5)).abs() < 1e-3, "{}", r.value);
        let d = besov_dyadic(&f, BesovParams::new(-1.0, f64::INFINITY, f64::INFINITY).unwrap());
        assert!((d.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weighted_sup_of_localizer() {
        let g = GridSpec::with_periods(32, 2).unwrap();
        let loc = LocalizerSpec::inverse_power(2.0);
        let phi = PhysicalField::scalar_from_fn(g, |x| loc.value(x));
        assert!((weighted_sup(&phi, 2.0, Weight::OnePlusSquare) - 1.0).abs() < 1e-12);
        assert!(weighted_sup(&PhysicalField::zeros(g, 3), 1.0, Weight::OnePlusAbs) == 0.0);
    }

    #[test]
    fn beltrami_forcing_is_a_gradient() {
        // ABC flow: curl u = u with a non-constant |u|, so (u·∇)u = ∇|u|²/2 ≠ 0.
        let g = GridSpec::with_periods(32, 1).unwrap();
        let (a, b, c) = (1.0, 0.7, 0.4);
        let u = PhysicalField::from_fn(g, |[x, y, z]| {
            [a * z.sin() + c * y.cos(), b * x.sin() + a * z.cos(), c * y.sin() + b * x.cos()]
        })
        .forward()
        .unwrap();
        let raw = omega_u0(&u, 0.0, false).unwrap();
        assert!(raw.inverse().max_abs() > 0.1);
        for t in [0.0, 0.01, 0.3] {
            assert!(omega_u0(&u, t, true).unwrap().inverse().max_abs() < 1e-12);
        }
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.3)).collect();
        assert!((fit_power_law(&xs, &ys) + 1.3).abs() < 1e-12);
    }
}
