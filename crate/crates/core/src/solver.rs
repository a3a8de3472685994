//! Incompressible Navier–Stokes on the periodic box, velocity form.
//!
//! Time stepping is the integrating-factor (Lawson) RK4 scheme: diffusion is
//! integrated exactly by `e^{νΔh}` multipliers and the projected nonlinearity
//! `P(u × ω)` (rotational form; the gradient part is removed by `P`) is
//! evaluated pseudospectrally. With dealiasing on, both factors and the
//! product are restricted to the 2/3 band, which makes the nonlinearity a
//! Galerkin truncation that conserves energy exactly. The state itself is
//! not truncated so that initial data keep their full spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::grid::GridSpec;
use crate::norms;
use crate::ops;
use crate::par;
use crate::tolerances::CFL_LIMIT;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Integrating-factor fourth-order Runge–Kutta.
    IfRk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_cfl")]
    pub cfl_limit: f64,
    /// Highest Sobolev order recorded in diagnostics.
    #[serde(default = "default_order")]
    pub max_order: u32,
}

fn default_true() -> bool {
    true
}
fn default_scheme() -> Scheme {
    Scheme::IfRk4
}
fn default_cfl() -> f64 {
    CFL_LIMIT
}
fn default_order() -> u32 {
    3
}

impl SolverConfig {
    pub fn new(nu: f64, dt: f64, t_end: f64) -> Self {
        Self {
            nu,
            dt,
            t_end,
            snapshot_times: Vec::new(),
            dealias: true,
            scheme: Scheme::IfRk4,
            cfl_limit: CFL_LIMIT,
            max_order: 3,
        }
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.nu > 0.0) {
            return bad(format!("viscosity must be positive, got {}", self.nu));
        }
        if !(self.dt > 0.0) {
            return bad(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0) {
            return bad(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if !(self.cfl_limit > 0.0) {
            return bad(format!("CFL limit must be positive, got {}", self.cfl_limit));
        }
        if self.snapshot_times.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("snapshot times must be strictly increasing".into());
        }
        if let Some(&t) = self.snapshot_times.iter().find(|&&t| !(0.0..=self.t_end).contains(&t)) {
            return bad(format!("snapshot time {t} outside [0, {}]", self.t_end));
        }
        Ok(())
    }

    /// Number of steps and the uniform step that lands exactly on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }

    /// Explicit-diffusion bound `h²/(6ν)`, reported for reference. The
    /// integrating factor treats diffusion exactly, so it is not enforced.
    pub fn diffusive_limit(&self, grid: &GridSpec) -> f64 {
        grid.spacing().powi(2) / (6.0 * self.nu)
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    /// `½‖u‖²_{L²}`.
    pub energy: f64,
    /// `½‖ω‖²_{L²}`.
    pub enstrophy: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    /// Coefficient-sum bound on `sup |div u|`.
    pub div_max: f64,
    /// `max|u| dt / h` of the step that produced this state.
    pub cfl: f64,
    /// `ν ∫₀ᵗ ‖∇u‖²`.
    pub dissipated: f64,
}

impl Diagnostics {
    pub const CSV_HEADER: &'static str = "t,energy,enstrophy,h1,h2,h3,div_max,cfl";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.10e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.3e},{:.6e}",
            self.t, self.energy, self.enstrophy, self.h1, self.h2, self.h3, self.div_max, self.cfl
        )
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    /// Requested time.
    pub t: f64,
    /// Time of the captured step.
    pub t_step: f64,
    pub u: SpectralField,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub nu: f64,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn snapshot(&self, t: f64) -> Result<&Snapshot> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= 1e-12 * t.abs().max(1.0)).ok_or(Error::MissingSnapshot(t))
    }

    /// Worst `|E(t) + ν∫‖∇u‖² − E(0)| / E(0)` over the run.
    pub fn energy_identity_residual(&self) -> f64 {
        let Some(first) = self.diagnostics.first() else { return 0.0 };
        if first.energy == 0.0 {
            return 0.0;
        }
        self.diagnostics
            .iter()
            .map(|d| (d.energy + d.dissipated - first.energy).abs() / first.energy)
            .fold(0.0, f64::max)
    }

    pub fn max_divergence(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.div_max).fold(0.0, f64::max)
    }

    pub fn diagnostics_csv(&self) -> String {
        let mut s = String::from(Diagnostics::CSV_HEADER);
        s.push('\n');
        for d in &self.diagnostics {
            s.push_str(&d.csv_row());
            s.push('\n');
        }
        s
    }
}

/// Projected nonlinearity `P(u × ω)` and the peak speed seen on the grid.
pub fn nonlinear(u: &SpectralField, dealias: bool) -> Result<(SpectralField, f64)> {
    let g = u.grid;
    let uu = if dealias { ops::dealias(u) } else { u.clone() };
    let w = ops::curl(&uu)?;
    let up = uu.inverse();
    let wp = w.inverse();
    drop(w);
    let speed = up.max_abs();
    let cross = up.cross(&wp)?;
    drop(up);
    drop(wp);
    let c = cross.forward()?;
    let wn = g.wavenumbers();
    let mut out = ops::build(g, 3, |comp, m| {
        if dealias && !wn.in_dealias_band(m.a, m.b3, m.b2) {
            return C::default();
        }
        let d2 = m.d2();
        if d2 == 0.0 {
            // The mean of u × ω vanishes for periodic fields; keep momentum exact.
            return C::default();
        }
        let v = &c.comps;
        let dot = v[0][m.idx] * m.d[0] + v[1][m.idx] * m.d[1] + v[2][m.idx] * m.d[2];
        v[comp][m.idx] - dot * (m.d[comp] / d2)
    });
    out.dealiased = dealias;
    Ok((out, speed))
}

fn heat_factor(f: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    ops::apply_symbol(f, |m| (-s * m.k2()).exp())
}

fn axpy(y: &mut SpectralField, a: f64, x: &SpectralField) {
    for (yc, xc) in y.comps.iter_mut().zip(&x.comps) {
        par::zip_mut(yc, xc, |yv, xv| *yv += *xv * a);
    }
}

/// One integrating-factor RK4 step. Returns the new state and the CFL number
/// measured at the start of the step.
pub fn step(u: &SpectralField, nu: f64, dt: f64, dealias: bool) -> Result<(SpectralField, f64)> {
    let h = u.grid.spacing();
    let half = nu * dt / 2.0;
    let (k1, speed) = nonlinear(u, dealias)?;
    let cfl = speed * dt / h;

    let e_half_u = heat_factor(u, half);
    let mut acc = heat_factor(u, 2.0 * half);
    axpy(&mut acc, dt / 6.0, &heat_factor(&k1, 2.0 * half));

    let mut a = u.clone();
    axpy(&mut a, dt / 2.0, &k1);
    drop(k1);
    let a = heat_factor(&a, half);
    let (k2, _) = nonlinear(&a, dealias)?;
    drop(a);
    axpy(&mut acc, dt / 3.0, &heat_factor(&k2, half));

    let mut b = e_half_u.clone();
    axpy(&mut b, dt / 2.0, &k2);
    drop(k2);
    let (k3, _) = nonlinear(&b, dealias)?;
    drop(b);
    let k3h = heat_factor(&k3, half);
    drop(k3);
    axpy(&mut acc, dt / 3.0, &k3h);

    let mut c = heat_factor(&e_half_u, half);
    drop(e_half_u);
    axpy(&mut c, dt, &k3h);
    drop(k3h);
    let (k4, _) = nonlinear(&c, dealias)?;
    drop(c);
    axpy(&mut acc, dt / 6.0, &k4);
    acc.dealiased = false;
    Ok((acc, cfl))
}

/// Per-mode energies `½ Λ³ w |û|²` summed over components, and `|k|²`.
fn mode_energies(u: &SpectralField) -> Vec<f64> {
    let g = u.grid;
    let w = g.wavenumbers();
    let vol = g.volume();
    par::map_collect(g.len_spectral(), |i| {
        let (a, _, _) = w.split(i);
        0.5 * vol * w.weight(a) * u.comps.iter().map(|c| c[i].norm_sqr()).sum::<f64>()
    })
}

/// `ν ∫ ‖∇u‖²` over one step, per mode, with the logarithmic mean of the
/// endpoint energies (exact for pure viscous decay).
fn step_dissipation(g: &GridSpec, nu: f64, dt: f64, before: &[f64], after: &[f64]) -> f64 {
    let w = g.wavenumbers();
    par::sum_by(before.len(), |i| {
        let (a, b3, b2) = w.split(i);
        let k2 = w.k2_at(a, b3, b2);
        let (e0, e1) = (before[i], after[i]);
        let mean = if e0 <= 0.0 || e1 <= 0.0 {
            0.5 * (e0 + e1)
        } else if (e0 - e1).abs() <= 1e-12 * e0 {
            0.5 * (e0 + e1)
        } else {
            (e0 - e1) / (e0 / e1).ln()
        };
        2.0 * nu * k2 * mean * dt
    })
}

fn divergence_bound(u: &SpectralField) -> Result<f64> {
    let d = ops::divergence(u)?;
    let w = u.grid.wavenumbers();
    let c = &d.comps[0];
    Ok(par::sum_by(c.len(), |i| {
        let (a, _, _) = w.split(i);
        w.weight(a) * c[i].norm()
    }))
}

fn diagnose(u: &SpectralField, t: f64, cfl: f64, dissipated: f64) -> Result<Diagnostics> {
    let w = ops::curl(u)?;
    Ok(Diagnostics {
        t,
        energy: 0.5 * norms::sobolev_norm(u, 0.0).powi(2),
        enstrophy: 0.5 * norms::sobolev_norm(&w, 0.0).powi(2),
        h1: norms::sobolev_norm(u, 1.0),
        h2: norms::sobolev_norm(u, 2.0),
        h3: norms::sobolev_norm(u, 3.0),
        div_max: divergence_bound(u)?,
        cfl,
        dissipated,
    })
}

/// Integrate from `u0`, calling `observer(t_requested, t_step, u)` at every
/// snapshot time (nearest step). Returns the final state and diagnostics.
pub fn run_with<F>(u0: &SpectralField, cfg: &SolverConfig, mut observer: F) -> Result<(SpectralField, Vec<Diagnostics>)>
where
    F: FnMut(f64, f64, &SpectralField) -> Result<()>,
{
    cfg.validate()?;
    u0.check_finite()?;
    let (nsteps, dt) = cfg.steps();
    let g = u0.grid;
    let mut u = u0.clone();
    let mut diags = vec![diagnose(&u, 0.0, 0.0, 0.0)?];
    let mut energies = mode_energies(&u);
    let mut dissipated = 0.0;
    let mut pending = cfg.snapshot_times.iter().copied().peekable();
    let step_of = |t: f64| (t / dt).round() as usize;
    while let Some(&t) = pending.peek() {
        if step_of(t) == 0 {
            observer(t, 0.0, &u)?;
            pending.next();
        } else {
            break;
        }
    }
    for k in 1..=nsteps {
        let t_prev = (k - 1) as f64 * dt;
        let (next, cfl) = step(&u, cfg.nu, dt, cfg.dealias)?;
        if cfl > cfg.cfl_limit {
            return Err(Error::Cfl { t: t_prev, cfl, limit: cfg.cfl_limit });
        }
        next.check_finite()?;
        u = next;
        let t = k as f64 * dt;
        let e_next = mode_energies(&u);
        dissipated += step_dissipation(&g, cfg.nu, dt, &energies, &e_next);
        energies = e_next;
        diags.push(diagnose(&u, t, cfl, dissipated)?);
        while let Some(&ts) = pending.peek() {
            if step_of(ts).min(nsteps) == k {
                observer(ts, t, &u)?;
                pending.next();
            } else {
                break;
            }
        }
    }
    Ok((u, diags))
}

/// Integrate and keep the requested snapshots in memory.
pub fn run(u0: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory> {
    let mut snapshots = Vec::new();
    let (_, diagnostics) = run_with(u0, cfg, |t, t_step, u| {
        snapshots.push(Snapshot { t, t_step, u: u.clone() });
        Ok(())
    })?;
    Ok(Trajectory { nu: cfg.nu, snapshots, diagnostics })
}

/// Vorticity `curl u`.
pub fn vorticity(u: &SpectralField) -> Result<SpectralField> {
    ops::curl(u)
}

/// `ω(t) − e^{νtΔ}ω₀` from a trajectory holding snapshots at 0 and `t`.
pub fn duhamel_remainder(traj: &Trajectory, t: f64) -> Result<PhysicalField> {
    let s0 = traj.snapshot(0.0)?;
    let st = traj.snapshot(t)?;
    let w0 = vorticity(&s0.u)?;
    let wt = vorticity(&st.u)?;
    let lin = ops::heat(&w0, traj.nu * st.t_step)?;
    Ok(wt.sub(&lin)?.inverse())
}

/// Entry of a snapshot sidecar index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotIndexEntry {
    pub t: f64,
    pub path: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields;

    fn beltrami(g: GridSpec, freq: f64) -> SpectralField {
        PhysicalField::from_fn(g, |x| fields::eval_b_n(freq, x)).forward().unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let g = GridSpec::with_periods(16, 1).unwrap();
        let z = SpectralField::zeros(g, 3);
        let (u, _) = step(&z, 1.0, 0.01, true).unwrap();
        assert_eq!(u.max_coeff(), 0.0);
    }

    #[test]
    fn beltrami_decays_exactly() {
        let g = GridSpec::with_periods(16, 1).unwrap();
        let b = beltrami(g, 2.0);
        let cfg = SolverConfig::new(1.0, 0.01, 0.1);
        let (u, _) = run_with(&b, &cfg, |_, _, _| Ok(())).unwrap();
        let exact = b.scaled((-0.4f64).exp());
        assert!(u.sub(&exact).unwrap().max_coeff() < 1e-14);
    }

    #[test]
    fn snapshots_land_on_nearest_steps() {
        let g = GridSpec::with_periods(8, 1).unwrap();
        let b = beltrami(g, 1.0);
        let cfg = SolverConfig::new(1.0, 0.1, 1.0).with_snapshots(vec![0.0, 0.33, 1.0]);
        let tr = run(&b, &cfg).unwrap();
        let got: Vec<f64> = tr.snapshots.iter().map(|s| s.t_step).collect();
        assert_eq!(got.len(), 3);
        assert!((got[1] - 0.3).abs() < 1e-12 && (got[2] - 1.0).abs() < 1e-12);
        assert!(tr.snapshot(0.33).is_ok() && matches!(tr.snapshot(0.5), Err(Error::MissingSnapshot(_))));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 0.1, 1.0).validate().is_err());
        assert!(SolverConfig::new(1.0, 0.1, 1.0).with_snapshots(vec![0.5, 0.2]).validate().is_err());
        assert!(SolverConfig::new(1.0, 0.1, 1.0).with_snapshots(vec![2.0]).validate().is_err());
        assert_eq!(SolverConfig::new(1.0, 0.3, 1.0).steps().0, 4);
    }

    #[test]
    fn cfl_violation_aborts() {
        let g = GridSpec::with_periods(16, 1).unwrap();
        let b = beltrami(g, 1.0).scaled(100.0);
        let cfg = SolverConfig::new(1.0, 0.1, 0.2);
        assert!(matches!(run(&b, &cfg), Err(Error::Cfl { .. })));
    }
}
