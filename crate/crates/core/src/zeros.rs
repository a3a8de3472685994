//! Zeros of vector fields: off-grid evaluation, Newton refinement,
//! hyperbolicity classification and grid scans.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::linalg3::{self, M3};
use crate::ops;
use crate::par;
use crate::solver::{self, SolverConfig, Trajectory};
use crate::tolerances::{NEWTON_TOL, SCAN_NOISE_FLOOR, TOL_DET, TOL_RE};

type C = Complex64;
type V3 = [f64; 3];

/// Lines whose largest coefficient is below this fraction of the field peak
/// are skipped during off-grid evaluation.
const PRUNE_REL: f64 = 1e-18;

/// Newton iterations allowed without halving the best residual.
const STALL_LIMIT: usize = 6;

/// Exact evaluation of the trigonometric interpolant of a spectral field.
pub struct Interpolant {
    grid: GridSpec,
    comps: Vec<Vec<C>>,
    /// Active (b3, b2) lines.
    lines: Vec<(usize, usize)>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k1: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
    weight: Vec<f64>,
    /// Σ |c| w, a bound on |f| used for roundoff estimates.
    coeff_mass: f64,
}

impl Interpolant {
    pub fn new(f: &SpectralField) -> Self {
        let g = f.grid;
        let w = g.wavenumbers();
        let (n, nh) = (g.n, g.nh());
        let peak = f.max_coeff();
        let mut lines = Vec::new();
        for b2 in 0..n {
            for b3 in 0..n {
                let base = nh * (b3 + n * b2);
                let line_max = f
                    .comps
                    .iter()
                    .flat_map(|c| c[base..base + nh].iter())
                    .fold(0.0_f64, |a, z| a.max(z.norm()));
                if line_max > PRUNE_REL * peak {
                    lines.push((b3, b2));
                }
            }
        }
        let weight: Vec<f64> = (0..nh).map(|a| w.weight(a)).collect();
        let coeff_mass = f
            .comps
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, z)| weight[i % nh] * z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        Self {
            grid: g,
            comps: f.comps.clone(),
            lines,
            k1: w.k1.clone(),
            k2: w.k2.clone(),
            k3: w.k3.clone(),
            d1: w.d1.clone(),
            d2: w.d2.clone(),
            d3: w.d3.clone(),
            weight,
            coeff_mass,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeff_mass(&self) -> f64 {
        self.coeff_mass
    }

    pub fn active_fraction(&self) -> f64 {
        self.lines.len() as f64 / (self.grid.n * self.grid.n) as f64
    }

    fn phases(k: &[f64], x: f64) -> Vec<C> {
        k.iter().map(|&k| C::from_polar(1.0, k * x)).collect()
    }

    /// Values and Jacobian `J[i][j] = ∂_j f_i` at `x`.
    pub fn eval_jet(&self, x: V3) -> (Vec<f64>, Vec<V3>) {
        let (n, nh) = (self.grid.n, self.grid.nh());
        let e1 = Self::phases(&self.k1, x[0]);
        let e2 = Self::phases(&self.k2, x[1]);
        let e3 = Self::phases(&self.k3, x[2]);
        let e1w: Vec<C> = (0..nh).map(|a| e1[a] * self.weight[a]).collect();
        let e1d: Vec<C> = (0..nh).map(|a| e1w[a] * C::new(0.0, self.d1[a])).collect();
        let mut vals = vec![0.0; self.comps.len()];
        let mut jac = vec![[0.0; 3]; self.comps.len()];
        for (ci, c) in self.comps.iter().enumerate() {
            let (mut v, mut dx, mut dy, mut dz) = (0.0, 0.0, 0.0, 0.0);
            for &(b3, b2) in &self.lines {
                let base = nh * (b3 + n * b2);
                let line = &c[base..base + nh];
                let mut s0 = C::default();
                let mut s1 = C::default();
                for a in 0..nh {
                    s0 += line[a] * e1w[a];
                    s1 += line[a] * e1d[a];
                }
                let ph = e2[b2] * e3[b3];
                let p0 = ph * s0;
                v += p0.re;
                dx += (ph * s1).re;
                dy -= self.d2[b2] * p0.im;
                dz -= self.d3[b3] * p0.im;
            }
            vals[ci] = v;
            jac[ci] = [dx, dy, dz];
        }
        (vals, jac)
    }

    pub fn eval(&self, x: V3) -> Vec<f64> {
        self.eval_jet(x).0
    }
}

/// Exact interpolant value at an arbitrary point.
pub fn eval_off_grid(f: &SpectralField, x: V3) -> Vec<f64> {
    Interpolant::new(f).eval(x)
}

/// Jacobian `∂_j f_i` of a vector field at `x` by spectral differentiation.
pub fn jacobian_at(f: &SpectralField, x: V3) -> M3 {
    let (_, j) = Interpolant::new(f).eval_jet(x);
    [j[0], j[1], j[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroClass {
    Hyperbolic,
    NonHyperbolic,
    Degenerate,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Eigen {
    pub re: f64,
    pub im: f64,
}

/// Classify a Jacobian by its eigenvalues. Tolerances are relative to the
/// spectral radius so the result is invariant under scaling.
pub fn classify(j: &M3, tol_det: f64, tol_re: f64) -> (ZeroClass, [C; 3]) {
    let eig = linalg3::eigenvalues(j);
    let radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if radius == 0.0 || !radius.is_finite() {
        return (ZeroClass::Degenerate, eig);
    }
    let det = linalg3::det(j);
    if det.abs() < tol_det * radius.powi(3) {
        return (ZeroClass::Degenerate, eig);
    }
    let min_re = eig.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    if min_re > tol_re * radius {
        (ZeroClass::Hyperbolic, eig)
    } else {
        (ZeroClass::NonHyperbolic, eig)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: V3,
    pub jacobian: M3,
    pub eigenvalues: [Eigen; 3],
    pub class: ZeroClass,
    /// |f| at the refined point.
    pub residual: f64,
    /// Convergence threshold the residual was held to.
    pub tolerance: f64,
    /// Within two cells of the box faces; periodic images may be involved.
    pub boundary: bool,
}

impl ZeroRecord {
    pub fn radius(&self) -> f64 {
        self.location.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Grid cells between seed candidates.
    pub stride: usize,
    /// Newton convergence on |f| relative to the local field scale |J| h.
    pub newton_tol: f64,
    pub max_iter: usize,
    pub tol_det: f64,
    pub tol_re: f64,
    /// Roots closer than this many cells are merged.
    pub dedup_cells: f64,
    /// A node seeds Newton when the linearized zero lies within this many
    /// strides of it.
    pub reach: f64,
    /// Nodes whose local scale |J| h is below this fraction of the global
    /// peak of |f| are treated as unresolved noise.
    pub noise_floor: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            stride: 1,
            newton_tol: NEWTON_TOL,
            max_iter: 50,
            tol_det: TOL_DET,
            tol_re: TOL_RE,
            dedup_cells: 0.5,
            reach: 1.0,
            noise_floor: SCAN_NOISE_FLOOR,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.stride >= 1
            && self.newton_tol > 0.0
            && self.max_iter >= 1
            && self.tol_det > 0.0
            && self.tol_re > 0.0
            && self.dedup_cells > 0.0
            && self.reach > 0.0
            && self.noise_floor >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::Parameter(format!("invalid scan configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScanStats {
    pub seeds: usize,
    pub converged: usize,
    pub failed: usize,
    pub merged: usize,
    pub below_noise_floor: usize,
    pub field_peak: f64,
    /// Coefficient mass outside the 2/3 band, an estimate of the pointwise
    /// truncation error. Nodes whose local scale falls below it are skipped.
    pub truncation_estimate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub zeros: Vec<ZeroRecord>,
    pub stats: ScanStats,
}

impl ScanResult {
    /// Zeros away from the box faces.
    pub fn interior(&self) -> impl Iterator<Item = &ZeroRecord> {
        self.zeros.iter().filter(|z| !z.boundary)
    }

    pub fn count(&self) -> usize {
        self.interior().count()
    }

    pub fn hyperbolic_count(&self) -> usize {
        self.interior().filter(|z| z.class == ZeroClass::Hyperbolic).count()
    }
}

fn wrap(grid: &GridSpec, x: f64) -> f64 {
    let l = grid.box_length;
    (x + 0.5 * l).rem_euclid(l) - 0.5 * l
}

fn periodic_dist(grid: &GridSpec, a: V3, b: V3) -> f64 {
    (0..3).map(|i| wrap(grid, a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

fn norm3(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Refined {
    x: V3,
    jac: M3,
    residual: f64,
    tolerance: f64,
}

fn refine(interp: &Interpolant, start: V3, cfg: &ScanConfig) -> Option<Refined> {
    let g = interp.grid();
    let h = g.spacing();
    let leash = (cfg.reach + 2.0) * cfg.stride as f64 * h;
    let roundoff = 64.0 * f64::EPSILON * interp.coeff_mass();
    let mut x = start;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..=cfg.max_iter {
        let (f, jv) = interp.eval_jet(x);
        let jac: M3 = [jv[0], jv[1], jv[2]];
        let res = norm3(&f);
        let tolerance = (cfg.newton_tol * linalg3::frobenius(&jac) * h).max(roundoff);
        if res <= tolerance {
            let x = [wrap(&g, x[0]), wrap(&g, x[1]), wrap(&g, x[2])];
            return Some(Refined { x, jac, residual: res, tolerance });
        }
        // Newton from a linearized seed halves the residual every step once
        // it is in the basin; a long run without progress will not converge.
        if res < 0.5 * best {
            best = res;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > STALL_LIMIT {
                return None;
            }
        }
        let d = linalg3::solve(&jac, [-f[0], -f[1], -f[2]])?;
        let step = norm3(&d);
        let cap = 2.0 * h;
        let s = if step > cap { cap / step } else { 1.0 };
        for i in 0..3 {
            x[i] += s * d[i];
        }
        if periodic_dist(&g, x, start) > leash {
            return None;
        }
    }
    None
}

/// Largest per-component weighted coefficient mass outside the 2/3 band.
pub fn truncation_estimate(f: &SpectralField) -> f64 {
    let w = f.grid.wavenumbers();
    f.comps
        .iter()
        .map(|c| {
            par::sum_by(c.len(), |i| {
                let (a, b3, b2) = w.split(i);
                if w.in_dealias_band(a, b3, b2) {
                    0.0
                } else {
                    w.weight(a) * c[i].norm()
                }
            })
        })
        .fold(0.0, f64::max)
}

/// Find, refine and classify the zeros of a 3-component field.
pub fn scan_zeros(f: &SpectralField, cfg: &ScanConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let g = f.grid;
    let n = g.n;
    let h = g.spacing();
    let vals = f.inverse();
    let grads: Vec<_> = (0..3).map(|axis| ops::partial(f, axis).inverse()).collect();
    let peak = vals.max_abs();
    let mut stats = ScanStats { field_peak: peak, ..Default::default() };
    if peak == 0.0 {
        return Ok(ScanResult { zeros: Vec::new(), stats });
    }
    let truncation = truncation_estimate(f);
    stats.truncation_estimate = truncation;
    let floor = (cfg.noise_floor * peak).max(truncation);
    let s = cfg.stride;
    let reach = cfg.reach * s as f64 * h;
    let ns = n.div_ceil(s);

    // Per-node linearized zero prediction; (seed, below_floor) per candidate.
    let per_node = par::map_collect(ns * ns * ns, |q| {
        let (i1, i2, i3) = ((q % ns) * s, ((q / ns) % ns) * s, (q / (ns * ns)) * s);
        let idx = g.phys_index(i1, i2, i3);
        let fv = [vals.comps[0][idx], vals.comps[1][idx], vals.comps[2][idx]];
        let mut jac = [[0.0; 3]; 3];
        for (j, gr) in grads.iter().enumerate() {
            for i in 0..3 {
                jac[i][j] = gr.comps[i][idx];
            }
        }
        if linalg3::frobenius(&jac) * h < floor {
            return (None, true);
        }
        let d = match linalg3::solve(&jac, [-fv[0], -fv[1], -fv[2]]) {
            Some(d) => d,
            None => return (None, false),
        };
        if d.iter().all(|v| v.abs() <= reach) {
            let p = g.point(idx);
            (Some([p[0] + d[0], p[1] + d[1], p[2] + d[2]]), false)
        } else {
            (None, false)
        }
    });
    drop(grads);
    drop(vals);
    stats.below_noise_floor = per_node.iter().filter(|(_, b)| *b).count();
    // Neighbouring nodes usually predict the same zero; keep one seed per
    // dedup cell so each root is refined about once.
    let dedup = cfg.dedup_cells * h;
    let mut occupied = std::collections::HashSet::new();
    let seeds: Vec<V3> = per_node
        .into_iter()
        .filter_map(|(s, _)| s)
        .filter(|x| occupied.insert(x.map(|v| (wrap(&g, v) / dedup).floor() as i64)))
        .collect();
    stats.seeds = seeds.len();

    let interp = Interpolant::new(f);
    let refined = par::map_slice(&seeds, |&x0| refine(&interp, x0, cfg));
    let mut zeros: Vec<ZeroRecord> = Vec::new();
    let edge = 0.5 * g.box_length - 2.0 * h;
    for r in refined {
        let Some(r) = r else {
            stats.failed += 1;
            continue;
        };
        stats.converged += 1;
        if let Some(prev) = zeros.iter_mut().find(|z| periodic_dist(&g, z.location, r.x) < dedup) {
            stats.merged += 1;
            if r.residual < prev.residual {
                prev.location = r.x;
                prev.residual = r.residual;
            }
            continue;
        }
        let (class, eig) = classify(&r.jac, cfg.tol_det, cfg.tol_re);
        zeros.push(ZeroRecord {
            location: r.x,
            jacobian: r.jac,
            eigenvalues: eig.map(|z| Eigen { re: z.re, im: z.im }),
            class,
            residual: r.residual,
            tolerance: r.tolerance,
            boundary: r.x.iter().any(|v| v.abs() > edge),
        });
    }
    zeros.sort_by(|a, b| a.radius().partial_cmp(&b.radius()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ScanResult { zeros, stats })
}

/// One line of a zero report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroReportLine {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub residual: f64,
    pub eigenvalues: [Eigen; 3],
    pub class: ZeroClass,
    pub boundary_flag: bool,
}

impl ZeroReportLine {
    pub fn new(t: f64, z: &ZeroRecord) -> Self {
        let [x, y, zz] = z.location;
        Self { t, x, y, z: zz, residual: z.residual, eigenvalues: z.eigenvalues, class: z.class, boundary_flag: z.boundary }
    }
}

/// Zero scan of the vorticity at one time.
#[derive(Debug, Clone)]
pub struct TimedScan {
    pub t: f64,
    pub result: ScanResult,
}

impl TimedScan {
    pub fn report_lines(&self) -> Vec<ZeroReportLine> {
        self.result.zeros.iter().map(|z| ZeroReportLine::new(self.t, z)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub t: f64,
    pub count: usize,
    pub hyperbolic_count: usize,
}

/// Scan the vorticity of every snapshot.
pub fn scan_trajectory(traj: &Trajectory, cfg: &ScanConfig) -> Result<Vec<TimedScan>> {
    traj.snapshots
        .iter()
        .map(|s| Ok(TimedScan { t: s.t, result: scan_zeros(&solver::vorticity(&s.u)?, cfg)? }))
        .collect()
}

/// Interior zero counts of the vorticity at every snapshot.
pub fn zero_count_series(traj: &Trajectory, cfg: &ScanConfig) -> Result<Vec<ZeroCount>> {
    Ok(scan_trajectory(traj, cfg)?
        .iter()
        .map(|s| ZeroCount { t: s.t, count: s.result.count(), hyperbolic_count: s.result.hyperbolic_count() })
        .collect())
}

/// Bracket `[lo, hi]` around the first time the vorticity acquires a zero.
#[derive(Debug, Clone)]
pub struct FirstZero {
    pub lo: f64,
    pub hi: f64,
    /// Scan at `hi`.
    pub at_hi: ScanResult,
    /// Number of solver restarts (one per bisection probe).
    pub restarts: usize,
}

impl FirstZero {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Bracket width required for a carrier frequency `freq`: `1e-3/(ν freq²)`.
pub fn first_zero_resolution(nu: f64, freq: f64) -> f64 {
    1e-3 / (nu * freq * freq)
}

/// Locate the first time in `window` at which the vorticity of the solution
/// from `u0` has an interior zero, by bisection on the zero-count indicator.
///
/// Each probe restarts the solver from the latest zero-free state, so the
/// work is about one full run plus a scan per probe. The bracket is refined
/// to `width` (see [`first_zero_resolution`]).
pub fn first_zero_time(
    u0: &SpectralField,
    solver_cfg: &SolverConfig,
    window: (f64, f64),
    width: f64,
    scan_cfg: &ScanConfig,
) -> Result<FirstZero> {
    let (lo, hi) = window;
    if !(lo >= 0.0 && hi > lo && width > 0.0) {
        return Err(Error::Parameter(format!("bad search window [{lo}, {hi}] or width {width}")));
    }
    solver_cfg.validate()?;
    let advance = |u: &SpectralField, dt_total: f64| -> Result<SpectralField> {
        if dt_total == 0.0 {
            return Ok(u.clone());
        }
        let mut cfg = solver_cfg.clone();
        cfg.t_end = dt_total;
        cfg.snapshot_times.clear();
        Ok(solver::run_with(u, &cfg, |_, _, _| Ok(()))?.0)
    };
    let scan_at = |u: &SpectralField| -> Result<ScanResult> { scan_zeros(&solver::vorticity(u)?, scan_cfg) };

    let mut u_lo = advance(u0, lo)?;
    let start = scan_at(&u_lo)?;
    if start.count() > 0 {
        return Err(Error::ZerosAtWindowStart { t: lo, count: start.count() });
    }
    let u_hi = advance(&u_lo, hi - lo)?;
    let mut at_hi = scan_at(&u_hi)?;
    if at_hi.count() == 0 {
        return Err(Error::NoZeroInWindow { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut restarts = 1;
    while b - a > width {
        let mid = 0.5 * (a + b);
        let u_mid = advance(&u_lo, mid - a)?;
        let r = scan_at(&u_mid)?;
        restarts += 1;
        if r.count() > 0 {
            b = mid;
            at_hi = r;
        } else {
            a = mid;
            u_lo = u_mid;
        }
    }
    Ok(FirstZero { lo: a, hi: b, at_hi, restarts })
}
