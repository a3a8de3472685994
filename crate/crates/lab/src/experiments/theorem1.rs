//! Large-data sweep: scaling-invariant norms of `M curl(φ_L B_λ)` over an
//! `(M, L)` grid, with the E-norm of its quadratic forcing.

use beltrami_core::fields::build_theorem1_datum;
use beltrami_core::norms::{self, BesovParams, TimeGrid};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::report::{Check, Output, Report};
use crate::{LabError, StageExt};

/// Relative spread allowed for `‖u₀‖/M` across amplitudes.
pub const HOMOGENEITY_TOL: f64 = 1e-10;
/// Relative spread allowed for `‖u₀‖/M` across dilations at `λ = 1`.
pub const DILATION_SPREAD: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub amplitude: f64,
    pub dilation: f64,
    pub besov_inf_inf: f64,
    pub besov_inf_2: f64,
    /// `None` when the E-norm was not requested.
    pub e_norm: Option<f64>,
    pub e_integrated: Option<f64>,
    pub e_square: Option<f64>,
    /// `C*^{-1} exp(−C*‖u₀‖⁴_{Ḃ⁻¹_{∞,2}})`.
    pub cg_rhs: f64,
    pub cg_margin: Option<f64>,
    /// Spectral versus closed-form construction of the datum.
    pub two_path_disagreement: f64,
}

/// Norms of one `(M, L)` cell. Both Besov norms share one heat-flow profile.
pub fn cell(cfg: &ExperimentConfig, amplitude: f64, dilation: f64) -> Result<Cell, LabError> {
    let t1 = &cfg.theorem1;
    let grid = cfg.grid.spec()?;
    let datum = build_theorem1_datum(grid, amplitude, dilation, t1.lambda, t1.alpha).stage("theorem1 datum")?;
    let u0 = &datum.spectral;
    let tgrid = TimeGrid::log(t1.t_min, t1.t_max, t1.per_decade).stage("theorem1 time grid")?;
    let profile = norms::caloric_profile(u0, f64::INFINITY, &tgrid).stage("theorem1 heat profile")?;
    let inf_inf = BesovParams::new(-1.0, f64::INFINITY, f64::INFINITY).stage("theorem1 besov")?;
    let inf_2 = BesovParams::new(-1.0, f64::INFINITY, 2.0).stage("theorem1 besov")?;
    let besov_inf_inf = norms::besov_from_profile(&profile, inf_inf, &tgrid).stage("theorem1 besov")?.value;
    let besov_inf_2 = norms::besov_from_profile(&profile, inf_2, &tgrid).stage("theorem1 besov")?.value;
    let cg_rhs = (-t1.c_star * besov_inf_2.powi(4)).exp() / t1.c_star;
    let e = if t1.e_norm {
        let coarse = TimeGrid::log(t1.t_min, t1.t_max, t1.e_norm_per_decade).stage("theorem1 time grid")?;
        Some(norms::e_norm(u0, &coarse).stage("theorem1 e-norm")?)
    } else {
        None
    };
    Ok(Cell {
        amplitude,
        dilation,
        besov_inf_inf,
        besov_inf_2,
        e_norm: e.as_ref().map(|e| e.report.value),
        e_integrated: e.as_ref().map(|e| e.integrated_besov),
        e_square: e.as_ref().map(|e| e.square_function),
        cg_rhs,
        cg_margin: e.as_ref().map(|e| cg_rhs - e.report.value),
        two_path_disagreement: datum.relative_disagreement(),
    })
}

fn spread(vals: &[f64]) -> f64 {
    let hi = vals.iter().copied().fold(f64::MIN, f64::max);
    let lo = vals.iter().copied().fold(f64::MAX, f64::min);
    (hi - lo) / hi.abs().max(f64::MIN_POSITIVE)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let t1 = &cfg.theorem1;
    let mut out = Output::new(&cfg.out_dir())?;
    let mut report = Report::new("theorem1");
    let mut cells = Vec::new();
    for &l in &t1.dilations {
        for &m in &t1.amplitudes {
            cells.push(cell(cfg, m, l)?);
        }
    }
    out.csv("theorem1.csv", &cells)?;

    let per_m = |c: &Cell| c.besov_inf_inf / c.amplitude;
    let homogeneity = t1
        .dilations
        .iter()
        .map(|&l| spread(&cells.iter().filter(|c| c.dilation == l).map(per_m).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    report.push(Check::below("besov_per_amplitude_spread_over_m", homogeneity, HOMOGENEITY_TOL));

    let m0 = t1.amplitudes[0];
    let over_l: Vec<f64> = cells.iter().filter(|c| c.amplitude == m0).map(per_m).collect();
    let l_spread = spread(&over_l);
    if t1.lambda == 1.0 && t1.dilations.len() > 1 {
        report.push(Check::below("besov_per_amplitude_spread_over_l", l_spread, DILATION_SPREAD));
    } else {
        report.push(Check::info("besov_per_amplitude_spread_over_l", l_spread));
    }
    for c in cells.iter().filter(|c| c.amplitude == m0) {
        report.push(Check::info(&format!("besov_inf_inf_per_m_l{}", c.dilation), per_m(c)));
        report.push(Check::info(&format!("besov_inf_2_per_m_l{}", c.dilation), c.besov_inf_2 / c.amplitude));
    }

    if t1.e_norm {
        for &m in &t1.amplitudes {
            let e: Vec<f64> = cells.iter().filter(|c| c.amplitude == m).filter_map(|c| c.e_norm).collect();
            let decreasing = e.windows(2).all(|w| w[1] < w[0]);
            let last = e.last().copied().unwrap_or(f64::NAN);
            report.push(Check::flag(&format!("e_norm_decreasing_in_l_m{m}"), last, "strictly decreasing in L", decreasing));
        }
        let best = cells.iter().filter_map(|c| c.cg_margin).fold(f64::MIN, f64::max);
        report.push(Check::info("largest_cg_margin", best).with_note("positive margin means the smallness test holds"));
    }
    let worst = cells.iter().map(|c| c.two_path_disagreement).fold(0.0, f64::max);
    report.push(Check::info("two_path_disagreement", worst).with_note(
        "periodic images of the algebraic localizer separate the sampled product from the closed form",
    ));
    out.finish(report.finish())
}
