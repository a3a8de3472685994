//! Scaling sweeps of the localization estimates: heat-flow commutator,
//! `F_N`, heat decay of `ω₀¹`, Bernstein ratios and the gradient growth of
//! the algebraic localizer.

use std::f64::consts::PI;

use beltrami_core::fields::{build_omega01, f_n, gradient_growth_constant, LocalizerSpec};
use beltrami_core::norms::{self, fit_power_law};
use beltrami_core::{ops, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, SweepConfig};
use crate::report::{Check, Output, Report};
use crate::{LabError, StageExt};

/// Predicted exponents, printed next to the fitted ones.
pub const PREDICTED_L_EXPONENT: f64 = -1.0;
pub const PREDICTED_T_EXPONENT: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorRow {
    pub dilation: f64,
    pub t: f64,
    pub n: usize,
    pub periods: usize,
    pub sup_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FnRow {
    pub freq: u32,
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub h_r: f64,
    /// `N^{r+2} e^{−νN²t/2} + N^{−(2r−r−4)} √F_N(t)`.
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BernsteinRow {
    pub rho: f64,
    pub lp_to_lq: f64,
    pub gradient: f64,
}

/// Box of at least `box_factor · L` per side, sampled at `points_per_period`
/// points per period of `λ`.
pub fn box_for(s: &SweepConfig, dilation: f64) -> Result<GridSpec, LabError> {
    let periods = (s.box_factor * dilation / (2.0 * PI)).ceil().max(1.0) as usize;
    let n = ((s.points_per_period * periods as f64 * s.lambda).ceil() as usize).next_power_of_two();
    GridSpec::with_periods(n, periods).stage("sweep grid")
}

pub fn commutator(s: &SweepConfig, dilation: f64, t: f64) -> Result<CommutatorRow, LabError> {
    let grid = box_for(s, dilation)?;
    let loc = LocalizerSpec::inverse_power(s.alpha).dilated(dilation);
    let sup_norm = norms::commutator_norm(grid, &loc, s.lambda, t, f64::INFINITY).stage("commutator")?;
    Ok(CommutatorRow { dilation, t, n: grid.n, periods: grid.periods(), sup_norm })
}

pub fn dilation_sweep(s: &SweepConfig) -> Result<Vec<CommutatorRow>, LabError> {
    s.dilations.iter().map(|&l| commutator(s, l, s.commutator_t)).collect()
}

pub fn time_sweep(s: &SweepConfig) -> Result<Vec<CommutatorRow>, LabError> {
    s.commutator_times.iter().map(|&t| commutator(s, s.commutator_dilation, t)).collect()
}

pub fn l_exponent(rows: &[CommutatorRow]) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|r| r.dilation).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.sup_norm).collect();
    fit_power_law(&xs, &ys)
}

pub fn t_exponent(rows: &[CommutatorRow]) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.sup_norm).collect();
    fit_power_law(&xs, &ys)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let s = &cfg.sweep;
    let d = &cfg.datum;
    let mut out = Output::new(&cfg.out_dir())?;
    let mut report = Report::new("lemma-sweep");

    let by_l = dilation_sweep(s)?;
    let el = l_exponent(&by_l);
    report.push(
        Check::within("commutator_l_exponent", el, s.l_exponent[0], s.l_exponent[1])
            .with_note(format!("predicted {PREDICTED_L_EXPONENT}")),
    );
    let by_t = time_sweep(s)?;
    let et = t_exponent(&by_t);
    report.push(
        Check::within("commutator_t_exponent", et, s.t_exponent[0], s.t_exponent[1])
            .with_note(format!("predicted {PREDICTED_T_EXPONENT}")),
    );
    out.csv("commutator_dilation.csv", &by_l)?;
    out.csv("commutator_time.csv", &by_t)?;

    let mut fn_rows = Vec::new();
    let mut fn_ok = true;
    for &freq in &s.fn_freqs {
        let vals: Vec<f64> = s.fn_times.iter().map(|&t| f_n(freq as f64, d.nu, t)).collect();
        fn_ok &= vals.windows(2).all(|w| w[1] <= w[0]) && (s.fn_times[0] != 0.0 || vals[0] == 1.0);
        fn_ok &= vals.iter().all(|v| (0.0..=1.0).contains(v));
        fn_rows.extend(s.fn_times.iter().zip(vals).map(|(&t, value)| FnRow { freq, t, value }));
    }
    report.push(Check::flag("f_n_monotone_and_normalized", fn_rows.len() as f64, "F_N(0) = 1, nonincreasing, in [0, 1]", fn_ok));
    out.csv("f_n.csv", &fn_rows)?;

    // Heat decay of ω₀¹ against its envelope, the constant fitted at t = 0.
    let grid = cfg.grid.spec()?;
    let (n, r) = (d.freq as f64, d.r as f64);
    let omega01 = build_omega01(grid, n, &LocalizerSpec::inverse_power(d.alpha)).stage("heat decay datum")?.spectral;
    let mut decay = Vec::new();
    for &t in &s.decay_times {
        let h_r = norms::sobolev_norm(&ops::heat(&omega01, d.nu * t).stage("heat decay")?, r);
        let envelope = n.powf(r + 2.0) * (-0.5 * d.nu * n * n * t).exp() + n.powf(-(r - 4.0)) * f_n(n, d.nu, t).sqrt();
        decay.push(DecayRow { t, h_r, envelope, ratio: h_r / envelope });
    }
    let c0 = decay[0].ratio;
    let worst = decay.iter().map(|row| row.ratio / c0).fold(0.0, f64::max);
    report.push(Check::below("heat_decay_over_envelope", worst, 1.0 + 1e-9).with_note(format!("fitted constant {c0:.4e}")));
    out.csv("heat_decay.csv", &decay)?;

    let mut bern = Vec::new();
    for j in 0..4 {
        let rho = 0.25 * n * 2f64.powi(j);
        if rho > grid.k_max() {
            break;
        }
        let b = norms::bernstein_ratios(&omega01, rho, 2.0, f64::INFINITY).stage("bernstein")?;
        bern.push(BernsteinRow { rho, lp_to_lq: b.lp_to_lq, gradient: b.gradient });
    }
    for b in &bern {
        report.push(Check::info(&format!("bernstein_lp_to_lq_rho{}", b.rho), b.lp_to_lq));
        report.push(Check::info(&format!("bernstein_gradient_rho{}", b.rho), b.gradient));
    }
    out.csv("bernstein.csv", &bern)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sample = |scale: f64| -> Vec<[f64; 3]> {
        (0..16).map(|_| [0; 3].map(|_: i32| rng.gen_range(-scale..scale))).collect()
    };
    let xs = sample(10.0);
    let ys = sample(3.0);
    report.push(Check::info("gradient_growth_constant", gradient_growth_constant(d.alpha, &xs, &ys, 16)));
    out.finish(report.finish())
}
