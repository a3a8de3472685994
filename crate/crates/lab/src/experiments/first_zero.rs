//! First time the vorticity of the reconnection datum acquires a zero, and
//! its scaling with the carrier frequency.

use beltrami_core::fields::{build_theorem2_datum, DatumConfig};
use beltrami_core::zeros::{first_zero_resolution, first_zero_time};
use beltrami_core::Error as CoreError;
use serde::Serialize;

use crate::config::{ExperimentConfig, GridConfig};
use crate::report::{Check, Output, Report};
use crate::{LabError, StageExt};

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub freq: u32,
    pub n: usize,
    pub second_amplitude: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    /// `found`, `zeros-at-start` or `no-zero`.
    pub status: &'static str,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    /// Zero count at the window start when it is already positive.
    pub start_count: Option<usize>,
    pub restarts: usize,
}

impl Outcome {
    pub fn estimate(&self) -> Option<f64> {
        Some(0.5 * (self.lo? + self.hi?))
    }
}

/// Bisect for the first zero of one configuration. Empty and occupied
/// windows are outcomes, not errors.
pub fn search(cfg: &ExperimentConfig, freq: u32, n: usize, second_amplitude: f64) -> Result<Outcome, LabError> {
    let grid = GridConfig { n, periods: cfg.grid.periods }.spec()?;
    let datum_cfg = DatumConfig { freq, ..cfg.datum };
    let datum = build_theorem2_datum(grid, &datum_cfg, second_amplitude).stage("first-zero datum")?;
    let f = freq as f64;
    let unit = 1.0 / (datum_cfg.nu * f * f);
    let (lo, hi) = (cfg.first_zero.window[0] * unit, cfg.first_zero.window[1] * unit);
    let mut outcome = Outcome {
        freq,
        n,
        second_amplitude,
        window_lo: lo,
        window_hi: hi,
        status: "found",
        lo: None,
        hi: None,
        start_count: None,
        restarts: 0,
    };
    let width = first_zero_resolution(datum_cfg.nu, f);
    match first_zero_time(&datum.u0, &cfg.solver, (lo, hi), width, &cfg.scan) {
        Ok(fz) => {
            outcome.lo = Some(fz.lo);
            outcome.hi = Some(fz.hi);
            outcome.restarts = fz.restarts;
        }
        Err(CoreError::ZerosAtWindowStart { count, .. }) => {
            outcome.status = "zeros-at-start";
            outcome.start_count = Some(count);
        }
        Err(CoreError::NoZeroInWindow { .. }) => outcome.status = "no-zero",
        Err(e) => return Err(LabError::Stage { stage: "first-zero search", source: e }),
    }
    Ok(outcome)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let fz = &cfg.first_zero;
    let mut out = Output::new(&cfg.out_dir())?;
    let mut report = Report::new("first-zero");
    let mut outcomes = Vec::new();
    for (&freq, &n) in fz.freqs.iter().zip(&fz.grid_sizes) {
        let o = search(cfg, freq, n, cfg.theorem2.second_amplitude)?;
        let found = o.status == "found";
        let check = match o.status {
            "found" => Check::flag(&format!("first_zero_n{freq}"), o.estimate().unwrap_or(f64::NAN), "zero found in window", true)
                .with_note(format!("bracket [{:.6e}, {:.6e}]", o.lo.unwrap_or(f64::NAN), o.hi.unwrap_or(f64::NAN))),
            "zeros-at-start" => Check::flag(&format!("first_zero_n{freq}"), f64::NAN, "zero found in window", false)
                .with_note(format!(
                    "the vorticity already has {} interior zeros at t = {:.3e}",
                    o.start_count.unwrap_or(0),
                    o.window_lo
                )),
            _ => Check::flag(&format!("first_zero_n{freq}"), f64::NAN, "zero found in window", false)
                .with_note(format!("no zero up to t = {:.3e}", o.window_hi)),
        };
        report.push(check);
        outcomes.push(o);
        if !found && fz.stop_on_failure {
            report.note(format!("search stopped after N = {freq}"));
            break;
        }
    }

    let ratio_rule = format!("in [{}, {}]", fz.ratio_bounds[0], fz.ratio_bounds[1]);
    let estimate = |f: u32| outcomes.iter().find(|o| o.freq == f).and_then(Outcome::estimate);
    if fz.freqs.len() >= 2 {
        let (a, b) = (fz.freqs[0], fz.freqs[1]);
        let name = format!("first_zero_ratio_n{a}_over_n{b}");
        match (estimate(a), estimate(b)) {
            (Some(ta), Some(tb)) => {
                report.push(Check::within(&name, ta / tb, fz.ratio_bounds[0], fz.ratio_bounds[1]));
            }
            _ => report.push(
                Check::flag(&name, f64::NAN, &ratio_rule, false)
                    .with_note("a first-zero time is missing, so the ratio cannot be formed"),
            ),
        }
    }

    if fz.control {
        let freq = fz.freqs[0];
        let o = search(cfg, freq, fz.grid_sizes[0], 0.0)?;
        report.push(Check::flag(
            &format!("control_no_zero_n{freq}"),
            o.estimate().unwrap_or(f64::NAN),
            "no zero in window without the backward-heat component",
            o.status == "no-zero",
        ));
        outcomes.push(o);
    }
    out.csv("first_zero.csv", &outcomes)?;
    out.finish(report.finish())
}
