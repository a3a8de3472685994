//! Experiment configuration: TOML files layered over embedded defaults.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use beltrami_core::fields::DatumConfig;
use beltrami_core::solver::SolverConfig;
use beltrami_core::tolerances::{MIN_POINTS_PER_PERIOD, RECONNECTION_POINTS_PER_PERIOD};
use beltrami_core::zeros::ScanConfig;
use beltrami_core::GridSpec;
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Theorem1,
    Theorem2,
    Oracle,
    LemmaSweep,
    FirstZero,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Theorem1 => "theorem1",
            Experiment::Theorem2 => "theorem2",
            Experiment::Oracle => "oracle",
            Experiment::LemmaSweep => "lemma-sweep",
            Experiment::FirstZero => "first-zero",
        }
    }
}

/// Box of side `2π · periods` sampled at `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub periods: usize,
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec, LabError> {
        GridSpec::with_periods(self.n, self.periods).map_err(|e| LabError::Config(format!("grid: {e}")))
    }

    pub fn box_length(&self) -> f64 {
        2.0 * PI * self.periods as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Config {
    pub amplitudes: Vec<f64>,
    pub dilations: Vec<f64>,
    pub lambda: f64,
    pub alpha: f64,
    /// Constant in the smallness test `‖PΩ‖_E ≤ C*^{-1} exp(−C*‖u₀‖⁴)`.
    pub c_star: f64,
    pub e_norm: bool,
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
    /// Coarser time grid for the E-norm, which costs a product per time.
    pub e_norm_per_decade: usize,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Self {
            amplitudes: vec![1.0, 10.0, 100.0],
            dilations: vec![8.0, 16.0],
            lambda: 1.0,
            alpha: 2.0,
            c_star: 1.0,
            e_norm: true,
            t_min: 1e-3,
            t_max: 1e2,
            per_decade: 32,
            e_norm_per_decade: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem2Config {
    /// Amplitude of the backward-heat component (0 gives the control run).
    pub second_amplitude: f64,
    /// Step used up to `short_time`, where the small-time bounds are sampled.
    pub short_dt: f64,
    pub short_time: f64,
    pub short_samples: Vec<f64>,
    /// Times at which the vorticity is scanned for zeros.
    pub scan_times: Vec<f64>,
    /// Largest radius of the zero expected near the origin at `T`.
    pub origin_radius: f64,
    /// Bound on the relative closeness of the rescaled vorticity at `T`.
    pub closeness: f64,
    /// No-zero window `t ≤ c*/(νN²)`.
    pub c_star: f64,
    /// Required margin (ratio) in the weighted small-time bound.
    pub weighted_margin: f64,
    pub write_snapshots: bool,
}

impl Default for Theorem2Config {
    fn default() -> Self {
        Self {
            second_amplitude: 1.0,
            short_dt: 1e-3,
            short_time: 0.01,
            short_samples: vec![0.001, 0.002, 0.005, 0.01],
            scan_times: vec![0.0, 0.01, 0.5, 1.0],
            origin_radius: 0.5,
            closeness: 0.1,
            c_star: 0.01,
            weighted_margin: 10.0,
            write_snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub lambda: f64,
    /// Sampling interval of the error along the run.
    pub sample_every: f64,
    pub tolerance: f64,
    /// Horizon of the dt-halving study.
    pub halving_t_end: f64,
    pub halving_ratio: [f64; 2],
    /// Extra viscosities checked against the closed-form decay.
    pub nu_variants: Vec<f64>,
    /// Also measure the order on the nonlinear Taylor-Green flow.
    pub taylor_green: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            lambda: 2.0,
            sample_every: 0.05,
            tolerance: 1e-7,
            halving_t_end: 0.1,
            halving_ratio: [12.0, 20.0],
            nu_variants: vec![0.1],
            taylor_green: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda: f64,
    pub alpha: f64,
    pub dilations: Vec<f64>,
    /// Short time of the dilation sweep.
    pub commutator_t: f64,
    pub commutator_times: Vec<f64>,
    /// Dilation of the time sweep.
    pub commutator_dilation: f64,
    /// Box side in units of the dilation.
    pub box_factor: f64,
    pub points_per_period: f64,
    pub l_exponent: [f64; 2],
    pub t_exponent: [f64; 2],
    pub fn_freqs: Vec<u32>,
    pub fn_times: Vec<f64>,
    /// Heat decay of the reconnection vorticity's first part.
    pub decay_times: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            alpha: 2.0,
            dilations: vec![4.0, 8.0, 16.0, 32.0],
            commutator_t: 0.01,
            commutator_times: vec![0.0025, 0.005, 0.01, 0.02, 0.04],
            commutator_dilation: 8.0,
            box_factor: 8.0,
            points_per_period: 5.0,
            l_exponent: [-1.2, -0.8],
            t_exponent: [0.4, 0.6],
            fn_freqs: vec![4, 8, 16],
            fn_times: vec![0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0],
            decay_times: vec![0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirstZeroConfig {
    pub freqs: Vec<u32>,
    /// Grid size for each frequency.
    pub grid_sizes: Vec<usize>,
    /// Search window in units of `1/(νN²)`.
    pub window: [f64; 2],
    pub ratio_bounds: [f64; 2],
    /// Also run the control without the backward-heat component.
    pub control: bool,
    /// Stop after the first frequency whose bracket cannot be formed.
    pub stop_on_failure: bool,
}

impl Default for FirstZeroConfig {
    fn default() -> Self {
        Self {
            freqs: vec![8, 16],
            grid_sizes: vec![128, 256],
            window: [0.0, 64.0],
            ratio_bounds: [2.0, 8.0],
            control: false,
            stop_on_failure: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub grid: GridConfig,
    pub datum: DatumConfig,
    pub solver: SolverConfig,
    pub scan: ScanConfig,
    pub theorem1: Theorem1Config,
    pub theorem2: Theorem2Config,
    pub oracle: OracleConfig,
    pub sweep: SweepConfig,
    pub first_zero: FirstZeroConfig,
}

impl ExperimentConfig {
    /// Embedded defaults for one experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let datum = DatumConfig::default();
        let (grid, solver) = match experiment {
            Experiment::Theorem1 => (GridConfig { n: 128, periods: 21 }, SolverConfig::new(1.0, 1e-3, 1.0)),
            Experiment::Theorem2 | Experiment::FirstZero => (
                GridConfig { n: 128, periods: 2 },
                SolverConfig::new(datum.nu, 0.01, datum.t_target).with_snapshots(vec![0.5, 1.0]),
            ),
            Experiment::Oracle => (GridConfig { n: 64, periods: 1 }, SolverConfig::new(1.0, 1e-3, 1.0)),
            Experiment::LemmaSweep => (GridConfig { n: 128, periods: 2 }, SolverConfig::new(1.0, 1e-3, 1.0)),
        };
        Self {
            experiment,
            seed: 0,
            out: None,
            grid,
            datum,
            solver,
            scan: ScanConfig::default(),
            theorem1: Theorem1Config::default(),
            theorem2: Theorem2Config::default(),
            oracle: OracleConfig::default(),
            sweep: SweepConfig::default(),
            first_zero: FirstZeroConfig::default(),
        }
    }

    /// Parse `text` over the defaults of `experiment`. Keys absent from the
    /// file keep their default; unknown keys are rejected.
    pub fn from_toml(experiment: Experiment, text: &str) -> Result<Self, LabError> {
        let user: toml::Table = toml::from_str(text).map_err(|e| LabError::Config(format!("parse: {e}")))?;
        if let Some(tag) = user.get("experiment") {
            let tag: Experiment = tag
                .clone()
                .try_into()
                .map_err(|e| LabError::Config(format!("experiment: {e}")))?;
            if tag != experiment {
                return Err(LabError::Config(format!(
                    "experiment: file is for '{}' but the command is '{}'",
                    tag.name(),
                    experiment.name()
                )));
            }
        }
        let mut base = toml::Table::try_from(Self::defaults(experiment))
            .map_err(|e| LabError::Config(format!("defaults: {e}")))?;
        merge(&mut base, user);
        let cfg: Self = toml::Value::Table(base).try_into().map_err(|e| LabError::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(experiment: Experiment, path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(experiment, &text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }

    /// Cross-field consistency checks; each message names the violated rule.
    pub fn validate(&self) -> Result<(), LabError> {
        let fail = |m: String| Err(LabError::Config(m));
        let grid = self.grid.spec()?;
        self.datum.validate().map_err(|e| LabError::Config(format!("datum: {e}")))?;
        self.solver.validate().map_err(|e| LabError::Config(format!("solver: {e}")))?;
        self.scan.validate().map_err(|e| LabError::Config(format!("scan: {e}")))?;
        let freq = self.datum.freq as f64;
        match self.experiment {
            Experiment::Theorem2 => {
                if grid.points_per_period(freq) < RECONNECTION_POINTS_PER_PERIOD {
                    return fail(format!(
                        "grid: n = {} on a box of {} periods gives {:.2} points per period of N = {}, \
                         below the {} required for the reconnection datum",
                        self.grid.n,
                        self.grid.periods,
                        grid.points_per_period(freq),
                        self.datum.freq,
                        RECONNECTION_POINTS_PER_PERIOD
                    ));
                }
                if (self.solver.nu - self.datum.nu).abs() > 0.0 {
                    return fail(format!("solver.nu = {} differs from datum.nu = {}", self.solver.nu, self.datum.nu));
                }
                let t2 = &self.theorem2;
                if (self.solver.t_end - self.datum.t_target).abs() > 1e-12 {
                    return fail(format!(
                        "solver.t_end = {} must equal datum.t_target = {}",
                        self.solver.t_end, self.datum.t_target
                    ));
                }
                if !(t2.short_dt > 0.0 && t2.short_time > 0.0 && t2.short_time < self.solver.t_end) {
                    return fail("theorem2: need short_dt > 0 and 0 < short_time < solver.t_end".into());
                }
                if t2.short_samples.iter().any(|&t| !(t > 0.0 && t <= t2.short_time)) {
                    return fail("theorem2.short_samples must lie in (0, short_time]".into());
                }
                if !increasing(&t2.short_samples) || !increasing(&t2.scan_times) {
                    return fail("theorem2: sample and scan times must be strictly increasing".into());
                }
                if t2.scan_times.iter().any(|&t| !(0.0..=self.solver.t_end).contains(&t)) {
                    return fail(format!("theorem2.scan_times must lie in [0, {}]", self.solver.t_end));
                }
            }
            Experiment::FirstZero => {
                let fz = &self.first_zero;
                if fz.freqs.is_empty() || fz.freqs.len() != fz.grid_sizes.len() {
                    return fail("first_zero: freqs and grid_sizes must be nonempty and of equal length".into());
                }
                for (&f, &n) in fz.freqs.iter().zip(&fz.grid_sizes) {
                    let g = GridConfig { n, periods: self.grid.periods }.spec()?;
                    if g.points_per_period(f as f64) < RECONNECTION_POINTS_PER_PERIOD {
                        return fail(format!(
                            "first_zero: n = {n} gives {:.2} points per period of N = {f}, below {}",
                            g.points_per_period(f as f64),
                            RECONNECTION_POINTS_PER_PERIOD
                        ));
                    }
                }
                if !(fz.window[0] >= 0.0 && fz.window[1] > fz.window[0]) {
                    return fail("first_zero.window must satisfy 0 ≤ lo < hi".into());
                }
            }
            Experiment::Theorem1 => {
                let t1 = &self.theorem1;
                if grid.points_per_period(t1.lambda) < MIN_POINTS_PER_PERIOD {
                    return fail(format!(
                        "grid: {:.2} points per period of λ = {}, below {}",
                        grid.points_per_period(t1.lambda),
                        t1.lambda,
                        MIN_POINTS_PER_PERIOD
                    ));
                }
                if let Some(&l) = t1.dilations.iter().find(|&&l| l > grid.box_length / 8.0) {
                    return fail(format!("theorem1: dilation L = {l} exceeds box/8 = {:.3}", grid.box_length / 8.0));
                }
                if t1.amplitudes.is_empty() || t1.dilations.is_empty() || t1.amplitudes.iter().any(|&m| !(m > 0.0)) {
                    return fail("theorem1: amplitudes must be positive and both sweeps nonempty".into());
                }
                if !(t1.t_min > 0.0 && t1.t_max > t1.t_min && t1.per_decade >= 1 && t1.e_norm_per_decade >= 1) {
                    return fail("theorem1: time grid needs 0 < t_min < t_max and positive densities".into());
                }
            }
            Experiment::Oracle => {
                let o = &self.oracle;
                let lam = o.lambda;
                if lam <= 0.0 || (lam - lam.round()).abs() > 0.0 {
                    return fail(format!("oracle.lambda = {lam} must be a positive integer on a 2π-periodic box"));
                }
                if grid.points_per_period(lam) < MIN_POINTS_PER_PERIOD {
                    return fail(format!("grid: {:.2} points per period of λ = {lam}", grid.points_per_period(lam)));
                }
                if !(o.sample_every > 0.0 && o.halving_t_end > 0.0 && o.tolerance > 0.0) {
                    return fail("oracle: sample_every, halving_t_end and tolerance must be positive".into());
                }
                if o.nu_variants.iter().any(|&v| !(v > 0.0)) {
                    return fail("oracle.nu_variants must be positive".into());
                }
            }
            Experiment::LemmaSweep => {
                let s = &self.sweep;
                if s.dilations.len() < 2 || s.commutator_times.len() < 2 {
                    return fail("sweep: power-law fits need at least two dilations and two times".into());
                }
                if s.dilations.iter().chain(&s.commutator_times).any(|&v| !(v > 0.0)) {
                    return fail("sweep: dilations and times must be positive".into());
                }
                if !(s.box_factor >= 2.0 && s.points_per_period >= MIN_POINTS_PER_PERIOD) {
                    return fail(format!(
                        "sweep: box_factor must be ≥ 2 and points_per_period ≥ {MIN_POINTS_PER_PERIOD}"
                    ));
                }
                if s.decay_times.iter().any(|&t| t < 0.0) || !increasing(&s.decay_times) {
                    return fail("sweep.decay_times must be nonnegative and increasing".into());
                }
                if grid.points_per_period(freq) < RECONNECTION_POINTS_PER_PERIOD {
                    return fail(format!(
                        "grid: {:.2} points per period of N = {}, below {} for the heat-decay sweep",
                        grid.points_per_period(freq),
                        self.datum.freq,
                        RECONNECTION_POINTS_PER_PERIOD
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out").join(self.experiment.name()))
    }
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for e in [Experiment::Theorem1, Experiment::Theorem2, Experiment::Oracle, Experiment::LemmaSweep, Experiment::FirstZero] {
            let cfg = ExperimentConfig::defaults(e);
            cfg.validate().unwrap();
            let back = ExperimentConfig::from_toml(e, &cfg.to_toml()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn partial_files_override_defaults() {
        let cfg = ExperimentConfig::from_toml(Experiment::Oracle, "[oracle]\nlambda = 3.0\n").unwrap();
        assert_eq!(cfg.oracle.lambda, 3.0);
        assert_eq!(cfg.grid.n, 64);
    }
}
