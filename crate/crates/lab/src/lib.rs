//! Experiment drivers for the beltrami-core laboratory.
//!
//! Each command builds its data from an [`ExperimentConfig`], runs the
//! measurement, writes CSV/JSON tables to the output directory and returns a
//! [`Report`] with PASS/FAIL/INCONCLUSIVE checks.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{Experiment, ExperimentConfig};
pub use report::{Check, Report, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("stage '{stage}': {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: beltrami_core::Error,
    },
    #[error(transparent)]
    Core(#[from] beltrami_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Process exit code: 3 for configuration errors, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 3,
            _ => 1,
        }
    }
}

/// Attach a stage name to core errors.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T, LabError>;
}

impl<T> StageExt<T> for beltrami_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, LabError> {
        self.map_err(|source| LabError::Stage { stage, source })
    }
}

/// Run the configured experiment, writing outputs under its out directory.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Theorem1 => experiments::theorem1::run(cfg),
        Experiment::Theorem2 => experiments::theorem2::run(cfg),
        Experiment::Oracle => experiments::oracle::run(cfg),
        Experiment::LemmaSweep => experiments::sweep::run(cfg),
        Experiment::FirstZero => experiments::first_zero::run(cfg),
    }
}
