use thiserror::Error;

use crate::grid::GridSpec;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid mismatch: {left:?} vs {right:?}")]
    GridMismatch { left: GridSpec, right: GridSpec },
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("backward heat amplification {amplification:.3e} exceeds guard {guard:.1e}")]
    GuardExceeded { amplification: f64, guard: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("CFL violation at t = {t:.6}: number {cfl:.3} exceeds {limit}")]
    Cfl { t: f64, cfl: f64, limit: f64 },
    #[error("time {0} was not captured as a snapshot")]
    MissingSnapshot(f64),
    #[error("nonzero mean vorticity {0:.3e} has no Biot-Savart preimage")]
    MeanVorticity(f64),
    #[error("no vorticity zero found in [{lo}, {hi}]")]
    NoZeroInWindow { lo: f64, hi: f64 },
    #[error("window start t = {t} already has {count} vorticity zeros")]
    ZerosAtWindowStart { t: f64, count: usize },
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
