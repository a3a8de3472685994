//! Named numerical thresholds shared across modules.

/// Grid points required per period of the highest constructed frequency.
pub const MIN_POINTS_PER_PERIOD: f64 = 4.0;

/// Points per period for the reconnection datum. Its localizer has an
/// `e^{-|ξ|}` spectrum around the carrier, so the truncated tail is about
/// `e^{-(p/2 - 1)N}` for `p` points per period; zero scans need it negligible.
pub const RECONNECTION_POINTS_PER_PERIOD: f64 = 8.0;

/// Default ceiling on backward-heat amplification relative to the input peak.
pub const INVERSE_HEAT_GUARD: f64 = 1e6;

/// CFL number above which a step is refused.
pub const CFL_LIMIT: f64 = 0.5;

/// Localizer value at the box face, relative to its peak, below which
/// periodic images are considered negligible.
pub const BOX_TRUNCATION: f64 = 1e-6;

/// Newton convergence threshold on |f| relative to the local field scale.
pub const NEWTON_TOL: f64 = 1e-10;

/// Default classification tolerances, relative to the Jacobian spectral radius.
pub const TOL_DET: f64 = 1e-8;
pub const TOL_RE: f64 = 1e-6;

/// Fields below this fraction of the global peak are treated as resolution
/// noise by the zero scanner.
pub const SCAN_NOISE_FLOOR: f64 = 1e-8;

/// Log-spaced time quadrature defaults for caloric norms and the E-norm.
pub const T_MIN: f64 = 1e-4;
pub const T_MAX: f64 = 1e2;
pub const POINTS_PER_DECADE: usize = 32;
