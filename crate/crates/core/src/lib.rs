//! Pseudospectral laboratory for localized Beltrami initial data.
//!
//! The crate discretizes ℝ³ by a large periodic box centered at the origin and
//! provides the transforms, multipliers, field constructors, norms, a
//! Navier-Stokes integrator and a vorticity zero tracker needed to study
//! nonlinear smallness of large data and vortex reconnection.

pub mod error;
pub mod fft;
pub mod fields;
pub mod field;
pub mod grid;
pub mod linalg3;
pub mod norms;
pub mod ops;
pub mod par;
pub mod snapshot;
pub mod solver;
pub mod tolerances;
pub mod zeros;

pub use error::{Error, Result};
pub use field::{PhysicalField, SpectralField};
pub use grid::GridSpec;
