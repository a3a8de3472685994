//! Periodic box geometry and wavenumber bookkeeping.
//!
//! The box is `[-L/2, L/2)^3` sampled at `n` points per axis, so the origin is
//! the grid node with index `n/2` on every axis. Physical arrays are stored with
//! the x index fastest. Spectral arrays hold the non-negative half of the x
//! wavenumbers (real-to-complex layout) and are stored y-major:
//! `m1 + nh * (m3 + n * m2)` with `nh = n/2 + 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed when checking that the box side is a multiple of 2π.
const PERIOD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub box_length: f64,
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("n = {n} must be a power of two >= 4")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::Grid(format!("box_length = {box_length} must be positive")));
        }
        let periods = box_length / (2.0 * PI);
        if (periods - periods.round()).abs() > PERIOD_SLACK * periods.max(1.0) || periods.round() < 1.0 {
            return Err(Error::Grid(format!(
                "box_length = {box_length} is not a positive multiple of 2π"
            )));
        }
        Ok(Self { n, box_length })
    }

    /// Box of `periods` copies of `[0, 2π)` per axis.
    pub fn with_periods(n: usize, periods: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI * periods as f64)
    }

    pub fn periods(&self) -> usize {
        (self.box_length / (2.0 * PI)).round() as usize
    }

    pub fn nh(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn len_physical(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn len_spectral(&self) -> usize {
        self.nh() * self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Physical coordinate of grid index `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.box_length + i as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        [self.coord(idx % n), self.coord((idx / n) % n), self.coord(idx / (n * n))]
    }

    pub fn phys_index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        i1 + self.n * (i2 + self.n * i3)
    }

    /// Index of the node sitting at the origin.
    pub fn origin_index(&self) -> usize {
        let h = self.n / 2;
        self.phys_index(h, h, h)
    }

    /// Fundamental wavenumber 2π/L.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Signed integer wavenumber for a full-axis storage index.
    pub fn signed_mode(&self, idx: usize) -> i64 {
        let n = self.n as i64;
        let i = idx as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Largest wavenumber magnitude per axis, `π n / L`.
    pub fn k_max(&self) -> f64 {
        self.dk() * (self.n / 2) as f64
    }

    /// Per-axis 2/3-rule cutoff on the integer mode.
    pub fn dealias_mode(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Grid points per period of a Beltrami field of frequency `freq`.
    pub fn points_per_period(&self, freq: f64) -> f64 {
        self.n as f64 * 2.0 * PI / (self.box_length * freq)
    }

    pub fn resolves(&self, freq: f64) -> bool {
        self.points_per_period(freq) >= crate::tolerances::MIN_POINTS_PER_PERIOD - 1e-12
    }

    pub fn require_resolves(&self, freq: f64) -> Result<()> {
        self.require_points_per_period(freq, crate::tolerances::MIN_POINTS_PER_PERIOD)
    }

    pub fn require_points_per_period(&self, freq: f64, min: f64) -> Result<()> {
        if self.points_per_period(freq) >= min - 1e-12 {
            Ok(())
        } else {
            Err(Error::Resolution(format!(
                "frequency {freq} has {:.2} points per period on n = {}, L = {:.4}; at least {min} needed",
                self.points_per_period(freq),
                self.n,
                self.box_length,
            )))
        }
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch { left: *self, right: *other })
        }
    }

    pub fn wavenumbers(&self) -> Wavenumbers {
        Wavenumbers::new(self)
    }
}

/// Precomputed per-axis wavenumber tables in spectral storage order.
///
/// `k1` is indexed by the half-axis index, `k2`/`k3` by the full-axis index.
/// The `d*` tables are the derivative symbols: identical to `k*` except that
/// the Nyquist mode carries zero, which keeps odd-order multipliers
/// Hermitian-consistent.
#[derive(Debug, Clone)]
pub struct Wavenumbers {
    pub n: usize,
    pub nh: usize,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
    pub k3: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
    pub m1: Vec<i64>,
    pub m2: Vec<i64>,
    pub m3: Vec<i64>,
}

impl Wavenumbers {
    fn new(g: &GridSpec) -> Self {
        let n = g.n;
        let nh = g.nh();
        let dk = g.dk();
        let m_full: Vec<i64> = (0..n).map(|i| g.signed_mode(i)).collect();
        let m_half: Vec<i64> = (0..nh).map(|i| i as i64).collect();
        let nyq = (n / 2) as i64;
        let k = |m: &Vec<i64>| m.iter().map(|&m| m as f64 * dk).collect::<Vec<_>>();
        let d = |m: &Vec<i64>| {
            m.iter()
                .map(|&m| if m.abs() == nyq { 0.0 } else { m as f64 * dk })
                .collect::<Vec<_>>()
        };
        Self {
            n,
            nh,
            k1: k(&m_half),
            k2: k(&m_full),
            k3: k(&m_full),
            d1: d(&m_half),
            d2: d(&m_full),
            d3: d(&m_full),
            m1: m_half,
            m2: m_full.clone(),
            m3: m_full,
        }
    }

    /// Decompose a spectral storage index into (half-x, full-z, full-y) indices,
    /// the order used by every `*_at` helper.
    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize, usize) {
        let a = idx % self.nh;
        let rest = idx / self.nh;
        (a, rest % self.n, rest / self.n)
    }

    #[inline]
    pub fn index(&self, a: usize, b3: usize, b2: usize) -> usize {
        a + self.nh * (b3 + self.n * b2)
    }

    /// |k|^2 at the given storage indices.
    #[inline]
    pub fn k2_at(&self, a: usize, b3: usize, b2: usize) -> f64 {
        self.k1[a] * self.k1[a] + self.k2[b2] * self.k2[b2] + self.k3[b3] * self.k3[b3]
    }

    /// Parseval weight of a half-spectrum entry: interior x modes stand for
    /// themselves and their conjugate partner.
    #[inline]
    pub fn weight(&self, a: usize) -> f64 {
        if a == 0 || a == self.nh - 1 {
            1.0
        } else {
            2.0
        }
    }

    /// True if the mode survives the 2/3 rule.
    #[inline]
    pub fn in_dealias_band(&self, a: usize, b3: usize, b2: usize) -> bool {
        let c = (self.n / 3) as i64;
        self.m1[a].abs() <= c && self.m2[b2].abs() <= c && self.m3[b3].abs() <= c
    }
}
