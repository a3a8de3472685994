//! Physical and spectral field containers.
//!
//! A field carries one (scalar) or three (vector) components on a shared grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridSpec;
use crate::par;

type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub grid: GridSpec,
    pub comps: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub comps: Vec<Vec<C>>,
    /// Set when every mode outside the 2/3 band is known to be zero.
    pub dealiased: bool,
}

impl PhysicalField {
    pub fn zeros(grid: GridSpec, ncomp: usize) -> Self {
        Self { grid, comps: vec![vec![0.0; grid.len_physical()]; ncomp] }
    }

    /// Sample a vector-valued function at every node.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync + Send,
    {
        let vals = par::map_collect(grid.len_physical(), |i| f(grid.point(i)));
        let comps = (0..3).map(|c| vals.iter().map(|v| v[c]).collect()).collect();
        Self { grid, comps }
    }

    pub fn scalar_from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync + Send,
    {
        Self { grid, comps: vec![par::map_collect(grid.len_physical(), |i| f(grid.point(i)))] }
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.comps.iter().all(|c| c.iter().all(|v| v.is_finite())) {
            Ok(())
        } else {
            Err(Error::NonFinite("physical field"))
        }
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        let len = self.grid.len_physical();
        par::map_collect(len, |i| self.comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
    }

    pub fn max_abs(&self) -> f64 {
        let len = self.grid.len_physical();
        par::max_by(len, |i| self.comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
    }

    pub fn at(&self, idx: usize) -> Vec<f64> {
        self.comps.iter().map(|c| c[idx]).collect()
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.comps {
            c.iter_mut().for_each(|v| *v *= s);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &PhysicalField) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            par::zip_mut(a, b, |x, y| *x += s * y);
        }
        Ok(())
    }

    pub fn sub(&self, other: &PhysicalField) -> Result<PhysicalField> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Max over nodes of the Euclidean distance to `other`.
    pub fn max_diff(&self, other: &PhysicalField) -> f64 {
        let len = self.grid.len_physical();
        par::max_by(len, |i| {
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| (a[i] - b[i]).powi(2))
                .sum::<f64>()
                .sqrt()
        })
    }

    /// Pointwise cross product of two vector fields.
    pub fn cross(&self, other: &PhysicalField) -> Result<PhysicalField> {
        self.grid.check_same(&other.grid)?;
        let (a, b) = (&self.comps, &other.comps);
        let len = self.grid.len_physical();
        let comps = (0..3)
            .map(|c| {
                let (p, q) = ((c + 1) % 3, (c + 2) % 3);
                par::map_collect(len, |i| a[p][i] * b[q][i] - a[q][i] * b[p][i])
            })
            .collect();
        Ok(PhysicalField { grid: self.grid, comps })
    }

    pub fn forward(&self) -> Result<SpectralField> {
        self.check_finite()?;
        let plan = fft::plan(self.grid.n);
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut s = vec![C::default(); self.grid.len_spectral()];
                plan.forward(c, &mut s);
                s
            })
            .collect();
        Ok(SpectralField { grid: self.grid, comps, dealiased: false })
    }
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, ncomp: usize) -> Self {
        Self { grid, comps: vec![vec![C::default(); grid.len_spectral()]; ncomp], dealiased: true }
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn inverse(&self) -> PhysicalField {
        let plan = fft::plan(self.grid.n);
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut p = vec![0.0; self.grid.len_physical()];
                plan.inverse(c, &mut p);
                p
            })
            .collect();
        PhysicalField { grid: self.grid, comps }
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.comps {
            par::for_each_chunk(c, 4096, |_, ch| ch.iter_mut().for_each(|v| *v *= s));
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            par::zip_mut(a, b, |x, y| *x += y * s);
        }
        self.dealiased &= other.dealiased;
        Ok(())
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn component(&self, c: usize) -> SpectralField {
        Self { grid: self.grid, comps: vec![self.comps[c].clone()], dealiased: self.dealiased }
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.comps.iter().all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite())) {
            Ok(())
        } else {
            Err(Error::NonFinite("spectral field"))
        }
    }

    /// Largest coefficient magnitude over all components.
    pub fn max_coeff(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| par::max_by(c.len(), |i| c[i].norm()))
            .fold(0.0, f64::max)
    }

    /// Largest violation of `c(-k) = conj c(k)` on the self-conjugate planes.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let w = g.wavenumbers();
        let n = g.n;
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for a in [0, g.nh() - 1] {
                for b2 in 0..n {
                    for b3 in 0..n {
                        let p = c[w.index(a, b3, b2)];
                        let q = c[w.index(a, (n - b3) % n, (n - b2) % n)];
                        worst = worst.max((p - q.conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// Mean of each component (the k = 0 coefficient).
    pub fn mean(&self) -> Vec<C> {
        self.comps.iter().map(|c| c[0]).collect()
    }
}
