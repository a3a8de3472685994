//! Fourier multipliers: derivatives, curl, Leray projection, heat semigroup.
//!
//! First-order symbols use the derivative wavenumbers (Nyquist set to zero) so
//! that real fields stay real. The Laplacian uses the same symbol, which makes
//! `div grad = Δ` and `curl curl = -Δ` on solenoidal fields exact identities.
//! Heat multipliers use the true |k|^2 so that Nyquist content decays.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::{GridSpec, Wavenumbers};
use crate::par;
use crate::tolerances::INVERSE_HEAT_GUARD;

type C = Complex64;
const I: C = C { re: 0.0, im: 1.0 };

/// Wavenumber data at one spectral storage slot.
#[derive(Debug, Clone, Copy)]
pub struct Mode {
    pub idx: usize,
    pub a: usize,
    pub b3: usize,
    pub b2: usize,
    /// True wavenumber.
    pub k: [f64; 3],
    /// Derivative symbol (Nyquist zeroed).
    pub d: [f64; 3],
}

impl Mode {
    pub fn k2(&self) -> f64 {
        self.k[0] * self.k[0] + self.k[1] * self.k[1] + self.k[2] * self.k[2]
    }

    pub fn d2(&self) -> f64 {
        self.d[0] * self.d[0] + self.d[1] * self.d[1] + self.d[2] * self.d[2]
    }

    pub fn kabs(&self) -> f64 {
        self.k2().sqrt()
    }
}

/// Fill one spectral component by evaluating `f` at every mode.
pub fn fill_modes<F>(grid: &GridSpec, w: &Wavenumbers, out: &mut [C], f: F)
where
    F: Fn(&Mode) -> C + Sync + Send,
{
    let (n, nh) = (grid.n, grid.nh());
    par::for_each_chunk(out, nh * n, |b2, plane| {
        for b3 in 0..n {
            for a in 0..nh {
                let m = Mode {
                    idx: a + nh * (b3 + n * b2),
                    a,
                    b3,
                    b2,
                    k: [w.k1[a], w.k2[b2], w.k3[b3]],
                    d: [w.d1[a], w.d2[b2], w.d3[b3]],
                };
                plane[b3 * nh + a] = f(&m);
            }
        }
    });
}

/// Build a field with `ncomp` components from a per-mode, per-component rule.
pub fn build<F>(grid: GridSpec, ncomp: usize, f: F) -> SpectralField
where
    F: Fn(usize, &Mode) -> C + Sync + Send,
{
    let w = grid.wavenumbers();
    let mut out = SpectralField::zeros(grid, ncomp);
    out.dealiased = false;
    for (c, comp) in out.comps.iter_mut().enumerate() {
        fill_modes(&grid, &w, comp, |m| f(c, m));
    }
    out
}

/// Multiply every component by a scalar symbol.
pub fn apply_symbol<F>(f: &SpectralField, sym: F) -> SpectralField
where
    F: Fn(&Mode) -> f64 + Sync + Send,
{
    let g = f.grid;
    let mut out = build(g, f.ncomp(), |c, m| f.comps[c][m.idx] * sym(m));
    out.dealiased = f.dealiased;
    out
}

fn require_vector(f: &SpectralField, what: &'static str) -> Result<()> {
    if f.ncomp() == 3 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{what} expects a 3-component field, got {}", f.ncomp())))
    }
}

pub fn curl(f: &SpectralField) -> Result<SpectralField> {
    require_vector(f, "curl")?;
    let u = &f.comps;
    let mut out = build(f.grid, 3, |c, m| {
        let (p, q) = ((c + 1) % 3, (c + 2) % 3);
        I * (u[q][m.idx] * m.d[p] - u[p][m.idx] * m.d[q])
    });
    out.dealiased = f.dealiased;
    Ok(out)
}

pub fn divergence(f: &SpectralField) -> Result<SpectralField> {
    require_vector(f, "divergence")?;
    let u = &f.comps;
    let mut out = build(f.grid, 1, |_, m| {
        I * (u[0][m.idx] * m.d[0] + u[1][m.idx] * m.d[1] + u[2][m.idx] * m.d[2])
    });
    out.dealiased = f.dealiased;
    Ok(out)
}

pub fn gradient(f: &SpectralField) -> Result<SpectralField> {
    if f.ncomp() != 1 {
        return Err(Error::Parameter("gradient expects a scalar field".into()));
    }
    let s = &f.comps[0];
    let mut out = build(f.grid, 3, |c, m| I * s[m.idx] * m.d[c]);
    out.dealiased = f.dealiased;
    Ok(out)
}

/// Partial derivative of every component along `axis`.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let mut out = build(f.grid, f.ncomp(), |c, m| I * f.comps[c][m.idx] * m.d[axis]);
    out.dealiased = f.dealiased;
    out
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    apply_symbol(f, |m| -m.d2())
}

/// Orthogonal projection onto solenoidal fields.
pub fn leray_project(f: &SpectralField) -> Result<SpectralField> {
    require_vector(f, "leray_project")?;
    let u = &f.comps;
    let mut out = build(f.grid, 3, |c, m| {
        let d2 = m.d2();
        let v = u[c][m.idx];
        if d2 == 0.0 {
            return v;
        }
        let dot = u[0][m.idx] * m.d[0] + u[1][m.idx] * m.d[1] + u[2][m.idx] * m.d[2];
        v - dot * (m.d[c] / d2)
    });
    out.dealiased = f.dealiased;
    Ok(out)
}

/// Velocity with the given vorticity: `u = i d × ω / |d|^2`.
pub fn biot_savart(omega: &SpectralField) -> Result<SpectralField> {
    require_vector(omega, "biot_savart")?;
    let mean = omega.mean().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if mean > 1e-12 * omega.max_coeff().max(f64::MIN_POSITIVE) {
        return Err(Error::MeanVorticity(mean));
    }
    let w = &omega.comps;
    let mut out = build(omega.grid, 3, |c, m| {
        let d2 = m.d2();
        if d2 == 0.0 {
            return C::default();
        }
        let (p, q) = ((c + 1) % 3, (c + 2) % 3);
        I * (w[q][m.idx] * m.d[p] - w[p][m.idx] * m.d[q]) / d2
    });
    out.dealiased = omega.dealiased;
    Ok(out)
}

/// Forward heat flow `e^{sΔ}`. Negative `s` is delegated to [`inverse_heat`]
/// with the default guard.
pub fn heat(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if s < 0.0 {
        return inverse_heat(f, -s, INVERSE_HEAT_GUARD);
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    Ok(apply_symbol(f, |m| (-s * m.k2()).exp()))
}

/// Backward heat flow `e^{-sΔ}`.
///
/// Fails with [`Error::GuardExceeded`] when the largest amplified coefficient
/// exceeds `guard` times the largest input coefficient: the input then carries
/// content (typically roundoff) the forward flow could not have produced at
/// this resolution.
pub fn inverse_heat(f: &SpectralField, s: f64, guard: f64) -> Result<SpectralField> {
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("inverse_heat needs s > 0, got {s}")));
    }
    let peak_in = f.max_coeff();
    let out = apply_symbol(f, |m| (s * m.k2()).exp());
    // Exact zeros times an overflowed factor give NaN; they carry no content.
    let mut out = out;
    for (oc, ic) in out.comps.iter_mut().zip(&f.comps) {
        par::zip_mut(oc, ic, |o, i| {
            if *i == C::default() {
                *o = C::default();
            }
        });
    }
    let peak_out = out
        .comps
        .iter()
        .map(|c| par::max_by(c.len(), |i| if c[i].norm().is_finite() { c[i].norm() } else { f64::INFINITY }))
        .fold(0.0, f64::max);
    if peak_in == 0.0 {
        return Ok(out);
    }
    let amplification = peak_out / peak_in;
    if !(amplification <= guard) {
        return Err(Error::GuardExceeded { amplification, guard });
    }
    Ok(out)
}

/// Zero every mode outside the 2/3 band.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let g = f.grid;
    let w = g.wavenumbers();
    let mut out = build(g, f.ncomp(), |c, m| {
        if w.in_dealias_band(m.a, m.b3, m.b2) {
            f.comps[c][m.idx]
        } else {
            C::default()
        }
    });
    out.dealiased = true;
    out
}

/// Discrete L^2 inner product `L^3 Σ_k <f, g>` summed over components.
pub fn inner(f: &SpectralField, g: &SpectralField) -> f64 {
    let w = f.grid.wavenumbers();
    let vol = f.grid.volume();
    let mut total = 0.0;
    for (a, b) in f.comps.iter().zip(&g.comps) {
        total += par::sum_by(a.len(), |i| {
            let (ax, _, _) = w.split(i);
            w.weight(ax) * (a[i].conj() * b[i]).re
        });
    }
    total * vol
}
