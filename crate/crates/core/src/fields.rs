//! Closed-form fields and the composite initial data.
//!
//! Every composite field is available along two independent paths: spectral
//! differentiation of sampled products, and pointwise evaluation of the
//! expanded analytic formula. Comparing the two is the construction check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::grid::GridSpec;
use crate::ops;
use crate::tolerances::{BOX_TRUNCATION, INVERSE_HEAT_GUARD, RECONNECTION_POINTS_PER_PERIOD};

type C = Complex64;
type V3 = [f64; 3];

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Shear Beltrami field `B_N = (sin N x3, cos N x3, 0)`, `curl B_N = N B_N`.
pub fn eval_b_n(freq: f64, x: V3) -> V3 {
    let (s, c) = (freq * x[2]).sin_cos();
    [s, c, 0.0]
}

/// `∂_3 B_N`; the other partials vanish.
fn b_n_dz(freq: f64, x: V3) -> V3 {
    let (s, c) = (freq * x[2]).sin_cos();
    [freq * c, -freq * s, 0.0]
}

/// Double-curl eigenfield `W = (sin x2, sin x3, sin x1)`.
pub fn eval_w(x: V3) -> V3 {
    [x[1].sin(), x[2].sin(), x[0].sin()]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LocalizerSpec {
    /// `(1 + |x/L|^2)^-α`.
    InversePower { alpha: f64, dilation: f64 },
    /// `exp(-|x/L|^2 / (8 ν T))`.
    Gaussian { nu_t: f64, dilation: f64 },
}

impl LocalizerSpec {
    pub fn inverse_power(alpha: f64) -> Self {
        Self::InversePower { alpha, dilation: 1.0 }
    }

    pub fn gaussian(nu_t: f64) -> Self {
        Self::Gaussian { nu_t, dilation: 1.0 }
    }

    pub fn dilated(self, l: f64) -> Self {
        match self {
            Self::InversePower { alpha, .. } => Self::InversePower { alpha, dilation: l },
            Self::Gaussian { nu_t, .. } => Self::Gaussian { nu_t, dilation: l },
        }
    }

    pub fn dilation(&self) -> f64 {
        match *self {
            Self::InversePower { dilation, .. } | Self::Gaussian { dilation, .. } => dilation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::InversePower { alpha, dilation } => alpha >= 1.0 && dilation > 0.0,
            Self::Gaussian { nu_t, dilation } => nu_t > 0.0 && dilation > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid localizer {self:?}")))
        }
    }

    pub fn value(&self, x: V3) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        match *self {
            Self::InversePower { alpha, dilation } => (1.0 + r2 / (dilation * dilation)).powf(-alpha),
            Self::Gaussian { nu_t, dilation } => (-r2 / (8.0 * nu_t * dilation * dilation)).exp(),
        }
    }

    /// Value, gradient and Hessian at `x`.
    pub fn jet(&self, x: V3) -> (f64, V3, [V3; 3]) {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        // Both profiles are g(r^2); derivatives follow from g' and g''.
        let (g, g1, g2) = match *self {
            Self::InversePower { alpha, dilation } => {
                let l2 = dilation * dilation;
                let s = 1.0 + r2 / l2;
                let g = s.powf(-alpha);
                let g1 = -alpha * g / s / l2;
                let g2 = alpha * (alpha + 1.0) * g / (s * s) / (l2 * l2);
                (g, g1, g2)
            }
            Self::Gaussian { nu_t, dilation } => {
                let c = 1.0 / (8.0 * nu_t * dilation * dilation);
                let g = (-c * r2).exp();
                (g, -c * g, c * c * g)
            }
        };
        let grad = [2.0 * g1 * x[0], 2.0 * g1 * x[1], 2.0 * g1 * x[2]];
        let mut hess = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                hess[i][j] = 4.0 * g2 * x[i] * x[j] + if i == j { 2.0 * g1 } else { 0.0 };
            }
        }
        (g, grad, hess)
    }

    /// Value at the center of a box face relative to the peak value 1.
    pub fn face_ratio(&self, grid: &GridSpec) -> f64 {
        self.value([0.5 * grid.box_length, 0.0, 0.0])
    }

    /// True when periodic images are below [`BOX_TRUNCATION`].
    pub fn fits_box(&self, grid: &GridSpec) -> bool {
        self.face_ratio(grid) < BOX_TRUNCATION
    }
}

/// `curl(φ B_λ) = λ φ B_λ + ∇φ ∧ B_λ`, pointwise.
pub fn curl_localized_beltrami(loc: &LocalizerSpec, freq: f64, x: V3) -> V3 {
    let (phi, grad, _) = loc.jet(x);
    let b = eval_b_n(freq, x);
    let gb = cross(grad, b);
    [freq * phi * b[0] + gb[0], freq * phi * b[1] + gb[1], freq * phi * b[2] + gb[2]]
}

/// `curl curl(φ B_N)` by its five-term expansion
/// `N²φB + N∇φ∧B + (B·∇)∇φ − Δφ B − (∇φ·∇)B`.
pub fn curl_curl_localized_beltrami(loc: &LocalizerSpec, freq: f64, x: V3) -> V3 {
    let (phi, grad, hess) = loc.jet(x);
    let b = eval_b_n(freq, x);
    let bz = b_n_dz(freq, x);
    let gb = cross(grad, b);
    let lap = hess[0][0] + hess[1][1] + hess[2][2];
    let mut out = [0.0; 3];
    for i in 0..3 {
        let hb = hess[i][0] * b[0] + hess[i][1] * b[1] + hess[i][2] * b[2];
        out[i] = freq * freq * phi * b[i] + freq * gb[i] + hb - lap * b[i] - grad[2] * bz[i];
    }
    out
}

/// Field built along both construction paths.
#[derive(Debug, Clone)]
pub struct TwoPath {
    /// Spectral differentiation of the sampled product.
    pub spectral: SpectralField,
    /// Pointwise samples of the expanded formula.
    pub analytic: PhysicalField,
}

impl TwoPath {
    /// Max pointwise disagreement relative to the analytic peak.
    pub fn relative_disagreement(&self) -> f64 {
        let s = self.spectral.inverse();
        s.max_diff(&self.analytic) / self.analytic.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// Samples of `φ B_λ`.
pub fn sample_localized_beltrami(grid: GridSpec, loc: &LocalizerSpec, freq: f64) -> PhysicalField {
    PhysicalField::from_fn(grid, |x| {
        let phi = loc.value(x);
        let b = eval_b_n(freq, x);
        [phi * b[0], phi * b[1], phi * b[2]]
    })
}

/// `u₀¹ = curl(φ B_N)`.
pub fn build_u01(grid: GridSpec, freq: f64, loc: &LocalizerSpec) -> Result<TwoPath> {
    grid.require_resolves(freq)?;
    loc.validate()?;
    let spectral = ops::curl(&sample_localized_beltrami(grid, loc, freq).forward()?)?;
    let analytic = PhysicalField::from_fn(grid, |x| curl_localized_beltrami(loc, freq, x));
    Ok(TwoPath { spectral, analytic })
}

/// `ω₀¹ = curl curl(φ B_N)`.
pub fn build_omega01(grid: GridSpec, freq: f64, loc: &LocalizerSpec) -> Result<TwoPath> {
    grid.require_resolves(freq)?;
    loc.validate()?;
    let sampled = sample_localized_beltrami(grid, loc, freq).forward()?;
    let spectral = ops::curl(&ops::curl(&sampled)?)?;
    let analytic = PhysicalField::from_fn(grid, |x| curl_curl_localized_beltrami(loc, freq, x));
    Ok(TwoPath { spectral, analytic })
}

/// Continuum Fourier transform of `exp(-|x|^2/(8 s))`: `(8πs)^{3/2} e^{-2s|ξ|^2}`.
pub fn gaussian_transform(nu_t: f64, xi2: f64) -> f64 {
    (8.0 * PI * nu_t).powf(1.5) * (-2.0 * nu_t * xi2).exp()
}

/// Coefficients of the periodized `ψ W`, computed from the closed-form
/// transform of the Gaussian rather than from samples, so that every
/// coefficient carries full relative precision (backward heat flow amplifies
/// absolute roundoff).
pub fn psi_w_spectrum(grid: GridSpec, nu_t: f64) -> SpectralField {
    let vol = grid.volume();
    ops::build(grid, 3, |c, m| {
        let axis = (c + 1) % 3;
        let shifted = |sign: f64| {
            let mut q = m.k;
            q[axis] -= sign;
            gaussian_transform(nu_t, q[0] * q[0] + q[1] * q[1] + q[2] * q[2])
        };
        // ψ sin(x_a) ↦ (ψ̂(ξ − e_a) − ψ̂(ξ + e_a)) / 2i
        C::new(0.0, -0.5 * (shifted(1.0) - shifted(-1.0)) / vol)
    })
}

/// The backward-heat component of the reconnection datum and its ingredients.
#[derive(Debug, Clone)]
pub struct U02Fields {
    pub nu_t: f64,
    pub psi_w: SpectralField,
    /// `curl curl(ψW)`, the target of the forward heat flow.
    pub target: SpectralField,
    /// `u₀² = e^{-νTΔ} curl(ψW)`.
    pub u02: SpectralField,
    /// `ω₀² = curl u₀²`.
    pub omega02: SpectralField,
}

pub fn build_u02_omega02(grid: GridSpec, nu: f64, t_target: f64) -> Result<U02Fields> {
    build_u02_omega02_guarded(grid, nu, t_target, INVERSE_HEAT_GUARD)
}

pub fn build_u02_omega02_guarded(grid: GridSpec, nu: f64, t_target: f64, guard: f64) -> Result<U02Fields> {
    if !(nu > 0.0 && t_target > 0.0) {
        return Err(Error::Parameter(format!("need ν > 0 and T > 0, got {nu}, {t_target}")));
    }
    let nu_t = nu * t_target;
    let psi_w = psi_w_spectrum(grid, nu_t);
    let curl_psi_w = ops::curl(&psi_w)?;
    let target = ops::curl(&curl_psi_w)?;
    let u02 = ops::inverse_heat(&curl_psi_w, nu_t, guard)?;
    let omega02 = ops::curl(&u02)?;
    Ok(U02Fields { nu_t, psi_w, target, u02, omega02 })
}

/// Parameters of both constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatumConfig {
    pub nu: f64,
    /// Target time T.
    pub t_target: f64,
    /// Beltrami frequency N (λ for the large-data datum).
    pub freq: u32,
    pub alpha: f64,
    /// Amplitude exponent, ρ = N^-β.
    pub beta: f64,
    /// Large-data amplitude M.
    pub amplitude: f64,
    /// Large-data dilation L.
    pub dilation: f64,
    /// Sobolev order monitored by the reconnection experiment.
    pub r: u32,
}

impl Default for DatumConfig {
    fn default() -> Self {
        Self { nu: 1.0, t_target: 1.0, freq: 8, alpha: 2.0, beta: 4.0, amplitude: 1.0, dilation: 8.0, r: 3 }
    }
}

impl DatumConfig {
    pub fn rho(&self) -> f64 {
        (self.freq as f64).powf(-self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.nu > 0.0, "nu must be positive"),
            (self.t_target > 0.0, "t_target must be positive"),
            (self.freq >= 1, "freq must be at least 1"),
            (self.alpha >= 1.0, "alpha must be at least 1"),
            (self.beta > 0.0, "beta must be positive"),
            (self.amplitude > 0.0, "amplitude must be positive"),
            (self.dilation > 0.0, "dilation must be positive"),
        ];
        for (ok, msg) in checks {
            if !(ok) {
                return Err(Error::Parameter(msg.into()));
            }
        }
        Ok(())
    }
}

/// `u₀ = ρ(u₀¹ + u₀²)` with its parts.
#[derive(Debug, Clone)]
pub struct ReconnectionDatum {
    pub cfg: DatumConfig,
    pub rho: f64,
    pub u01: SpectralField,
    pub omega01: SpectralField,
    pub parts2: U02Fields,
    pub u0: SpectralField,
    pub omega0: SpectralField,
}

/// Reconnection datum. `second_amplitude` scales `u₀²` (1 for the datum
/// proper, 0 for the no-reconnection control).
pub fn build_theorem2_datum(grid: GridSpec, cfg: &DatumConfig, second_amplitude: f64) -> Result<ReconnectionDatum> {
    cfg.validate()?;
    let freq = cfg.freq as f64;
    grid.require_points_per_period(freq, RECONNECTION_POINTS_PER_PERIOD)?;
    let loc = LocalizerSpec::inverse_power(cfg.alpha);
    let sampled = sample_localized_beltrami(grid, &loc, freq).forward()?;
    let u01 = ops::curl(&sampled)?;
    let omega01 = ops::curl(&u01)?;
    let parts2 = build_u02_omega02(grid, cfg.nu, cfg.t_target)?;
    let rho = cfg.rho();
    let mut u0 = u01.scaled(rho);
    u0.axpy(rho * second_amplitude, &parts2.u02)?;
    let mut omega0 = omega01.scaled(rho);
    omega0.axpy(rho * second_amplitude, &parts2.omega02)?;
    Ok(ReconnectionDatum { cfg: *cfg, rho, u01, omega01, parts2, u0, omega0 })
}

/// Large datum `u₀ = M curl(φ_L B_λ)`.
pub fn build_theorem1_datum(grid: GridSpec, amplitude: f64, dilation: f64, freq: f64, alpha: f64) -> Result<TwoPath> {
    grid.require_resolves(freq)?;
    if dilation > grid.box_length / 8.0 {
        return Err(Error::Resolution(format!(
            "dilation {dilation} exceeds L/8 = {:.3} for box side {:.3}",
            grid.box_length / 8.0,
            grid.box_length
        )));
    }
    let loc = LocalizerSpec::inverse_power(alpha).dilated(dilation);
    loc.validate()?;
    let mut spectral = ops::curl(&sample_localized_beltrami(grid, &loc, freq).forward()?)?;
    spectral.scale(amplitude);
    let analytic = PhysicalField::from_fn(grid, |x| {
        let v = curl_localized_beltrami(&loc, freq, x);
        [amplitude * v[0], amplitude * v[1], amplitude * v[2]]
    });
    Ok(TwoPath { spectral, analytic })
}

/// `F_N(t) = (1/N) ∫_{-N/2}^{N/2} e^{-2νtξ²} dξ`.
pub fn f_n(freq: f64, nu: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let a = (2.0 * nu * t).sqrt();
    // ∫_{-N/2}^{N/2} e^{-a²ξ²} dξ = √π erf(aN/2) / a
    PI.sqrt() * libm::erf(0.5 * a * freq) / (a * freq)
}

/// Largest observed `|∇φ(x − s y)| / ((1 + |y|^{2α}) φ(x))` over the sample
/// sets, the constant in the gradient growth bound of inverse-power
/// localizers.
pub fn gradient_growth_constant(alpha: f64, xs: &[V3], ys: &[V3], s_steps: usize) -> f64 {
    let loc = LocalizerSpec::inverse_power(alpha);
    let mut worst: f64 = 0.0;
    for &x in xs {
        let phi_x = loc.value(x);
        for &y in ys {
            let y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
            let denom = (1.0 + y2.powf(alpha)) * phi_x;
            for i in 0..=s_steps {
                let s = i as f64 / s_steps as f64;
                let (_, g, _) = loc.jet([x[0] - s * y[0], x[1] - s * y[1], x[2] - s * y[2]]);
                let gn = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
                worst = worst.max(gn / denom);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beltrami_and_w_point_values() {
        assert_eq!(eval_b_n(1.0, [0.0; 3]), [0.0, 1.0, 0.0]);
        let b = eval_b_n(2.0, [0.0, 0.0, PI / 4.0]);
        assert!((b[0] - 1.0).abs() < 1e-15 && b[1].abs() < 1e-15);
        assert_eq!(eval_w([0.0; 3]), [0.0; 3]);
        let w = eval_w([PI / 2.0, 0.0, 0.0]);
        assert_eq!(w, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let h = 1e-5;
        for loc in [
            LocalizerSpec::inverse_power(2.0).dilated(1.7),
            LocalizerSpec::gaussian(0.8),
        ] {
            let x = [0.3, -0.7, 1.1];
            let (_, g, hs) = loc.jet(x);
            for i in 0..3 {
                let mut p = x;
                let mut q = x;
                p[i] += h;
                q[i] -= h;
                let fd = (loc.value(p) - loc.value(q)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-8, "{loc:?} grad {i}");
                let (_, gp, _) = loc.jet(p);
                let (_, gq, _) = loc.jet(q);
                for j in 0..3 {
                    assert!(((gp[j] - gq[j]) / (2.0 * h) - hs[j][i]).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn u01_at_origin_is_n_times_b() {
        let v = curl_localized_beltrami(&LocalizerSpec::inverse_power(2.0), 8.0, [0.0; 3]);
        assert_eq!(v, [0.0, 8.0, 0.0]);
        let w = curl_curl_localized_beltrami(&LocalizerSpec::inverse_power(2.0), 8.0, [0.0; 3]);
        // N² B_N(0) plus the Hessian and Laplacian terms of φ at its peak.
        assert!((w[1] - (64.0 - 4.0 + 12.0)).abs() < 1e-12, "{w:?}");
    }

    #[test]
    fn f_n_limits_and_quadrature() {
        assert_eq!(f_n(8.0, 1.0, 0.0), 1.0);
        assert!(f_n(8.0, 1.0, 1e6) < 1e-3);
        // F_N(t) = ∫_{-1/2}^{1/2} e^{-2νN²tξ²} dξ by composite Simpson.
        let (nn, nu, t) = (8.0, 1.0, 0.01);
        let m = 2000;
        let h = 1.0 / m as f64;
        let g = |xi: f64| (-2.0 * nu * nn * nn * t * xi * xi).exp();
        let mut s = g(-0.5) + g(0.5);
        for i in 1..m {
            s += g(-0.5 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert!((s * h / 3.0 - f_n(nn, nu, t)).abs() < 1e-10);
    }

    #[test]
    fn rho_arithmetic() {
        let cfg = DatumConfig { freq: 8, beta: 4.0, ..Default::default() };
        assert_eq!(cfg.rho(), 2.44140625e-4);
    }
}
