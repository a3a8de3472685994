//! Three-dimensional real-to-complex transforms on the periodic box.
//!
//! Coefficients follow `c(k) = n^-3 Σ f(x) e^{-ik·x}` with `x` the physical
//! node coordinates, i.e. the grid analogue of `L^-3 ∫ f e^{-ik·x} dx`. The box
//! is centered on the origin, which contributes a `(-1)^(m1+m2+m3)` phase
//! relative to a plain DFT.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::par;

type C = Complex64;

pub struct Fft3 {
    n: usize,
    nh: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

/// Shared plan for cubes of side `n`.
pub fn plan(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n).or_insert_with(|| Arc::new(Fft3::new(n))).clone()
}

impl Fft3 {
    fn new(n: usize) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        Self {
            n,
            nh: n / 2 + 1,
            r2c: real.plan_fft_forward(n),
            c2r: real.plan_fft_inverse(n),
            fwd: cplx.plan_fft_forward(n),
            inv: cplx.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Transform along the row index of a plane stored `[row][a]`.
    fn axis_pass(&self, plane: &mut [C], t: &mut [C], scratch: &mut [C], fft: &dyn Fft<f64>) {
        let (n, nh) = (self.n, self.nh);
        for r in 0..n {
            for a in 0..nh {
                t[a * n + r] = plane[r * nh + a];
            }
        }
        fft.process_with_scratch(t, scratch);
        for a in 0..nh {
            for r in 0..n {
                plane[r * nh + a] = t[a * n + r];
            }
        }
    }

    fn plane_init(&self, fft: &Arc<dyn Fft<f64>>) -> impl Fn() -> (Vec<C>, Vec<C>) + Sync + Send {
        let len = self.nh * self.n;
        let s = fft.get_inplace_scratch_len();
        move || (vec![C::default(); len], vec![C::default(); s])
    }

    /// Physical samples (x fastest) to half-spectrum coefficients.
    pub fn forward(&self, phys: &[f64], out: &mut [C]) {
        let (n, nh) = (self.n, self.nh);
        let plane = nh * n;
        assert_eq!(phys.len(), n * n * n);
        assert_eq!(out.len(), plane * n);
        let mut zmajor = vec![C::default(); plane * n];

        let r2c = &self.r2c;
        par::for_each_chunk_init(
            &mut zmajor,
            plane,
            || (vec![0.0f64; n], r2c.make_scratch_vec()),
            |(line, scratch), i3, p| {
                for i2 in 0..n {
                    let start = (i3 * n + i2) * n;
                    line.copy_from_slice(&phys[start..start + n]);
                    r2c.process_with_scratch(line, &mut p[i2 * nh..(i2 + 1) * nh], scratch)
                        .expect("r2c length mismatch");
                }
            },
        );

        par::for_each_chunk_init(&mut zmajor, plane, self.plane_init(&self.fwd), |(t, s), _, p| {
            self.axis_pass(p, t, s, self.fwd.as_ref())
        });

        let src = &zmajor;
        par::for_each_chunk(out, plane, |m2, p| {
            for i3 in 0..n {
                let from = nh * (m2 + n * i3);
                p[nh * i3..nh * (i3 + 1)].copy_from_slice(&src[from..from + nh]);
            }
        });
        drop(zmajor);

        let scale = 1.0 / (n * n * n) as f64;
        par::for_each_chunk_init(out, plane, self.plane_init(&self.fwd), |(t, s), m2, p| {
            self.axis_pass(p, t, s, self.fwd.as_ref());
            for b3 in 0..n {
                for a in 0..nh {
                    let sign = if (a + b3 + m2) % 2 == 0 { scale } else { -scale };
                    p[b3 * nh + a] *= sign;
                }
            }
        });
    }

    /// Half-spectrum coefficients to physical samples.
    pub fn inverse(&self, spec: &[C], out: &mut [f64]) {
        let (n, nh) = (self.n, self.nh);
        let plane = nh * n;
        assert_eq!(spec.len(), plane * n);
        assert_eq!(out.len(), n * n * n);
        let mut ymajor = spec.to_vec();
        par::for_each_chunk_init(&mut ymajor, plane, self.plane_init(&self.inv), |(t, s), m2, p| {
            for b3 in 0..n {
                for a in 0..nh {
                    if (a + b3 + m2) % 2 == 1 {
                        p[b3 * nh + a] = -p[b3 * nh + a];
                    }
                }
            }
            self.axis_pass(p, t, s, self.inv.as_ref());
        });

        let mut zmajor = vec![C::default(); plane * n];
        let src = &ymajor;
        par::for_each_chunk(&mut zmajor, plane, |i3, p| {
            for m2 in 0..n {
                let from = nh * (i3 + n * m2);
                p[nh * m2..nh * (m2 + 1)].copy_from_slice(&src[from..from + nh]);
            }
        });
        drop(ymajor);

        par::for_each_chunk_init(&mut zmajor, plane, self.plane_init(&self.inv), |(t, s), _, p| {
            self.axis_pass(p, t, s, self.inv.as_ref())
        });

        let c2r = &self.c2r;
        let src = &zmajor;
        par::for_each_chunk_init(
            out,
            n * n,
            || (vec![C::default(); nh], c2r.make_scratch_vec()),
            |(line, scratch), i3, p| {
                for i2 in 0..n {
                    let from = plane * i3 + nh * i2;
                    line.copy_from_slice(&src[from..from + nh]);
                    // Self-conjugate bins are real for Hermitian input; drop roundoff.
                    line[0].im = 0.0;
                    line[nh - 1].im = 0.0;
                    c2r.process_with_scratch(line, &mut p[i2 * n..(i2 + 1) * n], scratch)
                        .expect("c2r length mismatch");
                }
            },
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(n: usize, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        let h = 2.0 * PI / n as f64;
        let c = |i: usize| -PI + i as f64 * h;
        let mut v = vec![0.0; n * n * n];
        for i3 in 0..n {
            for i2 in 0..n {
                for i1 in 0..n {
                    v[i1 + n * (i2 + n * i3)] = f(c(i1), c(i2), c(i3));
                }
            }
        }
        v
    }

    #[test]
    fn single_mode_lands_on_its_wavenumber() {
        let n = 16;
        let nh = n / 2 + 1;
        // cos(2x + 3y - z) = (e^{i k x} + c.c.)/2 with k = (2, 3, -1).
        let f = sample(n, |x, y, z| (2.0 * x + 3.0 * y - z).cos());
        let mut s = vec![C::default(); nh * n * n];
        plan(n).forward(&f, &mut s);
        let idx = 2 + nh * ((n - 1) + n * 3);
        assert!((s[idx] - C::new(0.5, 0.0)).norm() < 1e-14, "{}", s[idx]);
        let total: f64 = s.iter().map(|c| c.norm()).sum();
        assert!((total - 0.5).abs() < 1e-13);
    }

    #[test]
    fn roundtrip_is_exact_to_roundoff() {
        let n = 32;
        let f = sample(n, |x, y, z| x.sin() * (2.0 * y).cos() + (z - x).cos().exp());
        let p = plan(n);
        let mut s = vec![C::default(); (n / 2 + 1) * n * n];
        p.forward(&f, &mut s);
        let mut g = vec![0.0; f.len()];
        p.inverse(&s, &mut g);
        let err = f.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-13, "{err}");
    }
}
