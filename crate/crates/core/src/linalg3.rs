//! Small dense 3×3 helpers: determinant, solve, closed-form eigenvalues.

use num_complex::Complex64;

pub type M3 = [[f64; 3]; 3];
type C = Complex64;

pub fn det(m: &M3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn trace(m: &M3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn frobenius(m: &M3) -> f64 {
    m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Sum of the principal 2×2 minors.
pub fn minor_sum(m: &M3) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
        - m[1][2] * m[2][1]
}

pub fn mat_vec(m: &M3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Solve `m x = b` by Cramer's rule; `None` when `m` is numerically singular.
pub fn solve(m: &M3, b: [f64; 3]) -> Option<[f64; 3]> {
    let d = det(m);
    let scale = frobenius(m);
    if !(d.is_finite()) || d.abs() <= 1e-14 * scale * scale * scale || scale == 0.0 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = *m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        *o = det(&mc) / d;
    }
    Some(out)
}

/// Eigenvalues from the characteristic cubic.
///
/// Real roots come first in descending order; a complex pair is returned as
/// `(re + i|im|, re - i|im|)`, conjugate by construction.
pub fn eigenvalues(m: &M3) -> [C; 3] {
    let s = m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    if s == 0.0 {
        return [C::default(); 3];
    }
    let mut a = *m;
    a.iter_mut().flatten().for_each(|v| *v /= s);
    let tr = trace(&a);
    let c2 = minor_sum(&a);
    let dt = det(&a);
    // λ³ + p2 λ² + p1 λ + p0
    let (p2, p1, p0) = (-tr, c2, -dt);
    let poly = |z: C| ((z + p2) * z + p1) * z + p0;
    let dpoly = |z: C| (3.0 * z + 2.0 * p2) * z + p1;
    let polish = |mut z: C| {
        for _ in 0..3 {
            let d = dpoly(z);
            if d.norm() == 0.0 {
                break;
            }
            let step = poly(z) / d;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            let cand = z - step;
            if poly(cand).norm() <= poly(z).norm() {
                z = cand;
            } else {
                break;
            }
        }
        z
    };

    let shift = -p2 / 3.0;
    let p = p1 - p2 * p2 / 3.0;
    let q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    let disc = 0.25 * q * q + p * p * p / 27.0;

    let mut roots = if disc > 0.0 || p >= 0.0 {
        // One real root (or a triple root when p = q = 0).
        let sq = disc.max(0.0).sqrt();
        let u = (-0.5 * q - q.signum() * sq).cbrt();
        let y = if u != 0.0 { u - p / (3.0 * u) } else { 0.0 };
        let r = polish(C::new(y + shift, 0.0)).re;
        let rest = tr - r;
        let prod = c2 - r * rest;
        let half = 0.5 * rest;
        let dq = half * half - prod;
        if dq < 0.0 {
            let z = polish(C::new(half, (-dq).sqrt()));
            let z = C::new(z.re, z.im.abs());
            [C::new(r, 0.0), z, z.conj()]
        } else {
            let sq = dq.sqrt();
            let big = half + half.signum() * sq;
            let small = if big != 0.0 { prod / big } else { 0.0 };
            [C::new(r, 0.0), polish(C::new(big, 0.0)), polish(C::new(small, 0.0))]
        }
    } else {
        let rr = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * rr)).clamp(-1.0, 1.0);
        let th = arg.acos() / 3.0;
        let mut out = [C::default(); 3];
        for (k, o) in out.iter_mut().enumerate() {
            let y = rr * (th - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            *o = polish(C::new(y + shift, 0.0));
        }
        out
    };
    for z in roots.iter_mut() {
        *z *= s;
    }
    if roots.iter().all(|z| z.im == 0.0) {
        roots.sort_by(|x, y| y.re.partial_cmp(&x.re).unwrap_or(std::cmp::Ordering::Equal));
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_rotation() {
        let e = eigenvalues(&[[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]]);
        for (z, want) in e.iter().zip([3.0, 2.0, -1.0]) {
            assert!((z - want).norm() < 1e-14, "{z}");
        }
        let r = eigenvalues(&[[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!(r[0].norm() < 1e-15);
        assert!((r[1] - C::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(r[2], r[1].conj());
    }

    #[test]
    fn solve_inverts() {
        let m = [[2.0, 1.0, 0.0], [0.0, 3.0, 1.0], [1.0, 0.0, 4.0]];
        let x = solve(&m, [1.0, 2.0, 3.0]).unwrap();
        let b = mat_vec(&m, x);
        assert!((b[0] - 1.0).abs() + (b[1] - 2.0).abs() + (b[2] - 3.0).abs() < 1e-14);
        assert!(solve(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]], [1.0; 3]).is_none());
    }
}
