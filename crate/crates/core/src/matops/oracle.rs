//! Closed-form singular values for matrices whose short side is at most 4.
//!
//! Shares nothing with the Jacobi route: the Gram matrix of the short side
//! is reduced to its characteristic polynomial (sums of principal minors),
//! whose roots come from the quadratic formula, the trigonometric cubic
//! solution or Ferrari's quartic resolvent. Used as a test oracle.

use super::{Matrix, SingularSpectrum};
use crate::error::{Error, Result};
use std::f64::consts::PI;

pub fn oracle_spectrum(m: &Matrix) -> Result<SingularSpectrum> {
    let k = m.rows().min(m.cols());
    if k > 4 {
        return Err(Error::UnsupportedSize(format!(
            "closed-form oracle handles a short side of at most 4, got {k}"
        )));
    }
    let mut g = gram_short_side(m);
    let scale: f64 = (0..k).map(|i| g[i][i]).sum();
    if scale == 0.0 {
        return Ok(SingularSpectrum::from_unsorted(vec![0.0; k]));
    }
    for row in g.iter_mut() {
        for v in row.iter_mut() {
            *v /= scale;
        }
    }
    // lambda^k - c1 lambda^{k-1} + c2 lambda^{k-2} - ...
    let c: Vec<f64> = (1..=k).map(|r| principal_minor_sum(&g, r)).collect();
    let mut roots = match k {
        1 => vec![c[0]],
        2 => quadratic_roots(c[0], c[1]),
        3 => cubic_roots(-c[0], c[1], -c[2]),
        _ => quartic_roots(-c[0], c[1], -c[2], c[3]),
    };
    let coeffs: Vec<f64> = std::iter::once(1.0)
        .chain(c.iter().enumerate().map(|(i, v)| if i % 2 == 0 { -v } else { *v }))
        .collect();
    for r in roots.iter_mut() {
        *r = polish(&coeffs, *r);
    }
    let values = roots.into_iter().map(|l| (l.max(0.0) * scale).sqrt()).collect();
    Ok(SingularSpectrum::from_unsorted(values))
}

fn gram_short_side(m: &Matrix) -> Vec<Vec<f64>> {
    if m.rows() <= m.cols() {
        let k = m.rows();
        let mut g = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let v: f64 = m.row(i).iter().zip(m.row(j)).map(|(a, b)| a * b).sum();
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        g
    } else {
        let k = m.cols();
        let mut g = vec![vec![0.0; k]; k];
        for r in 0..m.rows() {
            let row = m.row(r);
            for i in 0..k {
                for j in i..k {
                    g[i][j] += row[i] * row[j];
                }
            }
        }
        for i in 0..k {
            for j in 0..i {
                g[i][j] = g[j][i];
            }
        }
        g
    }
}

fn principal_minor_sum(g: &[Vec<f64>], r: usize) -> f64 {
    let k = g.len();
    let mut total = 0.0;
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        let sub: Vec<Vec<f64>> =
            idx.iter().map(|&i| idx.iter().map(|&j| g[i][j]).collect()).collect();
        total += det(&sub);
        // next r-combination of 0..k
        let mut i = r;
        loop {
            if i == 0 {
                return total;
            }
            i -= 1;
            if idx[i] != i + k - r {
                break;
            }
            if i == 0 {
                return total;
            }
        }
        idx[i] += 1;
        for t in i + 1..r {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

fn det(a: &[Vec<f64>]) -> f64 {
    match a.len() {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * a[0][j] * det(&minor)
            })
            .sum(),
    }
}

/// Roots of `x^2 - t x + d` (t = trace, d = determinant).
fn quadratic_roots(t: f64, d: f64) -> Vec<f64> {
    let disc = (t * t - 4.0 * d).max(0.0).sqrt();
    let hi = 0.5 * (t + disc);
    let lo = if hi > 0.0 { d / hi } else { 0.5 * (t - disc) };
    vec![hi, lo]
}

/// Real roots of `x^3 + a x^2 + b x + c`, assuming all three are real.
fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = -a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    if p.abs() < 1e-300 {
        let t = (-q).cbrt();
        return vec![t + shift; 3];
    }
    if p < 0.0 {
        let rad = (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos();
        let disc = q * q / 4.0 + p * p * p / 27.0;
        if disc <= 0.0 {
            return (0..3)
                .map(|kk| 2.0 * rad * (phi / 3.0 - 2.0 * PI * kk as f64 / 3.0).cos() + shift)
                .collect();
        }
    }
    // One real root (Cardano); only reached for resolvents with a complex pair.
    let disc = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
    let t = (-q / 2.0 + disc).cbrt() + (-q / 2.0 - disc).cbrt();
    vec![t + shift]
}

/// Real roots of `x^4 + a x^3 + b x^2 + c x + d`, assuming all four are real.
fn quartic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let shift = -a / 4.0;
    let p = b - 3.0 * a * a / 8.0;
    let q = a * a * a / 8.0 - a * b / 2.0 + c;
    let r = -3.0 * a.powi(4) / 256.0 + a * a * b / 16.0 - a * c / 4.0 + d;

    let ys: Vec<f64> = if q.abs() < 1e-14 {
        // Biquadratic in y^2.
        let disc = (p * p - 4.0 * r).max(0.0).sqrt();
        let mut out = Vec::with_capacity(4);
        for z in [0.5 * (-p + disc), 0.5 * (-p - disc)] {
            let s = z.max(0.0).sqrt();
            out.push(s);
            out.push(-s);
        }
        out
    } else {
        // Resolvent: 8 t^3 + 8 p t^2 + (2 p^2 - 8 r) t - q^2 = 0.
        let res = cubic_roots(p, (2.0 * p * p - 8.0 * r) / 8.0, -q * q / 8.0);
        let t = res.into_iter().fold(f64::NEG_INFINITY, f64::max).max(1e-300);
        let s = (2.0 * t).sqrt();
        let mut out = Vec::with_capacity(4);
        // y^2 - s y + (p/2 + t + q/(2s)) = 0 and y^2 + s y + (p/2 + t - q/(2s)) = 0
        for (lin, cst) in [(-s, p / 2.0 + t + q / (2.0 * s)), (s, p / 2.0 + t - q / (2.0 * s))] {
            let disc = (lin * lin - 4.0 * cst).max(0.0).sqrt();
            out.push(0.5 * (-lin + disc));
            out.push(0.5 * (-lin - disc));
        }
        out
    };
    ys.into_iter().map(|y| y + shift).collect()
}

fn polish(coeffs: &[f64], mut x: f64) -> f64 {
    let eval = |x: f64| {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in coeffs {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..4 {
        let (p, dp) = eval(x);
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let next = x - p / dp;
        if eval(next).0.abs() >= p.abs() {
            break;
        }
        x = next;
    }
    x
}
