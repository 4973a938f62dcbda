use super::{Matrix, SingularSpectrum, RANK_TOL};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTHO_TOL: f64 = 1e-15;

/// All `min(rows, cols)` singular values of `m`, descending.
///
/// One-sided (Hestenes) Jacobi on the tall orientation: the columns of the
/// tall side are rotated pairwise until mutually orthogonal, and their norms
/// are the singular values.
pub fn singular_spectrum(m: &Matrix) -> SingularSpectrum {
    let (len, k) = if m.rows() >= m.cols() {
        (m.rows(), m.cols())
    } else {
        (m.cols(), m.rows())
    };
    // Column-major working copy of the tall orientation.
    let mut w = vec![0.0; len * k];
    if m.rows() >= m.cols() {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                w[j * len + i] = m.get(i, j);
            }
        }
    } else {
        w.copy_from_slice(m.data());
    }

    if k > 1 {
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..k - 1 {
                for q in p + 1..k {
                    let (head, tail) = w.split_at_mut(q * len);
                    let cp = &mut head[p * len..(p + 1) * len];
                    let cq = &mut tail[..len];
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                    for (a, b) in cp.iter().zip(cq.iter()) {
                        alpha += a * a;
                        beta += b * b;
                        gamma += a * b;
                    }
                    if gamma == 0.0 || gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = c * x - s * y;
                        *b = s * x + c * y;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let values = w
        .chunks_exact(len)
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    SingularSpectrum::from_unsorted(values)
}

/// Frobenius norm of the Moore-Penrose pseudoinverse, `sqrt(sum 1/sigma_i^2)`.
///
/// Requires full rank on the short side; a smallest singular value at or
/// below `RANK_TOL * sigma_max` is reported as [`Error::Singular`].
pub fn pseudoinverse_frobenius(m: &Matrix) -> Result<f64> {
    let spec = singular_spectrum(m);
    if spec.max() == 0.0 || spec.min() <= RANK_TOL * spec.max() {
        return Err(Error::Singular { sigma: spec.min() });
    }
    Ok(spec.values().iter().map(|s| 1.0 / (s * s)).sum::<f64>().sqrt())
}
