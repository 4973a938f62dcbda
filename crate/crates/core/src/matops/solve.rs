use super::{singular_spectrum, Matrix};
use crate::error::{invalid, Error, Result};

/// Applies `A^+` for a wide matrix `A` of full row rank.
///
/// Factors `A^T = Q R` with Householder reflections, so `A^+ y = Q R^{-T} y`.
#[derive(Debug, Clone)]
pub struct MinNormSolver {
    a: Matrix,
    /// Householder vectors, one per row of `A`, each of length `cols`.
    vs: Vec<Vec<f64>>,
    /// Upper-triangular `R`, row-major `rows x rows`.
    r: Vec<f64>,
}

impl MinNormSolver {
    pub fn new(a: &Matrix) -> Result<Self> {
        let (n, m) = (a.rows(), a.cols());
        if n > m {
            return Err(invalid(format!("minimum-norm solve needs rows <= cols, got {n}x{m}")));
        }
        let spec = singular_spectrum(a);
        if spec.max() == 0.0 || spec.is_rank_deficient() {
            return Err(Error::Singular { sigma: spec.min() });
        }

        // Column k of A^T is row k of A.
        let mut w: Vec<Vec<f64>> = (0..n).map(|k| a.row(k).to_vec()).collect();
        let mut vs = Vec::with_capacity(n);
        let mut r = vec![0.0; n * n];
        for k in 0..n {
            let x = &w[k][k..];
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = vec![0.0; m];
            v[k] = x[0] - alpha;
            v[k + 1..].copy_from_slice(&x[1..]);
            let vn = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            if vn > 0.0 {
                for t in v.iter_mut() {
                    *t /= vn;
                }
            }
            for col in w.iter_mut().skip(k) {
                reflect(&v, col);
            }
            for (j, col) in w.iter().enumerate().skip(k) {
                r[k * n + j] = col[k];
            }
            vs.push(v);
        }
        Ok(MinNormSolver { a: a.clone(), vs, r })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    /// `A^+ y` without refinement.
    fn apply_raw(&self, y: &[f64]) -> Vec<f64> {
        let n = self.a.rows();
        // R^T z = y, forward substitution.
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut acc = y[i];
            for k in 0..i {
                acc -= self.r[k * n + i] * z[k];
            }
            z[i] = acc / self.r[i * n + i];
        }
        let mut s = vec![0.0; self.a.cols()];
        s[..n].copy_from_slice(&z);
        for v in self.vs.iter().rev() {
            reflect(v, &mut s);
        }
        s
    }

    /// `A^+ y`, with one step of iterative refinement on the residual.
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.a.rows() {
            return Err(invalid(format!(
                "right-hand side of length {} for {} rows",
                y.len(),
                self.a.rows()
            )));
        }
        let mut s = self.apply_raw(y);
        let ax = self.a.mul_vec(&s)?;
        let res: Vec<f64> = y.iter().zip(&ax).map(|(a, b)| a - b).collect();
        for (si, ci) in s.iter_mut().zip(self.apply_raw(&res)) {
            *si += ci;
        }
        Ok(s)
    }

    /// Orthogonal projection of `s` onto `{ s : A s = x }`.
    pub fn project(&self, s: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let as_ = self.a.mul_vec(s)?;
        let res: Vec<f64> = as_.iter().zip(x).map(|(a, b)| a - b).collect();
        let corr = self.apply(&res)?;
        Ok(s.iter().zip(&corr).map(|(a, b)| a - b).collect())
    }
}

fn reflect(v: &[f64], x: &mut [f64]) {
    let d: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= 2.0 * d * vi;
    }
}

/// Minimum Euclidean norm solution `A^+ x` of the underdetermined system.
pub fn min_norm_solve(a: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    MinNormSolver::new(a)?.apply(x)
}
