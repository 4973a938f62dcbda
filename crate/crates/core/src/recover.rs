//! Sparse test problems and candidate solutions.

use crate::error::{invalid, Result};
use crate::matops::{min_norm_solve, Matrix, MinNormSolver};
use crate::rng::{self, Stream};
use rand::seq::SliceRandom;
use serde::Serialize;

/// A dictionary, a `p`-sparse vector and its (possibly noisy) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub dictionary: Matrix,
    pub s0: Vec<f64>,
    pub x: Vec<f64>,
    /// Sorted support of `s0`.
    pub support: Vec<usize>,
    pub p: usize,
    pub seed: u64,
    /// `||x - A s0||_2`, exactly the requested epsilon.
    pub noise_norm: f64,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    seed: u64,
    rng: &'static str,
    n: usize,
    m: usize,
    p: usize,
    epsilon: f64,
    support: &'a [usize],
    s0_values: Vec<f64>,
}

impl ProblemInstance {
    /// Seed, sparsity, noise level, support and nonzero values as one JSON line.
    pub fn sidecar_json(&self) -> String {
        let rec = Sidecar {
            seed: self.seed,
            rng: rng::RNG_ALGORITHM,
            n: self.dictionary.rows(),
            m: self.dictionary.cols(),
            p: self.p,
            epsilon: self.noise_norm,
            support: &self.support,
            s0_values: self.support.iter().map(|&i| self.s0[i]).collect(),
        };
        serde_json::to_string(&rec).expect("sidecar fields are serializable")
    }
}

/// Draws, in order: the `n x m` dictionary (iid standard normal, row-major),
/// the support (Fisher-Yates prefix of length `p`), the `p` nonzero values
/// (standard normal) and, when `epsilon > 0`, a noise direction scaled to
/// norm `epsilon`.
pub fn make_instance(
    n: usize,
    m: usize,
    p: usize,
    epsilon: f64,
    seed: u64,
    normalize_columns: bool,
) -> Result<ProblemInstance> {
    if n == 0 || m == 0 {
        return Err(invalid("dimensions must be positive"));
    }
    if p > m {
        return Err(invalid(format!("sparsity {p} exceeds the {m} columns")));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("noise level {epsilon} must be >= 0")));
    }
    let mut s = rng::stream(seed);
    let raw = Matrix::new(n, m, rng::normals(&mut s, n * m))?;
    let dictionary = if normalize_columns { raw.normalize_columns()? } else { raw };

    let support = draw_support(&mut s, m, p);
    let values = rng::normals(&mut s, p);
    let mut s0 = vec![0.0; m];
    let mut order: Vec<(usize, f64)> = support.iter().copied().zip(values).collect();
    order.sort_by_key(|(i, _)| *i);
    for &(i, v) in &order {
        s0[i] = v;
    }
    let support: Vec<usize> = order.iter().map(|(i, _)| *i).collect();

    let mut x = dictionary.mul_vec(&s0)?;
    if epsilon > 0.0 {
        let mut dir = rng::normals(&mut s, n);
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in dir.iter_mut() {
            *v *= epsilon / norm;
        }
        for (xi, ni) in x.iter_mut().zip(&dir) {
            *xi += ni;
        }
    }
    Ok(ProblemInstance { dictionary, s0, x, support, p, seed, noise_norm: epsilon })
}

fn draw_support(s: &mut Stream, m: usize, p: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m).collect();
    let (head, _) = idx.partial_shuffle(s, p);
    head.to_vec()
}

/// Smoothed-l0 schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sl0Params {
    pub sigma_min: f64,
    pub sigma_decrease: f64,
    pub inner_iters: usize,
    pub mu: f64,
}

impl Sl0Params {
    /// Decrease factor 0.5, three inner iterations, step scale 2.
    pub fn new(sigma_min: f64) -> Self {
        Sl0Params { sigma_min, sigma_decrease: 0.5, inner_iters: 3, mu: 2.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma_min > 0.0)
            || !(self.sigma_decrease > 0.0 && self.sigma_decrease < 1.0)
            || self.inner_iters == 0
            || !(self.mu > 0.0)
        {
            return Err(invalid(format!("invalid SL0 parameters {self:?}")));
        }
        Ok(())
    }
}

/// Smoothed-l0 reconstruction.
///
/// Starts from `A^+ x` with `sigma = 2 max|s|` and shrinks sigma by
/// `sigma_decrease` down to `sigma_min`. Each inner step moves against the
/// gradient of the smoothed support count and projects back onto `A s = x`.
pub fn sl0_solve(a: &Matrix, x: &[f64], params: &Sl0Params) -> Result<Vec<f64>> {
    params.validate()?;
    let solver = MinNormSolver::new(a)?;
    let mut s = solver.apply(x)?;
    let mut sigma = 2.0 * s.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    while sigma > params.sigma_min {
        let two_sigma2 = 2.0 * sigma * sigma;
        for _ in 0..params.inner_iters {
            for v in s.iter_mut() {
                *v -= params.mu * *v * (-*v * *v / two_sigma2).exp();
            }
            s = solver.project(&s, x)?;
        }
        sigma *= params.sigma_decrease;
    }
    solver.project(&s, x)
}

/// Minimum Euclidean norm solution `A^+ x`.
pub fn min_l2_solve(a: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    min_norm_solve(a, x)
}

/// A reconstruction algorithm that produces candidate solutions.
pub trait SparseSolver: Sync {
    fn name(&self) -> &str;
    fn solve(&self, a: &Matrix, x: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy)]
pub struct Sl0(pub Sl0Params);

impl SparseSolver for Sl0 {
    fn name(&self) -> &str {
        "sl0"
    }

    fn solve(&self, a: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
        sl0_solve(a, x, &self.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MinL2;

impl SparseSolver for MinL2 {
    fn name(&self) -> &str {
        "min-l2"
    }

    fn solve(&self, a: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
        min_l2_solve(a, x)
    }
}
