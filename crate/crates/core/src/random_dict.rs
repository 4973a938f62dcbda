//! Gaussian random dictionaries: concentration targets for eta and gamma,
//! the failure-probability bound, the large-dictionary regime condition and
//! its sparsity limit, plus Monte Carlo checks of the singular-value tails.

use crate::error::{invalid, precondition, Error, Result};
use crate::matops::{binomial, ln_binomial, singular_spectrum, Matrix};
use crate::rng::{self, derive_seed};
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Shape of an `n x m` Gaussian dictionary, `m > n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomDictSpec {
    pub n: usize,
    pub m: usize,
}

impl RandomDictSpec {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m <= n {
            return Err(invalid(format!("need m > n >= 1, got n = {n}, m = {m}")));
        }
        Ok(RandomDictSpec { n, m })
    }
}

fn check_admissible(spec: &RandomDictSpec, j: usize, r1: f64, r2: f64) -> Result<()> {
    if j == 0 || j >= spec.n {
        return Err(invalid(format!("j = {j} must lie in 1..={}", spec.n - 1)));
    }
    if !(r1 >= 0.0 && r1.is_finite()) || !(r2 >= 0.0) {
        return Err(invalid(format!("slacks must be non-negative, got r1 = {r1}, r2 = {r2}")));
    }
    let limit = 1.0 - (j as f64 / spec.n as f64).sqrt();
    if r2 >= limit {
        return Err(Error::Domain(format!(
            "pole: r2 = {r2} must be below 1 - sqrt(j/n) = {limit}"
        )));
    }
    Ok(())
}

/// `(1 + sqrt((m-j)/n) + r1) / (1 - sqrt(j/n) - r2)`.
pub fn eta_seq(spec: &RandomDictSpec, j: usize, r1: f64, r2: f64) -> Result<f64> {
    check_admissible(spec, j, r1, r2)?;
    let (n, m, jf) = (spec.n as f64, spec.m as f64, j as f64);
    Ok((1.0 + ((m - jf) / n).sqrt() + r1) / (1.0 - (jf / n).sqrt() - r2))
}

/// `sqrt((m-j)(1 + eta^2))` with `eta` from [`eta_seq`].
pub fn gamma_seq(spec: &RandomDictSpec, j: usize, r1: f64, r2: f64) -> Result<f64> {
    let eta = eta_seq(spec, j, r1, r2)?;
    Ok(((spec.m - j) as f64 * (1.0 + eta * eta)).sqrt())
}

/// `Gamma(x) = sqrt((p-x)(1 + ((a + sqrt(p-x)) / (b - sqrt x))^2))`.
pub fn gamma_analog(x: f64, p: f64, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0) || !(b > 0.0) || !(p >= b * b) {
        return Err(invalid(format!("need a >= 0 and p >= b^2 > 0, got a = {a}, b = {b}, p = {p}")));
    }
    if !(x >= 0.0 && x < b * b) {
        return Err(Error::Domain(format!("x = {x} must lie in [0, b^2 = {})", b * b)));
    }
    let ratio = (a + (p - x).sqrt()) / (b - x.sqrt());
    Ok(((p - x) * (1.0 + ratio * ratio)).sqrt())
}

/// Right-hand side of the failure-probability bound for `gamma_{r1 r2}[ell]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbBoundReport {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub r1: f64,
    pub r2: f64,
    pub gamma_value: f64,
    /// `sum_{j<=ell} C(m, j)`; infinite when it overflows `f64`.
    pub binom_sum: f64,
    pub ln_binom_sum: f64,
    /// `sum_{j<=ell} exp(j ln(m/j) + j)`, an upper estimate of `binom_sum`.
    pub binom_estimate: f64,
    /// Saturates at `f64::MAX`.
    pub failure_prob_rhs: f64,
    pub ln_failure_prob_rhs: f64,
    /// True when the right-hand side is at least 1.
    pub vacuous: bool,
    /// Regime condition with `u = ell/n`, `v = m/ell`.
    pub regime_ok: bool,
    pub regime_margin: f64,
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Exact binomial sums are used while every term stays below this value.
const EXACT_BINOM_LIMIT: u128 = 1_000_000_000_000_000;

pub fn failure_probability_bound(spec: &RandomDictSpec, ell: usize, r1: f64, r2: f64) -> Result<ProbBoundReport> {
    if !(r1 > 0.0) || !(r2 > 0.0) {
        return Err(precondition(format!("need r1 > 0 and r2 > 0, got r1 = {r1}, r2 = {r2}")));
    }
    check_admissible(spec, ell, r1, r2)?;
    let (n, m) = (spec.n, spec.m);

    let exact: Option<Vec<u128>> = (1..=ell)
        .map(|j| binomial(m, j).filter(|&c| c <= EXACT_BINOM_LIMIT))
        .collect();
    let (binom_sum, ln_binom_sum) = match exact {
        Some(terms) => {
            let s = terms.iter().sum::<u128>() as f64;
            (s, s.ln())
        }
        None => {
            let logs: Vec<f64> = (1..=ell).map(|j| ln_binomial(m, j)).collect();
            let l = log_sum_exp(&logs);
            (l.exp(), l)
        }
    };
    let binom_estimate = (1..=ell)
        .map(|j| {
            let jf = j as f64;
            (jf * (m as f64 / jf).ln() + jf).exp()
        })
        .sum();
    let nf = n as f64;
    let ln_tail = log_sum_exp(&[-nf * r1 * r1 / 2.0, -nf * r2 * r2 / 2.0]);
    let ln_rhs = ln_binom_sum + ln_tail;
    let rhs = ln_rhs.exp();
    let u = ell as f64 / nf;
    let v = m as f64 / ell as f64;
    let (regime_ok, regime_margin) =
        regime_check(u, v, r1, r2).unwrap_or((false, f64::NEG_INFINITY));
    Ok(ProbBoundReport {
        n,
        m,
        ell,
        r1,
        r2,
        gamma_value: gamma_seq(spec, ell, r1, r2)?,
        binom_sum,
        ln_binom_sum,
        binom_estimate,
        failure_prob_rhs: if rhs.is_finite() { rhs } else { f64::MAX },
        ln_failure_prob_rhs: ln_rhs,
        vacuous: ln_rhs >= 0.0,
        regime_ok,
        regime_margin,
    })
}

/// Exponent `c^2 n (1 - sqrt(2p/n))^2 / 2` of the tail term when
/// `r2 = c (1 - sqrt(2p/n))`.
pub fn tail_exponent(n: usize, two_p: usize, c: f64) -> f64 {
    let d = 1.0 - (two_p as f64 / n as f64).sqrt();
    c * c * n as f64 * d * d / 2.0
}

/// Regime condition `u (1 + ln v) < min(r1^2, r2^2) / 2`; returns the
/// verdict and the margin `rhs - lhs`.
pub fn regime_check(u: f64, v: f64, r1: f64, r2: f64) -> Result<(bool, f64)> {
    if !(u > 0.0 && u < 1.0) || !(v > 0.0) || !(r1 > 0.0) {
        return Err(precondition(format!("need 0 < u < 1, v > 0, r1 > 0; got u = {u}, v = {v}, r1 = {r1}")));
    }
    if !(r2 > 0.0 && r2 < 1.0 - u.sqrt()) {
        return Err(precondition(format!("need 0 < r2 < 1 - sqrt(u) = {}, got {r2}", 1.0 - u.sqrt())));
    }
    let lhs = u * (1.0 + v.ln());
    let rhs = r1.min(r2).powi(2) / 2.0;
    Ok((lhs < rhs, rhs - lhs))
}

/// `u (1 + ln(beta/u)) - c^2 (1 - sqrt u)^2 / 2`; negative below the root.
pub fn sparsity_residual(u: f64, beta: f64, c: f64) -> f64 {
    let d = 1.0 - u.sqrt();
    u * (1.0 + (beta / u).ln()) - c * c * d * d / 2.0
}

const BISECT_LO: f64 = 1e-12;
const BISECT_ITERS: usize = 200;

/// Root in `(0, 1)` of [`sparsity_residual`] by bisection.
pub fn sparsity_supremum(beta: f64, c: f64) -> Result<f64> {
    if !(beta >= 1.0 && beta.is_finite()) || !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("need beta >= 1 and 0 < c <= 1, got beta = {beta}, c = {c}")));
    }
    let (mut lo, mut hi) = (BISECT_LO, (1.0 - 1e-12f64).powi(2));
    let (mut flo, fhi) = (sparsity_residual(lo, beta, c), sparsity_residual(hi, beta, c));
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::Domain(format!(
            "no sign change on the bracket (f(lo) = {flo}, f(hi) = {fhi})"
        )));
    }
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = sparsity_residual(mid, beta, c);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let fh = sparsity_residual(hi, beta, c);
    Ok(if flo.abs() <= fh.abs() { lo } else { hi })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub beta: f64,
    pub c: f64,
    pub u_star: f64,
    pub residual: f64,
}

/// `steps` evenly spaced values of beta in `[beta_min, beta_max]` for each
/// `c`, grouped by `c` in the given order.
pub fn sparsity_curve(beta_min: f64, beta_max: f64, steps: usize, cs: &[f64]) -> Result<Vec<CurvePoint>> {
    if steps == 0 || !(beta_max >= beta_min) {
        return Err(invalid("need steps >= 1 and beta_max >= beta_min"));
    }
    let mut out = Vec::with_capacity(steps * cs.len());
    for &c in cs {
        for i in 0..steps {
            let beta = if steps == 1 {
                beta_min
            } else {
                beta_min + (beta_max - beta_min) * i as f64 / (steps - 1) as f64
            };
            let u_star = sparsity_supremum(beta, c)?;
            out.push(CurvePoint { beta, c, u_star, residual: sparsity_residual(u_star, beta, c) });
        }
    }
    Ok(out)
}

/// `n x m` matrix with iid `N(0, 1/n)` entries, optionally column-normalized.
pub fn gaussian_dictionary(n: usize, m: usize, seed: u64, normalize: bool) -> Result<Matrix> {
    let mut s = rng::stream(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let data = rng::normals(&mut s, n * m).into_iter().map(|v| v * scale).collect();
    let a = Matrix::new(n, m, data)?;
    if normalize {
        a.normalize_columns()
    } else {
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SzarekTrial {
    pub index: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SzarekReport {
    pub n: usize,
    pub p: usize,
    pub r: f64,
    pub seed: u64,
    pub max_threshold: f64,
    pub min_threshold: f64,
    /// `exp(-n r^2 / 2)`.
    pub tail_bound: f64,
    /// Three binomial standard deviations at the tail bound.
    pub slack: f64,
    pub freq_max: f64,
    pub freq_min: f64,
    pub trials: Vec<SzarekTrial>,
}

impl SzarekReport {
    pub fn passes(&self) -> bool {
        let cap = self.tail_bound + self.slack;
        self.freq_max <= cap && self.freq_min <= cap
    }

    /// One row per trial and statistic.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,statistic,value,threshold,exceeded\n");
        for t in &self.trials {
            let _ = writeln!(
                s,
                "{},sigma_max,{:.16e},{:.16e},{}",
                t.index,
                t.sigma_max,
                self.max_threshold,
                t.sigma_max > self.max_threshold
            );
            let _ = writeln!(
                s,
                "{},sigma_min,{:.16e},{:.16e},{}",
                t.index,
                t.sigma_min,
                self.min_threshold,
                t.sigma_min < self.min_threshold
            );
        }
        s
    }
}

/// Frequencies with which the extreme singular values of `n x p` draws with
/// `N(0, 1/n)` entries cross the edges shifted by `r`.
pub fn szarek_empirical_check(n: usize, p: usize, r: f64, trials: usize, seed: u64) -> Result<SzarekReport> {
    if n == 0 || p == 0 || trials == 0 || !(r > 0.0) {
        return Err(invalid("need n, p, trials >= 1 and r > 0"));
    }
    let ratio = (p as f64 / n as f64).sqrt();
    let (max_threshold, min_threshold) = if p <= n {
        (1.0 + ratio + r, 1.0 - ratio - r)
    } else {
        (ratio + 1.0 + r, ratio - 1.0 - r)
    };
    let rows: Vec<SzarekTrial> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let x = gaussian_dictionary_any(n, p, derive_seed(seed, index as u64));
            let s = singular_spectrum(&x);
            SzarekTrial { index, sigma_max: s.max(), sigma_min: s.min() }
        })
        .collect();
    let tf = trials as f64;
    let freq_max = rows.iter().filter(|t| t.sigma_max > max_threshold).count() as f64 / tf;
    let freq_min = rows.iter().filter(|t| t.sigma_min < min_threshold).count() as f64 / tf;
    let b = (-(n as f64) * r * r / 2.0).exp();
    Ok(SzarekReport {
        n,
        p,
        r,
        seed,
        max_threshold,
        min_threshold,
        tail_bound: b,
        slack: 3.0 * (b * (1.0 - b) / tf).sqrt(),
        freq_max,
        freq_min,
        trials: rows,
    })
}

/// Like [`gaussian_dictionary`] without the `m > n` shape restriction.
fn gaussian_dictionary_any(n: usize, p: usize, seed: u64) -> Matrix {
    let mut s = rng::stream(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let data = rng::normals(&mut s, n * p).into_iter().map(|v| v * scale).collect();
    Matrix::new(n, p, data).expect("positive dimensions and finite normals")
}

/// Largest singular value by power iteration on `M^T M`.
fn sigma_max_power(m: &Matrix) -> f64 {
    let mt = m.transpose();
    let mut v = vec![1.0 / (m.cols() as f64).sqrt(); m.cols()];
    let mut est = 0.0;
    for _ in 0..500 {
        let w = m.mul_vec(&v).expect("shapes agree");
        let z = mt.mul_vec(&w).expect("shapes agree");
        let norm = z.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm.sqrt();
        v = z.into_iter().map(|t| t / norm).collect();
        if (next - est).abs() <= 1e-12 * next {
            return next;
        }
        est = next;
    }
    est
}

/// Largest `sigma_max(B^c) / sigma_min(B)` over `samples` random
/// `j`-column subsets; a sampled lower estimate of `eta_j`.
pub fn sampled_eta(a: &Matrix, j: usize, samples: usize, seed: u64) -> Result<f64> {
    let m = a.cols();
    if j == 0 || j >= m || samples == 0 {
        return Err(invalid(format!("need 1 <= j < {m} and samples >= 1")));
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut s = rng::stream(derive_seed(seed, i as u64));
            let mut idx = sample(&mut s, m, j).into_vec();
            idx.sort_unstable();
            let b = a.gather_columns(&idx);
            let rest = crate::matops::complement_indices(&idx, m);
            let smin = singular_spectrum(&b).min();
            sigma_max_power(&a.gather_columns(&rest)) / smin
        })
        .collect();
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> RandomDictSpec {
        RandomDictSpec::new(100, 200).unwrap()
    }

    #[test]
    fn eta_and_gamma_at_j10() {
        let e = eta_seq(&spec(), 10, 0.0, 0.0).unwrap();
        let want = (1.0 + 1.9f64.sqrt()) / (1.0 - 0.1f64.sqrt());
        assert!((e - want).abs() < 1e-14);
        assert!((e - 3.478).abs() < 5e-4);
        let g = gamma_seq(&spec(), 10, 0.0, 0.0).unwrap();
        assert!((g - 49.9).abs() < 0.05, "{g}");
    }

    #[test]
    fn pole_and_domain() {
        assert!(matches!(eta_seq(&spec(), 10, 0.0, 0.7), Err(Error::Domain(_))));
        assert!(eta_seq(&spec(), 0, 0.0, 0.0).is_err());
        assert!(eta_seq(&spec(), 100, 0.0, 0.0).is_err());
        let d = 1.0 - 0.99f64.sqrt();
        assert!((d - 0.00501).abs() < 1e-5);
        let e99 = eta_seq(&spec(), 99, 0.0, 0.0).unwrap();
        assert!((e99 - (1.0 + 1.01f64.sqrt()) / d).abs() < 1e-9 * e99);
        assert!(e99 > 100.0 * eta_seq(&spec(), 10, 0.0, 0.0).unwrap());
    }

    #[test]
    fn gamma_analog_endpoints() {
        let (p, a, b) = (2.0, 1.3, 0.8);
        let g0 = gamma_analog(0.0, p, a, b).unwrap();
        let want = (p * (1.0 + ((a + p.sqrt()) / b).powi(2))).sqrt();
        assert!((g0 - want).abs() < 1e-14);
        assert!(matches!(gamma_analog(0.7, p, a, b), Err(Error::Domain(_))));
    }

    #[test]
    fn failure_probability_example() {
        let r = failure_probability_bound(&spec(), 2, 0.5, 0.5).unwrap();
        assert_eq!(r.binom_sum, 20_100.0);
        assert!((r.failure_prob_rhs - 0.150).abs() < 5e-4, "{}", r.failure_prob_rhs);
        assert!(!r.vacuous);
        assert!(r.binom_estimate >= r.binom_sum);

        let big = failure_probability_bound(&RandomDictSpec::new(400, 800).unwrap(), 100, 0.1, 0.1).unwrap();
        assert!(big.vacuous);
        assert!(big.ln_binom_sum.is_finite());
        assert!(failure_probability_bound(&spec(), 2, 0.0, 0.5).is_err());
    }

    #[test]
    fn regime_example() {
        let (ok, margin) = regime_check(0.01, 10.0, 0.5, 0.5).unwrap();
        assert!(ok);
        assert!((margin - (0.125 - 0.01 * (1.0 + 10f64.ln()))).abs() < 1e-15);
        assert!(regime_check(0.99, 10.0, 0.5, 0.5).is_err());
        assert!(!regime_check(0.9, 1.0, 0.05, 0.05).unwrap().0);
    }

    #[test]
    fn sparsity_root_bracket() {
        assert!(sparsity_residual(0.05, 2.0, 1.0) < 0.0);
        assert!(sparsity_residual(0.07, 2.0, 1.0) > 0.0);
        let u = sparsity_supremum(2.0, 1.0).unwrap();
        assert!(u > 0.05 && u < 0.07, "{u}");
        assert!(sparsity_residual(u, 2.0, 1.0).abs() < 1e-12);
        assert!(sparsity_supremum(0.5, 1.0).is_err());
        assert!(sparsity_supremum(2.0, 0.0).is_err());
    }

    #[test]
    fn curve_shape() {
        let pts = sparsity_curve(1.0, 10.0, 5, &[0.5, 1.0]).unwrap();
        assert_eq!(pts.len(), 10);
        assert_eq!(sparsity_curve(3.0, 3.0, 1, &[0.25]).unwrap().len(), 1);
    }

    #[test]
    fn gaussian_dictionary_is_reproducible() {
        let a = gaussian_dictionary(8, 12, 3, false).unwrap();
        assert_eq!(a, gaussian_dictionary(8, 12, 3, false).unwrap());
        assert_ne!(a, gaussian_dictionary(8, 12, 4, false).unwrap());
        let u = gaussian_dictionary(8, 12, 3, true).unwrap();
        assert!(u.column_norms().iter().all(|c| (c - 1.0).abs() < 1e-14));
    }

    #[test]
    fn power_iteration_matches_jacobi() {
        let a = gaussian_dictionary(20, 30, 11, false).unwrap();
        let want = singular_spectrum(&a).max();
        assert!((sigma_max_power(&a) - want).abs() < 1e-8 * want);
    }

    #[test]
    fn szarek_small_run_and_csv() {
        let r = szarek_empirical_check(40, 10, 0.5, 50, 9).unwrap();
        assert_eq!(r.trials.len(), 50);
        assert!(r.passes());
        assert_eq!(r.to_csv().lines().count(), 101);
        let wide = szarek_empirical_check(10, 40, 0.5, 20, 9).unwrap();
        assert!((wide.max_threshold - 3.5).abs() < 1e-15);
        assert!((wide.min_threshold - 0.5).abs() < 1e-15);
    }
}
