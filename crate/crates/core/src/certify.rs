//! Error certificates for candidate sparse solutions.
//!
//! Every function returns a [`BoundCertificate`] that lists the checks it ran.
//! When a check fails the bound is withheld and [`BoundCertificate::value`]
//! reports the failures. The sparsity of the unknown solution can never be
//! checked and is recorded as an assumption instead.

use crate::dict_analysis::{has_unit_columns, kruskal_rank, SpectralProfile};
use crate::error::{invalid, precondition, Result};
use crate::matops::{chunked_fold, complement_indices, singular_spectrum, Budget, Matrix};
use serde::Serialize;

/// Magnitude of the `k`-th largest-magnitude entry of `s` (1-based).
pub fn h_stat(s: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > s.len() {
        return Err(invalid(format!("rank {k} outside 1..={}", s.len())));
    }
    let mut mags: Vec<f64> = s.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    Ok(mags[k - 1])
}

/// The threshold `h(floor(ell/2) + 1, s)`.
pub fn alpha(s: &[f64], ell: usize) -> Result<f64> {
    h_stat(s, ell / 2 + 1)
}

/// A candidate solution and the residual tolerance `||A s - x|| <= delta` it
/// is known to meet.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    values: Vec<f64>,
    residual_tolerance: f64,
}

impl CandidateSolution {
    pub fn new(values: Vec<f64>, residual_tolerance: f64) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("candidate must be a non-empty finite vector"));
        }
        if !(residual_tolerance >= 0.0 && residual_tolerance.is_finite()) {
            return Err(invalid(format!("residual tolerance {residual_tolerance} must be >= 0")));
        }
        Ok(CandidateSolution { values, residual_tolerance })
    }

    /// An exact solution (`delta = 0`).
    pub fn exact(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn residual_tolerance(&self) -> f64 {
        self.residual_tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    FirstBound,
    LooseSigma,
    TightGamma,
    NoisyLoose,
    NoisyTight,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    pub ell: usize,
    pub alpha: f64,
    /// Combined noise budget `epsilon + delta`.
    pub delta: f64,
    /// `None` when a check failed.
    pub bound: Option<f64>,
    pub assumptions: Vec<String>,
    pub checks: Vec<Check>,
}

impl BoundCertificate {
    pub fn is_certified(&self) -> bool {
        self.bound.is_some()
    }

    pub fn value(&self) -> Result<f64> {
        self.bound.ok_or_else(|| {
            let failed: Vec<String> = self
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect();
            precondition(format!("{:?} withheld ({})", self.kind, failed.join("; ")))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate fields are serializable")
    }
}

fn sparsity_assumption(ell: usize) -> String {
    format!("‖s₀‖₀ ≤ {} (⌊ℓ/2⌋ with ℓ = {ell})", ell / 2)
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new() }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) -> &mut Self {
        self.checks.push(Check { name: name.to_string(), passed, detail });
        self
    }

    fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn unit_norm(&mut self, normalized: bool) -> &mut Self {
        let detail = if normalized {
            "all column norms within tolerance of 1".to_string()
        } else {
            "some column norm differs from 1".to_string()
        };
        self.check("unit_norm_columns", normalized, detail)
    }

    fn ell_within(&mut self, profile: &SpectralProfile, ell: usize) -> &mut Self {
        let q = profile.q();
        self.check("ell_le_q", ell <= q, format!("ell = {ell}, q = {q}"));
        self.check(
            "ell_within_profile_depth",
            ell <= profile.depth,
            format!("ell = {ell}, computed depth = {}", profile.depth),
        )
    }

    fn exact(&mut self, cand: &CandidateSolution) -> &mut Self {
        let d = cand.residual_tolerance();
        self.check("exact_solution", d == 0.0, format!("residual tolerance = {d:e}"))
    }

    fn finish(
        &self,
        kind: BoundKind,
        ell: usize,
        alpha: f64,
        delta: f64,
        bound: impl FnOnce() -> f64,
    ) -> BoundCertificate {
        BoundCertificate {
            kind,
            ell,
            alpha,
            delta,
            bound: if self.ok() { Some(bound()) } else { None },
            assumptions: vec![sparsity_assumption(ell)],
            checks: self.checks.clone(),
        }
    }
}

fn check_inputs(m: usize, cand: &CandidateSolution, ell: usize) -> Result<()> {
    if cand.values().len() != m {
        return Err(invalid(format!(
            "candidate has {} entries but the dictionary has {m} columns",
            cand.values().len()
        )));
    }
    if ell == 0 {
        return Err(invalid("ell must be at least 1"));
    }
    Ok(())
}

fn check_noise(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("noise level {epsilon} must be >= 0")));
    }
    Ok(())
}

/// `(G_A + 1) m h(floor(n/2) + 1, s_hat)`, with `ell = n`.
pub fn first_bound(
    profile: &SpectralProfile,
    g_a: f64,
    cand: &CandidateSolution,
) -> Result<BoundCertificate> {
    let (n, m) = (profile.n, profile.m);
    check_inputs(m, cand, n)?;
    let a = alpha(cand.values(), n)?;
    let mut b = Builder::new();
    b.unit_norm(profile.normalized)
        .check("urp", profile.q() == n, format!("q = {}, n = {n}", profile.q()))
        .check("g_constant_finite", g_a.is_finite() && g_a > 0.0, format!("G_A = {g_a}"))
        .exact(cand);
    Ok(b.finish(BoundKind::FirstBound, n, a, 0.0, || (g_a + 1.0) * m as f64 * a))
}

/// `(1/sigma_min^(ell) + 1) m alpha`.
pub fn loose_bound(
    profile: &SpectralProfile,
    cand: &CandidateSolution,
    ell: usize,
) -> Result<BoundCertificate> {
    check_inputs(profile.m, cand, ell)?;
    let a = alpha(cand.values(), ell)?;
    let mut b = Builder::new();
    b.unit_norm(profile.normalized).ell_within(profile, ell).exact(cand);
    Ok(b.finish(BoundKind::LooseSigma, ell, a, 0.0, || {
        let s = profile.sigma_min_seq[ell - 1];
        (1.0 / s + 1.0) * profile.m as f64 * a
    }))
}

/// `gamma_bar'_ell * alpha` in general, `gamma_bar_ell * alpha` when
/// `normalized` selects the unit-norm branch (checked against the profile).
pub fn tight_bound(
    profile: &SpectralProfile,
    cand: &CandidateSolution,
    ell: usize,
    normalized: bool,
) -> Result<BoundCertificate> {
    check_inputs(profile.m, cand, ell)?;
    let a = alpha(cand.values(), ell)?;
    let mut b = Builder::new();
    if normalized {
        b.unit_norm(profile.normalized);
    }
    b.ell_within(profile, ell).exact(cand);
    Ok(b.finish(BoundKind::TightGamma, ell, a, 0.0, || {
        let g = if normalized {
            profile.gamma_bar_seq[ell - 1]
        } else {
            profile.gamma_bar_prime_seq[ell - 1]
        };
        g * a
    }))
}

/// `(1/sigma_min^(ell) + 1) m alpha + Delta / sigma_min^(ell)` with
/// `Delta = epsilon + delta`.
pub fn noisy_loose_bound(
    profile: &SpectralProfile,
    cand: &CandidateSolution,
    ell: usize,
    epsilon: f64,
) -> Result<BoundCertificate> {
    check_inputs(profile.m, cand, ell)?;
    check_noise(epsilon)?;
    let a = alpha(cand.values(), ell)?;
    let delta = epsilon + cand.residual_tolerance();
    let mut b = Builder::new();
    b.unit_norm(profile.normalized).ell_within(profile, ell);
    Ok(b.finish(BoundKind::NoisyLoose, ell, a, delta, || {
        let s = profile.sigma_min_seq[ell - 1];
        (1.0 / s + 1.0) * profile.m as f64 * a + delta / s
    }))
}

/// One term of the noisy tight maximization for a `j`-column subset with
/// ratio `r = sigma_max(B^c) / sigma_min(B)`.
fn f_term(sigma_min_b: f64, r: f64, m_s: f64, a: f64, delta: f64) -> f64 {
    (1.0 + r * r) * m_s * a * a + 2.0 * r * m_s.sqrt() * a * delta
        + delta * delta / (sigma_min_b * sigma_min_b)
}

/// The maximization `f(A, alpha, Delta)` over `j = 1..=ell` and all
/// `j`-column subsets, with `m_s = m - j`.
pub fn noisy_tight_f(a: &Matrix, ell: usize, alpha: f64, delta: f64, budget: Budget) -> Result<f64> {
    let m = a.cols();
    let mut best = f64::NEG_INFINITY;
    for j in 1..=ell {
        let m_s = (m - j) as f64;
        let level = chunked_fold(
            m,
            j,
            budget,
            f64::NEG_INFINITY,
            |acc, idx| {
                let smin = singular_spectrum(&a.gather_columns(idx)).min();
                let rest = complement_indices(idx, m);
                let smax_c = if rest.is_empty() {
                    0.0
                } else {
                    singular_spectrum(&a.gather_columns(&rest)).max()
                };
                acc.max(f_term(smin, smax_c / smin, m_s, alpha, delta))
            },
            f64::max,
        )?;
        best = best.max(level);
    }
    Ok(best)
}

/// `sqrt(max(m alpha^2, f))`, or `sqrt(f)` for unit-norm columns.
pub fn noisy_tight_bound(
    a: &Matrix,
    cand: &CandidateSolution,
    ell: usize,
    epsilon: f64,
    budget: Budget,
) -> Result<BoundCertificate> {
    let m = a.cols();
    check_inputs(m, cand, ell)?;
    check_noise(epsilon)?;
    let alpha_v = alpha(cand.values(), ell)?;
    let delta = epsilon + cand.residual_tolerance();
    let kr = kruskal_rank(a, budget);
    if !kr.complete && ell > kr.q {
        budget.check_subsets(m, kr.q + 1)?;
    }
    let normalized = has_unit_columns(a);
    let mut b = Builder::new();
    b.check("ell_le_q", ell <= kr.q, format!("ell = {ell}, q = {}", kr.q));
    if !b.ok() {
        return Ok(b.finish(BoundKind::NoisyTight, ell, alpha_v, delta, || 0.0));
    }
    let f = noisy_tight_f(a, ell, alpha_v, delta, budget)?;
    let sq = if normalized { f } else { f.max(m as f64 * alpha_v * alpha_v) };
    b.check(
        "unit_norm_branch",
        true,
        if normalized { "unit-norm columns: m alpha^2 term dropped" } else { "general columns" }
            .to_string(),
    );
    Ok(b.finish(BoundKind::NoisyTight, ell, alpha_v, delta, || sq.sqrt()))
}
