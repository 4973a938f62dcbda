//! Seeded Monte Carlo comparison of certified bounds against the true
//! reconstruction error of the smoothed-l0 solver.

use crate::certify::{first_bound, loose_bound, tight_bound, CandidateSolution};
use crate::dict_analysis::{g_constant, gamma_profile};
use crate::error::{invalid, Result};
use crate::matops::Budget;
use crate::recover::{make_instance, sl0_solve, Sl0Params};
use crate::rng::{self, derive_seed};
use rayon::prelude::*;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub sl0: Sl0Params,
    pub budget: Budget,
}

impl ExperimentConfig {
    pub fn new(n: usize, m: usize, p: usize, trials: usize, sigma_min: f64, master_seed: u64) -> Self {
        ExperimentConfig {
            n,
            m,
            p,
            trials,
            master_seed,
            sl0: Sl0Params::new(sigma_min),
            budget: Budget::default(),
        }
    }

    /// Certification order, `2p`.
    pub fn ell(&self) -> usize {
        2 * self.p
    }
}

/// One trial. Bounds are `None` when their certificate was withheld;
/// ratios are `None` when the bound is missing or the actual error is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub index: usize,
    pub seed: u64,
    pub actual_error: f64,
    pub alpha: f64,
    /// `(G_A + 1) m h(floor(n/2) + 1, s_hat)`.
    pub g_bound: Option<f64>,
    /// `(1/sigma_min^(2p) + 1) m alpha`; the "first" bound of the comparison.
    pub loose_bound: Option<f64>,
    /// `gamma_bar_(2p) alpha`.
    pub tight_bound: Option<f64>,
    pub failure: Option<String>,
}

impl TrialReport {
    fn ratio(&self, bound: Option<f64>) -> Option<f64> {
        match bound {
            Some(b) if self.actual_error > 0.0 => Some(b / self.actual_error),
            _ => None,
        }
    }

    pub fn g_ratio(&self) -> Option<f64> {
        self.ratio(self.g_bound)
    }

    pub fn loose_ratio(&self) -> Option<f64> {
        self.ratio(self.loose_bound)
    }

    pub fn tight_ratio(&self) -> Option<f64> {
        self.ratio(self.tight_bound)
    }

    fn failed(index: usize, seed: u64, err: String) -> Self {
        TrialReport {
            index,
            seed,
            actual_error: f64::NAN,
            alpha: f64::NAN,
            g_bound: None,
            loose_bound: None,
            tight_bound: None,
            failure: Some(err),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialReport>,
}

/// Arithmetic mean of the defined values, in row order.
fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, count) = values.flatten().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

impl ExperimentReport {
    pub fn mean_g_ratio(&self) -> Option<f64> {
        mean(self.trials.iter().map(TrialReport::g_ratio))
    }

    pub fn mean_loose_ratio(&self) -> Option<f64> {
        mean(self.trials.iter().map(TrialReport::loose_ratio))
    }

    pub fn mean_tight_ratio(&self) -> Option<f64> {
        mean(self.trials.iter().map(TrialReport::tight_ratio))
    }

    pub fn failures(&self) -> usize {
        self.trials.iter().filter(|t| t.failure.is_some()).count()
    }

    /// `#`-prefixed configuration lines, one row per trial, then `#` mean lines.
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# n={} m={} p={} ell={} trials={} master_seed={} rng={}",
            c.n,
            c.m,
            c.p,
            c.ell(),
            c.trials,
            c.master_seed,
            rng::RNG_ALGORITHM
        );
        let _ = writeln!(
            out,
            "# sl0 sigma_min={} sigma_decrease={} inner_iters={} mu={}",
            c.sl0.sigma_min, c.sl0.sigma_decrease, c.sl0.inner_iters, c.sl0.mu
        );
        out.push_str(
            "trial,seed,actual_error,alpha,g_bound,loose_bound,tight_bound,g_ratio,loose_ratio,tight_ratio,status\n",
        );
        for t in &self.trials {
            let status = t.failure.as_deref().map(|f| f.replace([',', '\n'], ";"));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                t.index,
                t.seed,
                cell(t.failure.is_none().then_some(t.actual_error)),
                cell(t.failure.is_none().then_some(t.alpha)),
                cell(t.g_bound),
                cell(t.loose_bound),
                cell(t.tight_bound),
                cell(t.g_ratio()),
                cell(t.loose_ratio()),
                cell(t.tight_ratio()),
                status.unwrap_or_else(|| "ok".into())
            );
        }
        let _ = writeln!(out, "# mean_g_ratio={}", cell(self.mean_g_ratio()));
        let _ = writeln!(out, "# mean_loose_ratio={}", cell(self.mean_loose_ratio()));
        let _ = writeln!(out, "# mean_tight_ratio={}", cell(self.mean_tight_ratio()));
        out
    }
}

fn run_trial(cfg: &ExperimentConfig, index: usize) -> TrialReport {
    let seed = derive_seed(cfg.master_seed, index as u64);
    match try_trial(cfg, index, seed) {
        Ok(t) => t,
        Err(e) => TrialReport::failed(index, seed, e.to_string()),
    }
}

fn try_trial(cfg: &ExperimentConfig, index: usize, seed: u64) -> Result<TrialReport> {
    let inst = make_instance(cfg.n, cfg.m, cfg.p, 0.0, seed, true)?;
    let a = &inst.dictionary;
    let s_hat = sl0_solve(a, &inst.x, &cfg.sl0)?;
    let actual_error = s_hat
        .iter()
        .zip(&inst.s0)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt();
    let ell = cfg.ell();
    let cand = CandidateSolution::exact(s_hat)?;
    let profile = gamma_profile(a, ell, cfg.budget)?;
    let loose = loose_bound(&profile, &cand, ell)?;
    let tight = tight_bound(&profile, &cand, ell, true)?;

    let g_bound = match g_constant(a, cfg.budget) {
        Ok((g, _)) => first_bound(&profile, g, &cand)?.bound,
        Err(_) => None,
    };
    Ok(TrialReport {
        index,
        seed,
        actual_error,
        alpha: tight.alpha,
        g_bound,
        loose_bound: loose.bound,
        tight_bound: tight.bound,
        failure: None,
    })
}

/// Runs every trial on its own derived stream; rows come back in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.trials == 0 || cfg.p == 0 {
        return Err(invalid("trials and p must be positive"));
    }
    if cfg.n >= cfg.m || cfg.ell() > cfg.n {
        return Err(invalid(format!(
            "need n < m and 2p <= n, got n = {}, m = {}, p = {}",
            cfg.n, cfg.m, cfg.p
        )));
    }
    let trials = (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect();
    Ok(ExperimentReport { config: cfg.clone(), trials })
}
