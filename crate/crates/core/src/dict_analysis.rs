//! Combinatorial dictionary constants.
//!
//! All quantities here are extrema over column subsets and are computed by
//! exhaustive enumeration under a [`Budget`]. Subset scans run in parallel
//! but reduce in lexicographic order, so witnesses are reproducible.

use crate::error::{invalid, precondition, Error, Result};
use crate::matops::{
    binomial, chunked_fold, complement_indices, pseudoinverse_frobenius, singular_spectrum,
    Budget, ColumnSubset, Matrix,
};
use std::fmt::Write as _;

/// Column norms within this distance of 1 count as unit norm.
pub const UNIT_NORM_TOL: f64 = 1e-8;

pub fn has_unit_columns(a: &Matrix) -> bool {
    a.column_norms().iter().all(|n| (n - 1.0).abs() <= UNIT_NORM_TOL)
}

/// An overcomplete dictionary: `n x m` with `m > n`.
#[derive(Debug, Clone)]
pub struct Dictionary {
    matrix: Matrix,
    column_norms: Vec<f64>,
    normalized: bool,
}

impl Dictionary {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.cols() <= matrix.rows() {
            return Err(invalid(format!(
                "a dictionary needs more columns than rows, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let column_norms = matrix.column_norms();
        let normalized = column_norms.iter().all(|n| (n - 1.0).abs() <= UNIT_NORM_TOL);
        Ok(Dictionary { matrix, column_norms, normalized })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn m(&self) -> usize {
        self.matrix.cols()
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }
}

/// Kruskal rank and spark.
///
/// `spark` equals `q + 1`. When no dependent set exists up to `min(n, m)`
/// columns, `q = min(n, m)` and `spark` is the sentinel `min(n, m) + 1`;
/// `spark_witnessed` is then true only if `m > n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KruskalRank {
    pub q: usize,
    pub spark: usize,
    pub spark_witnessed: bool,
    /// False when the budget stopped the scan; `q` is then a lower bound.
    pub complete: bool,
}

fn is_dependent(b: &Matrix) -> bool {
    let s = singular_spectrum(b);
    s.max() == 0.0 || s.is_rank_deficient()
}

pub fn kruskal_rank(a: &Matrix, budget: Budget) -> KruskalRank {
    let (n, m) = (a.rows(), a.cols());
    let top = n.min(m);
    for j in 1..=top {
        let found = chunked_fold(
            m,
            j,
            budget,
            false,
            |acc, idx| acc || is_dependent(&a.gather_columns(idx)),
            |x, y| x || y,
        );
        match found {
            Ok(true) => {
                return KruskalRank { q: j - 1, spark: j, spark_witnessed: true, complete: true }
            }
            Ok(false) => {}
            Err(_) => {
                return KruskalRank { q: j - 1, spark: j, spark_witnessed: false, complete: false }
            }
        }
    }
    KruskalRank { q: top, spark: top + 1, spark_witnessed: m > n, complete: true }
}

#[derive(Debug, Clone)]
struct Extremum {
    value: f64,
    witness: Option<Vec<usize>>,
}

impl Extremum {
    fn merge_min(self, other: Extremum) -> Extremum {
        match (&self.witness, &other.witness) {
            (None, _) => other,
            (_, None) => self,
            _ if other.value < self.value => other,
            _ => self,
        }
    }

    fn merge_max(self, other: Extremum) -> Extremum {
        match (&self.witness, &other.witness) {
            (None, _) => other,
            (_, None) => self,
            _ if other.value > self.value => other,
            _ => self,
        }
    }

    fn subset(&self, cols: usize) -> ColumnSubset {
        let idx = self.witness.clone().expect("scan visits at least one subset");
        ColumnSubset::new(idx, cols).expect("enumerated subsets are valid")
    }
}

/// Smallest singular value of a subset, snapped to 0 below the rank tolerance.
fn subset_sigma_min(b: &Matrix) -> f64 {
    let s = singular_spectrum(b);
    if s.max() == 0.0 || s.is_rank_deficient() {
        0.0
    } else {
        s.min()
    }
}

fn check_j(a: &Matrix, j: usize) -> Result<()> {
    if j == 0 || j > a.cols() {
        return Err(invalid(format!("subset size {j} must lie in 1..={}", a.cols())));
    }
    Ok(())
}

/// `sigma_min^(j)(A)` and the first subset attaining it.
pub fn sigma_min_j(a: &Matrix, j: usize, budget: Budget) -> Result<(f64, ColumnSubset)> {
    check_j(a, j)?;
    let ext = chunked_fold(
        a.cols(),
        j,
        budget,
        Extremum { value: f64::INFINITY, witness: None },
        |acc, idx| {
            let v = subset_sigma_min(&a.gather_columns(idx));
            acc.merge_min(Extremum { value: v, witness: Some(idx.to_vec()) })
        },
        Extremum::merge_min,
    )?;
    Ok((ext.value, ext.subset(a.cols())))
}

/// `sigma_min^(j)(A)` for `j = 1..=upto`.
pub fn sigma_min_sequence(a: &Matrix, upto: usize, budget: Budget) -> Result<Vec<f64>> {
    (1..=upto).map(|j| sigma_min_j(a, j, budget).map(|(v, _)| v)).collect()
}

#[derive(Debug, Clone)]
struct LevelStats {
    sigma_min: Extremum,
    eta: Extremum,
    dependent: bool,
}

fn merge_level(x: LevelStats, y: LevelStats) -> LevelStats {
    LevelStats {
        sigma_min: x.sigma_min.merge_min(y.sigma_min),
        eta: x.eta.merge_max(y.eta),
        dependent: x.dependent || y.dependent,
    }
}

fn level_scan(a: &Matrix, j: usize, budget: Budget) -> Result<LevelStats> {
    let m = a.cols();
    let empty = LevelStats {
        sigma_min: Extremum { value: f64::INFINITY, witness: None },
        eta: Extremum { value: f64::NEG_INFINITY, witness: None },
        dependent: false,
    };
    chunked_fold(
        m,
        j,
        budget,
        empty,
        |acc, idx| {
            let smin = subset_sigma_min(&a.gather_columns(idx));
            let rest = complement_indices(idx, m);
            let smax_c = if rest.is_empty() {
                0.0
            } else {
                singular_spectrum(&a.gather_columns(&rest)).max()
            };
            let here = LevelStats {
                sigma_min: Extremum { value: smin, witness: Some(idx.to_vec()) },
                eta: Extremum {
                    value: if smin > 0.0 { smax_c / smin } else { f64::INFINITY },
                    witness: Some(idx.to_vec()),
                },
                dependent: smin == 0.0,
            };
            merge_level(acc, here)
        },
        merge_level,
    )
}

fn beyond_q(a: &Matrix, j: usize, budget: Budget) -> Error {
    let kr = kruskal_rank(a, budget);
    precondition(format!(
        "subset size {j} exceeds the Kruskal rank q = {}{}",
        kr.q,
        if kr.complete { "" } else { " (lower bound)" }
    ))
}

/// `eta_j(A) = max_B sigma_max(B^c) / sigma_min(B)` over `j`-column `B`, with
/// the first maximizing subset. Requires `j <= q(A)`.
pub fn eta_j(a: &Matrix, j: usize, budget: Budget) -> Result<(f64, ColumnSubset)> {
    check_j(a, j)?;
    let stats = level_scan(a, j, budget)?;
    if stats.dependent {
        return Err(beyond_q(a, j, budget));
    }
    Ok((stats.eta.value, stats.eta.subset(a.cols())))
}

/// Per-cardinality dictionary constants up to a depth `J <= q`.
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    pub n: usize,
    pub m: usize,
    pub normalized: bool,
    pub kruskal: KruskalRank,
    pub depth: usize,
    pub sigma_min_seq: Vec<f64>,
    pub eta_seq: Vec<f64>,
    pub eta_witnesses: Vec<ColumnSubset>,
    pub gamma_seq: Vec<f64>,
    pub gamma_bar_seq: Vec<f64>,
    pub gamma_bar_prime_seq: Vec<f64>,
}

impl SpectralProfile {
    pub fn q(&self) -> usize {
        self.kruskal.q
    }

    pub fn spark(&self) -> usize {
        self.kruskal.spark
    }

    fn at(seq: &[f64], j: usize) -> Result<f64> {
        if j == 0 || j > seq.len() {
            return Err(invalid(format!("index {j} outside computed depth 1..={}", seq.len())));
        }
        Ok(seq[j - 1])
    }

    /// `sigma_min^(j)`, 1-based.
    pub fn sigma_min(&self, j: usize) -> Result<f64> {
        Self::at(&self.sigma_min_seq, j)
    }

    pub fn eta(&self, j: usize) -> Result<f64> {
        Self::at(&self.eta_seq, j)
    }

    pub fn gamma(&self, j: usize) -> Result<f64> {
        Self::at(&self.gamma_seq, j)
    }

    pub fn gamma_bar(&self, j: usize) -> Result<f64> {
        Self::at(&self.gamma_bar_seq, j)
    }

    pub fn gamma_bar_prime(&self, j: usize) -> Result<f64> {
        Self::at(&self.gamma_bar_prime_seq, j)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,sigma_min_j,eta_j,gamma_j,gamma_bar_j,gamma_bar_prime_j\n");
        for j in 0..self.depth {
            let _ = writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                j + 1,
                self.sigma_min_seq[j],
                self.eta_seq[j],
                self.gamma_seq[j],
                self.gamma_bar_seq[j],
                self.gamma_bar_prime_seq[j]
            );
        }
        s
    }
}

/// Fills every sequence for `j = 1..=depth`. Requires `1 <= depth <= q(A)`.
pub fn gamma_profile(a: &Matrix, depth: usize, budget: Budget) -> Result<SpectralProfile> {
    let kruskal = kruskal_rank(a, budget);
    if depth == 0 {
        return Err(invalid("profile depth must be at least 1"));
    }
    if depth > kruskal.q {
        if !kruskal.complete {
            let j = kruskal.q + 1;
            budget.check_subsets(a.cols(), j)?;
        }
        return Err(precondition(format!(
            "depth {depth} exceeds the Kruskal rank q = {}",
            kruskal.q
        )));
    }
    let m = a.cols();
    let mut sigma_min_seq = Vec::with_capacity(depth);
    let mut eta_seq = Vec::with_capacity(depth);
    let mut eta_witnesses = Vec::with_capacity(depth);
    let mut gamma_seq = Vec::with_capacity(depth);
    for j in 1..=depth {
        let st = level_scan(a, j, budget)?;
        if st.dependent {
            return Err(beyond_q(a, j, budget));
        }
        sigma_min_seq.push(st.sigma_min.value);
        gamma_seq.push(((m - j) as f64 * (1.0 + st.eta.value * st.eta.value)).sqrt());
        eta_seq.push(st.eta.value);
        eta_witnesses.push(st.eta.subset(m));
    }
    let gamma_bar_seq: Vec<f64> = gamma_seq
        .iter()
        .scan(f64::NEG_INFINITY, |run, &g| {
            *run = run.max(g);
            Some(*run)
        })
        .collect();
    let root_m = (m as f64).sqrt();
    let gamma_bar_prime_seq = gamma_bar_seq.iter().map(|g| g.max(root_m)).collect();
    Ok(SpectralProfile {
        n: a.rows(),
        m,
        normalized: has_unit_columns(a),
        kruskal,
        depth,
        sigma_min_seq,
        eta_seq,
        eta_witnesses,
        gamma_seq,
        gamma_bar_seq,
        gamma_bar_prime_seq,
    })
}

/// `G_A`: largest `||B^+||_F` over all subsets of at most `n` columns, with
/// the first maximizing subset. Requires the unique representation property.
pub fn g_constant(a: &Matrix, budget: Budget) -> Result<(f64, ColumnSubset)> {
    let (n, m) = (a.rows(), a.cols());
    let top = n.min(m);
    let total = (1..=top)
        .try_fold(0u128, |acc, j| binomial(m, j).and_then(|c| acc.checked_add(c)))
        .unwrap_or(u128::MAX);
    budget.check(total)?;
    let kr = kruskal_rank(a, budget);
    if kr.q < n {
        return Err(precondition(format!(
            "G_A needs every {n} columns to be independent, but q = {}",
            kr.q
        )));
    }
    let mut best = Extremum { value: f64::NEG_INFINITY, witness: None };
    for j in 1..=top {
        let level = chunked_fold(
            m,
            j,
            budget,
            Extremum { value: f64::NEG_INFINITY, witness: None },
            |acc, idx| {
                // Independent subsets below q never hit the singular branch.
                let v = pseudoinverse_frobenius(&a.gather_columns(idx)).unwrap_or(f64::INFINITY);
                acc.merge_max(Extremum { value: v, witness: Some(idx.to_vec()) })
            },
            Extremum::merge_max,
        )?;
        best = best.merge_max(level);
    }
    Ok((best.value, best.subset(m)))
}
