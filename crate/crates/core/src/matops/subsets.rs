use super::ColumnSubset;
use crate::error::{invalid, Error, Result};
use rayon::prelude::*;

/// Default cap on the number of subsets a single enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Combinations evaluated per parallel work item.
const CHUNK: usize = 2048;

/// Upper limit on subsets visited by one enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget(u64::MAX)
    }

    /// Fails with [`Error::BudgetExceeded`] when `requested` is over the cap.
    pub fn check(&self, requested: u128) -> Result<()> {
        if requested > self.0 as u128 {
            Err(Error::BudgetExceeded { requested, budget: self.0 })
        } else {
            Ok(())
        }
    }

    /// Budget check for all `j`-subsets of `cols` columns; an overflowing
    /// count is always over budget.
    pub fn check_subsets(&self, cols: usize, j: usize) -> Result<()> {
        self.check(binomial(cols, j).unwrap_or(u128::MAX))
    }
}

/// Exact `C(n, k)`, or `None` on `u128` overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step
        acc = acc.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(acc)
}

/// `ln C(n, k)` as a sum of logarithms; finite for any `k <= n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Advances `idx` to the next `idx.len()`-combination of `0..cols` in
/// lexicographic order. Returns false after the last one.
pub(crate) fn next_combination(idx: &mut [usize], cols: usize) -> bool {
    let j = idx.len();
    let mut i = j;
    while i > 0 {
        i -= 1;
        if idx[i] < cols - j + i {
            idx[i] += 1;
            for t in i + 1..j {
                idx[t] = idx[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Lexicographic stream of all `j`-column subsets.
#[derive(Debug, Clone)]
pub struct Subsets {
    cols: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Subsets {
    type Item = ColumnSubset;

    fn next(&mut self) -> Option<ColumnSubset> {
        let cur = self.current.as_mut()?;
        let out = ColumnSubset { indices: cur.clone(), parent_cols: self.cols };
        if !next_combination(cur, self.cols) {
            self.current = None;
        }
        Some(out)
    }
}

/// All `C(cols, j)` subsets in lexicographic order, refused when the count
/// exceeds `budget`.
pub fn enumerate_subsets(cols: usize, j: usize, budget: Budget) -> Result<Subsets> {
    check_range(cols, j)?;
    budget.check_subsets(cols, j)?;
    Ok(Subsets { cols, current: Some((0..j).collect()) })
}

fn check_range(cols: usize, j: usize) -> Result<()> {
    if j == 0 || j > cols {
        return Err(invalid(format!("subset size {j} must lie in 1..={cols}")));
    }
    Ok(())
}

/// Parallel fold over all `j`-combinations with a reduction order that does
/// not depend on the worker count.
///
/// The lexicographic stream is cut into fixed-size chunks; each chunk is
/// folded with `visit` starting from `identity`, and the chunk results are
/// merged left to right with `merge`. A `merge` that keeps its left argument
/// on ties therefore keeps the lexicographically first witness.
pub(crate) fn chunked_fold<A, V, M>(
    cols: usize,
    j: usize,
    budget: Budget,
    identity: A,
    visit: V,
    merge: M,
) -> Result<A>
where
    A: Clone + Send + Sync,
    V: Fn(A, &[usize]) -> A + Sync,
    M: Fn(A, A) -> A,
{
    check_range(cols, j)?;
    budget.check_subsets(cols, j)?;
    let total = binomial(cols, j).unwrap_or(u128::MAX) as usize;

    let mut starts = Vec::with_capacity(total / CHUNK + 1);
    let mut idx: Vec<usize> = (0..j).collect();
    let mut pos = 0usize;
    loop {
        if pos.is_multiple_of(CHUNK) {
            starts.push(idx.clone());
        }
        pos += 1;
        if !next_combination(&mut idx, cols) {
            break;
        }
    }

    let partials: Vec<A> = starts
        .into_par_iter()
        .map(|mut idx| {
            let mut acc = identity.clone();
            for step in 0..CHUNK {
                acc = visit(acc, &idx);
                if step + 1 < CHUNK && !next_combination(&mut idx, cols) {
                    break;
                }
            }
            acc
        })
        .collect();

    Ok(partials.into_iter().fold(identity, merge))
}
