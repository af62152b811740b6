//! Stopping values for i.i.d. draws from the discrete uniform distribution
//! on `{0, ..., N-1}`.
//!
//! The optimality equation is
//!
//! ```text
//!     V_{1,N} = (N-1)/2,
//!     V_{n,N} = V_{n-1,N} - (1/N) * sum_{k=0}^{N-1} (V_{n-1,N} - k)_+ ,
//! ```
//!
//! where the positive-part sum collapses to the closed form
//! `(m+1) V - m(m+1)/2` with `m = min(floor(V), N-1)`, so each step is O(1).
//! The induced strategy accepts a draw equal to `k` at step `j` iff
//! `k <= V_{n-j,N}` (weak inequality; ties are value-indifferent).

use crate::error::{Error, Result};

/// Table of stopping values `V_{n,N}` for fixed support size `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteValueTable {
    support: usize,
    n_max: usize,
    values: Vec<f64>,
}

impl DiscreteValueTable {
    /// Support size `N`.
    pub fn support(&self) -> usize {
        self.support
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `V_{n,N}` for `1 <= n <= n_max`.
    pub fn value(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.n_max, "n out of range");
        self.values[n - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Closed form of `sum_{k=0}^{N-1} (v - k)_+`.
fn positive_part_sum(v: f64, support: usize) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let m = (v.floor() as usize).min(support - 1);
    let mf = m as f64;
    (mf + 1.0) * v - mf * (mf + 1.0) / 2.0
}

/// Stopping values `V_{1,N}, ..., V_{n_max,N}` via the backward recursion.
pub fn discrete_values(n_max: usize, support: usize) -> Result<DiscreteValueTable> {
    if n_max == 0 || support == 0 {
        return Err(Error::Domain(
            "discrete_values requires n_max >= 1 and N >= 1".into(),
        ));
    }
    let mut values = Vec::with_capacity(n_max);
    let mut v = (support as f64 - 1.0) / 2.0;
    values.push(v);
    for _ in 2..=n_max {
        v -= positive_part_sum(v, support) / support as f64;
        values.push(v);
    }
    Ok(DiscreteValueTable {
        support,
        n_max,
        values,
    })
}

/// Matrix of values with rows indexed by support size and columns by the
/// number of trials: `matrix[i][j] = V_{n_range[j], N_range[i]}`.
pub fn value_matrix(
    support_range: std::ops::RangeInclusive<usize>,
    n_range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<Vec<f64>>> {
    if support_range.is_empty() || n_range.is_empty() {
        return Err(Error::Domain("value_matrix requires nonempty ranges".into()));
    }
    let n_max = *n_range.end();
    support_range
        .map(|support| {
            let table = discrete_values(n_max, support)?;
            Ok(n_range.clone().map(|n| table.value(n)).collect())
        })
        .collect()
}

/// Stopping value for sampling from `{1, ..., N}`: `V_{n,N} + 1`.
pub fn shifted_value(n: usize, support: usize) -> Result<f64> {
    Ok(discrete_values(n, support)?.value(n) + 1.0)
}

/// Cutoff form of the optimal strategy: for each draw value `k` the earliest
/// step at which it is accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCutoffRule {
    pub n: usize,
    pub support: usize,
    /// `accept_from[k]` is the earliest step accepting a draw equal to `k`;
    /// the final step `n` accepts everything.
    pub accept_from: Vec<usize>,
}

impl FiniteCutoffRule {
    /// Whether a draw equal to `k` is accepted at step `step` (1-based).
    pub fn accepts(&self, step: usize, k: usize) -> bool {
        step == self.n || self.accept_from[k] <= step
    }
}

/// Extracts the cutoff rule `accept_from[k] = min { j : k <= V_{n-j,N} }`
/// (with the `V_{0,N} = infinity` sentinel covered by the forced last step).
pub fn finite_cutoff_rule(n: usize, support: usize) -> Result<FiniteCutoffRule> {
    if n == 0 || support == 0 {
        return Err(Error::Domain(
            "finite_cutoff_rule requires n >= 1 and N >= 1".into(),
        ));
    }
    let table = discrete_values(n.max(1), support)?;
    let accept_from = (0..support)
        .map(|k| {
            // V_{n-j,N} increases as j grows; find the first step where k fits.
            (1..n)
                .find(|&j| k as f64 <= table.value(n - j))
                .unwrap_or(n)
        })
        .collect();
    Ok(FiniteCutoffRule {
        n,
        support,
        accept_from,
    })
}

/// Exact expected loss of a cutoff rule by forward recursion over
/// (step, survival probability), with forced acceptance at the last step.
pub fn evaluate_finite_cutoff_rule(rule: &FiniteCutoffRule) -> f64 {
    let n_f = rule.support as f64;
    let mut reach = 1.0;
    let mut loss = 0.0;
    let mut accepted = 0usize; // size of the accepted prefix {0..accepted-1}
    for j in 1..rule.n {
        while accepted < rule.support && rule.accept_from[accepted] <= j {
            accepted += 1;
        }
        let m = accepted as f64;
        loss += reach * m * (m - 1.0) / (2.0 * n_f);
        reach *= (n_f - m) / n_f;
    }
    loss + reach * (n_f - 1.0) / 2.0
}
