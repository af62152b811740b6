//! Lindley's expected-rank problem.
//!
//! The observer sees relative ranks `Y_1, ..., Y_n`, with `Y_j` uniform on
//! `{1..j}` and independent across `j`, and must stop exactly once; stopping
//! at step `j` with relative rank `r` costs `r (n+1)/(j+1)` (the conditional
//! expected overall rank).  Backward induction gives the optimal value `R_n`,
//! and any memoryless cutoff rule can be priced exactly by a forward pass.
//!
//! Each DP step is O(1): the acceptance set at step `j` is a rank prefix
//! `{1..m}`, so the sum of accepted losses collapses to `m(m+1)/2` times the
//! penalisation factor.

use crate::error::{Error, Result};
use crate::limit::CutoffTable;

/// Output of the backward induction for `n` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDpResult {
    pub n: usize,
    /// Optimal expected rank `R_n = W_1`.
    pub optimal: f64,
    /// `stage_values[j-1]` holds `W_j`, the value on reaching step `j`
    /// before observing `Y_j`.
    pub stage_values: Vec<f64>,
    /// `accept_max_rank[j-1]` is the largest relative rank accepted at
    /// step `j` (the whole range `1..=n` at the forced last step).
    pub accept_max_rank: Vec<usize>,
}

/// Memoryless rank rule: `accept_from[r-1]` is the earliest step at which
/// relative rank `r` is accepted voluntarily (`n+1` meaning never, except
/// for the forced stop at step `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct MemorylessRankRule {
    pub n: usize,
    pub accept_from: Vec<usize>,
}

/// Solves the `n`-step problem by backward induction.
pub fn lindley_values(n: usize) -> Result<RankDpResult> {
    if n == 0 {
        return Err(Error::Domain("lindley_values requires n >= 1".into()));
    }
    let nf = n as f64;
    let mut stage_values = vec![0.0; n];
    let mut accept_max_rank = vec![0usize; n];
    stage_values[n - 1] = (nf + 1.0) / 2.0;
    accept_max_rank[n - 1] = n;
    let mut next = stage_values[n - 1];
    for j in (1..n).rev() {
        let jf = j as f64;
        let factor = (nf + 1.0) / (jf + 1.0);
        // Accept rank r iff r * factor <= W_{j+1}.
        let m = ((next / factor).floor() as usize).min(j);
        let mf = m as f64;
        let w = (factor * mf * (mf + 1.0) / 2.0 + (jf - mf) * next) / jf;
        stage_values[j - 1] = w;
        accept_max_rank[j - 1] = m;
        next = w;
    }
    Ok(RankDpResult {
        n,
        optimal: stage_values[0],
        stage_values,
        accept_max_rank,
    })
}

impl RankDpResult {
    /// Repackages the DP acceptance sets as a memoryless rule.
    pub fn optimal_rule(&self) -> MemorylessRankRule {
        let accept_from = (1..=self.n)
            .map(|r| {
                (1..self.n)
                    .find(|&j| self.accept_max_rank[j - 1] >= r)
                    .unwrap_or(self.n)
            })
            .collect();
        MemorylessRankRule {
            n: self.n,
            accept_from,
        }
    }
}

/// Discretisation of the asymptotically optimal rule: accept relative rank
/// `r` from step `ceil(n e^{-delta_r})` on.
pub fn delta_rank_rule(n: usize, table: &CutoffTable) -> Result<MemorylessRankRule> {
    if n == 0 {
        return Err(Error::Domain("delta_rank_rule requires n >= 1".into()));
    }
    let nf = n as f64;
    let mut accept_from = Vec::with_capacity(n);
    for r in 1..=n {
        if accept_from.last() == Some(&n) {
            // All later ranks activate at the forced last step anyway.
            accept_from.push(n);
            continue;
        }
        if r > table.k_max() {
            return Err(Error::ExtendTable(format!(
                "delta_rank_rule at n={n} needs delta_{r} but k_max={}",
                table.k_max()
            )));
        }
        let step = (nf * (-table.delta(r)).exp()).ceil() as usize;
        accept_from.push(step.clamp(1, n));
    }
    Ok(MemorylessRankRule { n, accept_from })
}

/// Exact expected loss of a memoryless rule, by forward recursion over
/// (step, survival probability), with forced acceptance at step `n`.
///
/// Requires `accept_from` nondecreasing in the rank.
pub fn evaluate_rank_rule(rule: &MemorylessRankRule) -> f64 {
    let n = rule.n;
    let nf = n as f64;
    debug_assert!(rule.accept_from.windows(2).all(|w| w[0] <= w[1]));
    let mut reach = 1.0;
    let mut loss = 0.0;
    let mut active = 0usize; // ranks 1..=active are voluntarily accepted
    for j in 1..n {
        while active < rule.accept_from.len() && rule.accept_from[active] <= j {
            active += 1;
        }
        let m = active.min(j); // rank at step j is at most j
        let mf = m as f64;
        let jf = j as f64;
        let factor = (nf + 1.0) / (jf + 1.0);
        loss += reach * factor * mf * (mf + 1.0) / (2.0 * jf);
        reach *= (jf - mf) / jf;
    }
    loss + reach * (nf + 1.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::cutoffs;
    use proptest::prelude::*;

    #[test]
    fn zero_steps_is_a_domain_error() {
        assert!(lindley_values(0).is_err());
    }

    #[test]
    fn tiny_horizons() {
        assert_eq!(lindley_values(1).unwrap().optimal, 1.0);
        assert_eq!(lindley_values(2).unwrap().optimal, 1.5);
        let r3 = lindley_values(3).unwrap();
        assert!((r3.optimal - 5.0 / 3.0).abs() < 1e-15);
        // Hand DP: W_3 = 2, W_2 = (4/3 + 2)/2 = 5/3, step 1 continues.
        assert_eq!(r3.stage_values[2], 2.0);
        assert!((r3.stage_values[1] - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(r3.accept_max_rank, vec![0, 1, 3]);
    }

    #[test]
    fn values_increase_and_stay_below_the_limit() {
        let mut prev = 0.0;
        let mut n = 10;
        while n <= 100_000 {
            let r = lindley_values(n).unwrap();
            assert!(r.optimal > prev, "R_n not increasing at n={n}");
            assert!(r.optimal < 3.8695);
            assert!(r.optimal >= 1.0);
            prev = r.optimal;
            n *= 2;
        }
        // Large-n values sit strictly between the asymptotic bounds.
        assert!(prev > 2.0 && prev < std::f64::consts::FRAC_PI_2.exp());
        assert!(prev > 3.5);
    }

    #[test]
    fn acceptance_thresholds_nondecreasing() {
        for n in [2usize, 5, 17, 400] {
            let r = lindley_values(n).unwrap();
            for j in 1..n {
                assert!(r.accept_max_rank[j] >= r.accept_max_rank[j - 1]);
            }
        }
    }

    #[test]
    fn constant_rules_cost_half_n_plus_one() {
        // "Stop at step j" = accept every rank from step j on.
        for n in [2usize, 5, 9, 30] {
            for j in 1..=n {
                let rule = MemorylessRankRule {
                    n,
                    accept_from: vec![j; n],
                };
                let value = evaluate_rank_rule(&rule);
                assert!(
                    (value - (n as f64 + 1.0) / 2.0).abs() < 1e-12,
                    "constant rule j={j} at n={n} gives {value}"
                );
            }
        }
    }

    #[test]
    fn optimal_rule_reproduces_the_dp_value() {
        for n in [1usize, 2, 3, 10, 137, 1000] {
            let dp = lindley_values(n).unwrap();
            let value = evaluate_rank_rule(&dp.optimal_rule());
            assert!((value - dp.optimal).abs() < 1e-12, "mismatch at n={n}");
        }
    }

    #[test]
    fn every_rule_dominates_the_optimum() {
        let n = 40;
        let dp = lindley_values(n).unwrap();
        // A few arbitrary monotone rules.
        let rules = [
            vec![n; n],
            vec![1; n],
            (1..=n).collect::<Vec<_>>(),
            (1..=n).map(|r| (r * 2).min(n)).collect(),
            (1..=n).map(|r| (n / 2 + r).min(n)).collect(),
        ];
        for accept_from in rules {
            let rule = MemorylessRankRule { n, accept_from };
            assert!(evaluate_rank_rule(&rule) >= dp.optimal - 1e-12);
        }
    }

    #[test]
    fn delta_rule_structure() {
        let table = cutoffs(4000, 1e-10).unwrap();
        // delta_1 = 1.353 => rank 1 accepted from step ceil(0.2585 n).
        let rule = delta_rank_rule(1000, &table).unwrap();
        assert_eq!(rule.accept_from[0], (1000.0 * (-table.delta(1)).exp()).ceil() as usize);
        assert!((rule.accept_from[0] as f64 - 258.5).abs() < 2.0);
        for r in 1..rule.accept_from.len() {
            assert!(rule.accept_from[r] >= rule.accept_from[r - 1]);
        }
        // n = 3 accepts rank 1 from the first step.
        let small = delta_rank_rule(3, &table).unwrap();
        assert_eq!(small.accept_from[0], 1);
    }

    #[test]
    fn delta_rule_requires_a_deep_enough_table() {
        let shallow = cutoffs(5, 1e-10).unwrap();
        assert!(matches!(
            delta_rank_rule(1000, &shallow),
            Err(crate::error::Error::ExtendTable(_))
        ));
    }

    #[test]
    fn delta_rule_is_near_optimal_at_ten_thousand() {
        let table = cutoffs(40_000, 1e-10).unwrap();
        let n = 10_000;
        let dp = lindley_values(n).unwrap();
        let rule = delta_rank_rule(n, &table).unwrap();
        let value = evaluate_rank_rule(&rule);
        assert!(value >= dp.optimal - 1e-12);
        assert!(value - dp.optimal < 0.05, "delta rule off by {}", value - dp.optimal);
    }

    #[test]
    fn limit_agrees_with_the_infinite_product_constant() {
        let table = cutoffs(1, 1e-10).unwrap();
        let product_constant = table.delta(1).exp(); // prod (1+2/j)^{1/(j+1)}
        let r = lindley_values(100_000).unwrap().optimal;
        assert!(r < product_constant);
        assert!((product_constant - 3.869).abs() < 1e-3);
    }

    // Independent small-n oracle: enumerate every monotone memoryless rule
    // and price it by exhausting all rank sequences via the Lehmer code.
    fn brute_force_optimum(n: usize) -> f64 {
        fn rule_value(n: usize, accept_from: &[usize]) -> f64 {
            let mut total = 0.0;
            let mut count = 0usize;
            let mut seq = vec![1usize; n];
            loop {
                // Apply the rule to this rank sequence.
                let mut stopped = None;
                for j in 1..=n {
                    let r = seq[j - 1];
                    if j == n || accept_from[r - 1] <= j {
                        stopped = Some((j, r));
                        break;
                    }
                }
                let (j, r) = stopped.unwrap();
                total += r as f64 * (n as f64 + 1.0) / (j as f64 + 1.0);
                count += 1;
                // Next sequence in the mixed-radix Lehmer enumeration.
                let mut pos = n;
                loop {
                    if pos == 0 {
                        return total / count as f64;
                    }
                    if seq[pos - 1] < pos {
                        seq[pos - 1] += 1;
                        break;
                    }
                    seq[pos - 1] = 1;
                    pos -= 1;
                }
            }
        }

        // Enumerate nondecreasing accept_from vectors over {1..n+1}^n.
        fn recurse(n: usize, prefix: &mut Vec<usize>, best: &mut f64) {
            if prefix.len() == n {
                *best = best.min(rule_value(n, prefix));
                return;
            }
            let lo = prefix.last().copied().unwrap_or(1);
            for step in lo..=n + 1 {
                prefix.push(step);
                recurse(n, prefix, best);
                prefix.pop();
            }
        }

        let mut best = f64::INFINITY;
        recurse(n, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn brute_force_oracle_matches_the_dp_for_small_n() {
        for n in 1..=5usize {
            let brute = brute_force_optimum(n);
            let dp = lindley_values(n).unwrap().optimal;
            assert!((brute - dp).abs() < 1e-12, "n={n}: brute={brute} dp={dp}");
        }
    }

    proptest! {
        #[test]
        fn monotone_rules_never_beat_the_dp(
            n in 2usize..25,
            raw in proptest::collection::vec(1usize..30, 25),
        ) {
            let mut accept_from: Vec<usize> =
                raw.iter().take(n).map(|&s| s.min(n + 1)).collect();
            accept_from.sort_unstable();
            let rule = MemorylessRankRule { n, accept_from };
            let dp = lindley_values(n).unwrap().optimal;
            prop_assert!(evaluate_rank_rule(&rule) >= dp - 1e-12);
        }
    }
}
