//! Seeded Monte Carlo engine.
//!
//! Every sampler draws from a stream derived from `(master seed, operation
//! label, sample index)`, so estimates are a pure function of the seed and
//! parameters, independent of thread count and scheduling.  Aggregation
//! sums fixed-size batches sequentially and folds the batch results in
//! index order, so results are bit-identical across worker counts.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::discrete::FiniteCutoffRule;
use crate::error::{Error, Result};
use crate::limit::{cutoffs, stopped_value_cdf, CutoffTable};
use crate::lindley::MemorylessRankRule;
use crate::moser::ValueSequence;

const BATCH: u64 = 4096;

/// Monte Carlo estimate with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimate {
    pub label: String,
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Point of a planar configuration: time and value coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub t: f64,
    pub x: f64,
}

/// Outcome of one cutoff-rule stopping experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffStopOutcome {
    pub stop_time: f64,
    /// Box index `k`, i.e. the floor of the accepted value.
    pub box_index: usize,
    /// `k` for the plain loss, `(k+1) e^{T - stop_time}` when penalised.
    pub loss: f64,
}

/// Derives the RNG stream for sample `i` of the operation `label`.
pub fn stream(seed: u64, label: &str, i: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    hasher.update(i.to_le_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Standard exponential by inversion; the argument is in `[0, 1)`.
fn exp_sample(rng: &mut ChaCha8Rng) -> f64 {
    -(-rng.gen::<f64>()).ln_1p()
}

/// Runs `f` over sample indices `0..reps` and aggregates mean and standard
/// error with a fixed reduction order.
pub fn estimate(
    seed: u64,
    label: &str,
    reps: u64,
    f: impl Fn(u64) -> f64 + Sync,
) -> SimEstimate {
    assert!(reps >= 2, "standard error needs at least two samples");
    let n_batches = reps.div_ceil(BATCH);
    let partials: Vec<(f64, f64)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * BATCH;
            let hi = ((b + 1) * BATCH).min(reps);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for i in lo..hi {
                let x = f(i);
                sum += x;
                sumsq += x * x;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = partials
        .iter()
        .fold((0.0, 0.0), |(s, q), &(bs, bq)| (s + bs, q + bq));
    let n = reps as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
    SimEstimate {
        label: label.to_string(),
        mean,
        stderr: (var / n).sqrt(),
        n_samples: reps,
        seed,
    }
}

/// One beta-strategy experiment: the stopping time is drawn by inversion of
/// the survival function `(1 - t/T)^b`, and the accepted value uniformly on
/// `[0, b/(T - t)]`.
pub fn sample_threshold_stop(b: f64, t_horizon: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    debug_assert!(b > 1.0 && t_horizon > 0.0);
    let stop = t_horizon * (1.0 - rng.gen::<f64>().powf(1.0 / b));
    let value = rng.gen::<f64>() * b / (t_horizon - stop);
    (stop, value)
}

/// Mean accepted value of the beta strategy.
pub fn simulate_beta_value(b: f64, t_horizon: f64, reps: u64, seed: u64) -> Result<SimEstimate> {
    check_beta(b, t_horizon)?;
    Ok(estimate(seed, "beta-value", reps, |i| {
        let mut rng = stream(seed, "beta-value", i);
        sample_threshold_stop(b, t_horizon, &mut rng).1
    }))
}

/// Mean stopping time of the beta strategy.
pub fn simulate_beta_stop_time(
    b: f64,
    t_horizon: f64,
    reps: u64,
    seed: u64,
) -> Result<SimEstimate> {
    check_beta(b, t_horizon)?;
    Ok(estimate(seed, "beta-stop-time", reps, |i| {
        let mut rng = stream(seed, "beta-stop-time", i);
        sample_threshold_stop(b, t_horizon, &mut rng).0
    }))
}

/// Mean squared deviation of the stopping time from its analytic mean
/// `T/(b+1)`; estimates the stop-time variance as a plain sample mean.
pub fn simulate_beta_stop_time_sqdev(
    b: f64,
    t_horizon: f64,
    reps: u64,
    seed: u64,
) -> Result<SimEstimate> {
    check_beta(b, t_horizon)?;
    let center = t_horizon / (b + 1.0);
    Ok(estimate(seed, "beta-stop-time-sqdev", reps, |i| {
        let mut rng = stream(seed, "beta-stop-time-sqdev", i);
        let d = sample_threshold_stop(b, t_horizon, &mut rng).0 - center;
        d * d
    }))
}

fn check_beta(b: f64, t_horizon: f64) -> Result<()> {
    if !(b > 1.0) {
        return Err(Error::Domain(format!("beta simulation requires b > 1, got {b}")));
    }
    if !(t_horizon > 0.0) {
        return Err(Error::Domain(format!(
            "beta simulation requires T > 0, got {t_horizon}"
        )));
    }
    Ok(())
}

/// One cutoff-rule stopping experiment on the box decomposition.
///
/// Box `k` activates at `(T - delta_k)_+` (box 0 immediately); by
/// memorylessness its first arrival after activation is the activation time
/// plus a standard exponential.  Boxes are scanned in increasing order and
/// the scan stops once the next activation time is past the best candidate,
/// which is exact because activations increase towards `T`.  The penalised
/// variant suppresses voluntary stops before `(T - delta_1)_+` and charges
/// `(k+1) e^{T - stop}` for a stop in box `k`.
pub fn sample_cutoff_stop(
    table: &CutoffTable,
    t_horizon: f64,
    penalised: bool,
    rng: &mut ChaCha8Rng,
) -> Result<CutoffStopOutcome> {
    debug_assert!(t_horizon > 0.0);
    let mut best_time = f64::INFINITY;
    let mut best_box = 0usize;
    for k in 0usize.. {
        // Cutoff index for box k: delta_k plain (delta_0 = infinity),
        // delta_{k+1} for the rank-penalised rule.
        let cutoff_index = if penalised { k + 1 } else { k };
        let activation = if cutoff_index == 0 {
            0.0
        } else {
            if cutoff_index > table.k_max() {
                return Err(Error::ExtendTable(format!(
                    "box scan at T={t_horizon} ran past k_max={}",
                    table.k_max()
                )));
            }
            (t_horizon - table.delta(cutoff_index)).max(0.0)
        };
        if activation >= best_time {
            break;
        }
        let candidate = activation + exp_sample(rng);
        if candidate < best_time {
            best_time = candidate;
            best_box = k;
        }
    }
    debug_assert!(best_time < t_horizon);
    let loss = if penalised {
        (best_box as f64 + 1.0) * (t_horizon - best_time).exp()
    } else {
        best_box as f64
    };
    Ok(CutoffStopOutcome {
        stop_time: best_time,
        box_index: best_box,
        loss,
    })
}

/// Mean loss of the cutoff rule, extending the table adaptively on the rare
/// samples that outrun it (the re-run is deterministic, so outcomes do not
/// depend on the initial depth).
pub fn simulate_cutoff(
    table: &CutoffTable,
    t_horizon: f64,
    penalised: bool,
    reps: u64,
    seed: u64,
) -> Result<SimEstimate> {
    if !(t_horizon > 0.0) {
        return Err(Error::Domain(format!(
            "cutoff simulation requires T > 0, got {t_horizon}"
        )));
    }
    let label = if penalised { "cutoff-penalised" } else { "cutoff-plain" };
    Ok(estimate(seed, label, reps, |i| {
        let mut local: Option<CutoffTable> = None;
        loop {
            let current = local.as_ref().unwrap_or(table);
            let mut rng = stream(seed, label, i);
            match sample_cutoff_stop(current, t_horizon, penalised, &mut rng) {
                Ok(outcome) => return outcome.loss,
                Err(_) => {
                    let deeper = current.k_max() * 2;
                    local = Some(cutoffs(deeper, table.tol()).expect("extend cutoff table"));
                }
            }
        }
    }))
}

/// Mean loss of a finite cutoff rule on rounded-down uniform draws.
pub fn simulate_moser_discrete(
    rule: &FiniteCutoffRule,
    reps: u64,
    seed: u64,
) -> SimEstimate {
    let n = rule.n;
    let support = rule.support as f64;
    estimate(seed, "moser-discrete", reps, |i| {
        let mut rng = stream(seed, "moser-discrete", i);
        for j in 1..=n {
            let k = ((support * rng.gen::<f64>()) as usize).min(rule.support - 1);
            if rule.accepts(j, k) {
                return k as f64;
            }
        }
        unreachable!("last step accepts everything")
    })
}

/// Mean penalised rank loss of a memoryless rank rule, sampling the relative
/// ranks `Y_j = floor(j U_j) + 1` independently.
pub fn simulate_lindley(rule: &MemorylessRankRule, reps: u64, seed: u64) -> SimEstimate {
    let n = rule.n;
    let nf = n as f64;
    estimate(seed, "lindley", reps, |i| {
        let mut rng = stream(seed, "lindley", i);
        for j in 1..=n {
            let y = ((j as f64 * rng.gen::<f64>()) as usize + 1).min(j);
            if j == n || rule.accept_from[y - 1] <= j {
                return y as f64 * (nf + 1.0) / (j as f64 + 1.0);
            }
        }
        unreachable!("forced stop at step n")
    })
}

/// Samples the rate-`1/t` inhomogeneous process on the window
/// `(t_lo, t_hi] x [0, x_max]`: a Poisson number of atoms with mean
/// `x_max log(t_hi/t_lo)`, times with density proportional to `1/t`,
/// values uniform.
pub fn sample_inhomogeneous_strip(
    t_lo: f64,
    t_hi: f64,
    x_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Atom>> {
    if !(t_lo > 0.0) {
        return Err(Error::Domain(
            "strip sampler requires t_lo > 0 (infinite intensity at 0)".into(),
        ));
    }
    if !(t_lo < t_hi) || !(x_max > 0.0) {
        return Err(Error::Domain(
            "strip sampler requires t_lo < t_hi and x_max > 0".into(),
        ));
    }
    let mean = x_max * (t_hi / t_lo).ln();
    let count = poisson_sample(mean, rng);
    let ratio = t_hi / t_lo;
    Ok((0..count)
        .map(|_| Atom {
            t: t_lo * ratio.powf(rng.gen::<f64>()),
            x: x_max * rng.gen::<f64>(),
        })
        .collect())
}

/// Knuth's product method; fine for the small means used here.
fn poisson_sample(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    let threshold = (-mean).exp();
    let mut count = 0usize;
    let mut product = rng.gen::<f64>();
    while product > threshold {
        count += 1;
        product *= rng.gen::<f64>();
    }
    count
}

/// One row of the distributional convergence check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsRow {
    pub n: usize,
    pub ks_time: f64,
    pub ks_value: f64,
    pub mean_scaled_value: f64,
}

/// Kolmogorov-Smirnov distance between sorted samples and a CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Distributional convergence of the scaled discrete stopping pair
/// `(T sigma/n, n U_sigma / T)` towards the beta(1,2) stopping-time law and
/// the uniform-Pareto value law, measured per horizon in `n_grid`.
pub fn ks_convergence_check(
    n_grid: &[usize],
    t_horizon: f64,
    thresholds: &ValueSequence,
    reps: u64,
    seed: u64,
) -> Result<Vec<KsRow>> {
    if !(t_horizon > 0.0) {
        return Err(Error::Domain(format!(
            "ks check requires T > 0, got {t_horizon}"
        )));
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        if n > thresholds.horizon_max() {
            return Err(Error::Domain(format!(
                "threshold sequence only covers horizons up to {}",
                thresholds.horizon_max()
            )));
        }
        let label = format!("ks-n{n}");
        let n_batches = reps.div_ceil(BATCH);
        let batches: Vec<Vec<(f64, f64)>> = (0..n_batches)
            .into_par_iter()
            .map(|b| {
                let lo = b * BATCH;
                let hi = ((b + 1) * BATCH).min(reps);
                (lo..hi)
                    .map(|i| {
                        let mut rng = stream(seed, &label, i);
                        for j in 1..=n {
                            let u = rng.gen::<f64>();
                            let accept = j == n || u <= thresholds.value(n - j);
                            if accept {
                                let scaled_time = t_horizon * j as f64 / n as f64;
                                let scaled_value = n as f64 * u / t_horizon;
                                return (scaled_time, scaled_value);
                            }
                        }
                        unreachable!("forced stop at step n")
                    })
                    .collect()
            })
            .collect();
        let mut times = Vec::with_capacity(reps as usize);
        let mut values = Vec::with_capacity(reps as usize);
        for batch in batches {
            for (t, x) in batch {
                times.push(t);
                values.push(x);
            }
        }
        let mean_scaled_value = values.iter().sum::<f64>() / reps as f64;
        times.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        // Limit laws: stopping time beta(1,2) scaled by T, value law given
        // by the uniform-Pareto mixture scaled by 1/T.
        let ks_time = ks_distance(&times, |s| {
            let z = (s / t_horizon).clamp(0.0, 1.0);
            1.0 - (1.0 - z) * (1.0 - z)
        });
        let ks_value = ks_distance(&values, |x| {
            stopped_value_cdf(2.0, (t_horizon * x).max(0.0)).unwrap()
        });
        rows.push(KsRow {
            n,
            ks_time,
            ks_value,
            mean_scaled_value,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{discrete_values, finite_cutoff_rule};
    use crate::limit::{beta_mean, beta_stop_time_moments, u};
    use crate::lindley::{delta_rank_rule, evaluate_rank_rule, lindley_values};
    use crate::moser::moser_values;

    const REPS: u64 = 200_000;

    fn within_sigmas(est: &SimEstimate, target: f64, sigmas: f64) -> bool {
        (est.mean - target).abs() <= sigmas * est.stderr
    }

    #[test]
    fn streams_are_label_and_index_separated() {
        let a: f64 = stream(0, "x", 0).gen();
        let b: f64 = stream(0, "x", 1).gen();
        let c: f64 = stream(0, "y", 0).gen();
        let d: f64 = stream(1, "x", 0).gen();
        assert!(a != b && a != c && a != d);
        let a2: f64 = stream(0, "x", 0).gen();
        assert_eq!(a.to_bits(), a2.to_bits());
    }

    #[test]
    fn estimate_is_deterministic_and_thread_count_independent() {
        let f = |i: u64| {
            let mut rng = stream(7, "det", i);
            rng.gen::<f64>()
        };
        let one = estimate(7, "det", 50_000, f);
        let two = estimate(7, "det", 50_000, f);
        assert_eq!(one.mean.to_bits(), two.mean.to_bits());
        assert_eq!(one.stderr.to_bits(), two.stderr.to_bits());
        // Single-threaded pool must reproduce the default-pool result.
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| estimate(7, "det", 50_000, f));
        assert_eq!(one.mean.to_bits(), serial.mean.to_bits());
        assert_eq!(one.stderr.to_bits(), serial.stderr.to_bits());
    }

    #[test]
    fn beta_simulation_matches_the_analytic_laws() {
        let b = 2.0;
        let value = simulate_beta_value(b, 1.0, REPS, 0).unwrap();
        assert!(within_sigmas(&value, beta_mean(b).unwrap(), 4.0));

        let (mean_t, var_t) = beta_stop_time_moments(b).unwrap();
        let time = simulate_beta_stop_time(b, 1.0, REPS, 0).unwrap();
        assert!(within_sigmas(&time, mean_t, 4.0));
        let sqdev = simulate_beta_stop_time_sqdev(b, 1.0, REPS, 0).unwrap();
        assert!(within_sigmas(&sqdev, var_t, 4.0));

        // Scaling: at horizon T the mean value is b^2/(2(b-1)T).
        let scaled = simulate_beta_value(b, 2.0, REPS, 0).unwrap();
        assert!(within_sigmas(&scaled, beta_mean(b).unwrap() / 2.0, 4.0));

        assert!(simulate_beta_value(1.0, 1.0, REPS, 0).is_err());
        assert!(simulate_beta_value(2.0, 0.0, REPS, 0).is_err());
    }

    #[test]
    fn stopped_value_density_has_the_uniform_and_pareto_shape() {
        // Binned chi-square against the analytic CDF at the 1% level.
        let b = 2.0;
        let reps = 400_000u64;
        let edges: Vec<f64> = (0..=10)
            .map(|i| i as f64 * 0.2)
            .chain([2.5, 3.0, 4.0, 6.0, 10.0, f64::INFINITY])
            .collect();
        let mut observed = vec![0u64; edges.len() - 1];
        for i in 0..reps {
            let mut rng = stream(3, "density-chi2", i);
            let (_, x) = sample_threshold_stop(b, 1.0, &mut rng);
            let bin = (edges.partition_point(|&e| e <= x) - 1).min(observed.len() - 1);
            observed[bin] += 1;
        }
        let mut stat = 0.0;
        for (i, &o) in observed.iter().enumerate() {
            let p = stopped_value_cdf(b, edges[i + 1].min(1e12)).unwrap()
                - stopped_value_cdf(b, edges[i]).unwrap();
            let e = reps as f64 * p;
            stat += (o as f64 - e) * (o as f64 - e) / e;
        }
        // 16 bins => 15 degrees of freedom; 1% critical value 30.578.
        assert!(stat < 30.578, "chi-square statistic {stat}");
    }

    #[test]
    fn cutoff_simulation_matches_u_and_the_rank_constant() {
        let table = cutoffs(1000, 1e-10).unwrap();
        let plain = simulate_cutoff(&table, 1.0, false, REPS, 0).unwrap();
        assert!(within_sigmas(&plain, u(1.0, &table).unwrap(), 4.0));

        let penalised = simulate_cutoff(&table, 2.0, true, REPS, 0).unwrap();
        assert!(within_sigmas(&penalised, table.delta(1).exp(), 4.0));

        // Small horizon: mean loss in (2/T - 1, 2/T).
        let small = simulate_cutoff(&table, 0.1, false, REPS, 0).unwrap();
        assert!(small.mean > 19.0 - 4.0 * small.stderr);
        assert!(small.mean < 20.0 + 4.0 * small.stderr);
    }

    #[test]
    fn cutoff_outcomes_respect_activation_times() {
        let table = cutoffs(1000, 1e-10).unwrap();
        for i in 0..2_000u64 {
            let mut rng = stream(11, "activation", i);
            let out = sample_cutoff_stop(&table, 1.5, false, &mut rng).unwrap();
            let activation = if out.box_index == 0 {
                0.0
            } else {
                (1.5 - table.delta(out.box_index)).max(0.0)
            };
            assert!(out.stop_time >= activation - 1e-12);
            assert!(out.stop_time < 1.5);
            assert_eq!(out.loss, out.box_index as f64);
        }
    }

    #[test]
    fn deeper_tables_leave_outcomes_unchanged() {
        let shallow = cutoffs(50, 1e-10).unwrap();
        let deep = cutoffs(800, 1e-10).unwrap();
        for i in 0..5_000u64 {
            for penalised in [false, true] {
                let mut r1 = stream(5, "depth", i);
                let mut r2 = stream(5, "depth", i);
                let a = sample_cutoff_stop(&shallow, 1.0, penalised, &mut r1);
                let b = sample_cutoff_stop(&deep, 1.0, penalised, &mut r2).unwrap();
                if let Ok(a) = a {
                    assert_eq!(a, b, "outcome changed with depth at i={i}");
                }
            }
        }
    }

    #[test]
    fn discrete_simulation_recovers_the_dp_value() {
        for (n, support) in [(2usize, 2usize), (10, 10)] {
            let rule = finite_cutoff_rule(n, support).unwrap();
            let est = simulate_moser_discrete(&rule, REPS, 0);
            let dp = discrete_values(n, support).unwrap().value(n);
            assert!(within_sigmas(&est, dp, 4.0), "(n,N)=({n},{support})");
        }
        // Unit support: the loss is identically zero.
        let trivial = finite_cutoff_rule(5, 1).unwrap();
        let est = simulate_moser_discrete(&trivial, 1_000, 0);
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn prophet_dominance() {
        let table = cutoffs(1000, 1e-10).unwrap();
        for t_horizon in [0.5, 1.0, 2.0] {
            let est = simulate_cutoff(&table, t_horizon, false, REPS, 0).unwrap();
            let prophet = 1.0 / t_horizon.exp_m1();
            assert!(est.mean >= prophet - 4.0 * est.stderr);
        }
    }

    #[test]
    fn lindley_simulation_matches_exact_evaluation() {
        // Any rule at n=2 costs 1.5.
        let any = MemorylessRankRule { n: 2, accept_from: vec![1, 2] };
        let est = simulate_lindley(&any, REPS, 0);
        assert!(within_sigmas(&est, 1.5, 4.0));

        let n = 1000;
        let dp = lindley_values(n).unwrap();
        let opt = dp.optimal_rule();
        let est = simulate_lindley(&opt, REPS, 0);
        assert!(within_sigmas(&est, dp.optimal, 4.0));

        let table = cutoffs(4 * n, 1e-10).unwrap();
        let delta = delta_rank_rule(n, &table).unwrap();
        let est = simulate_lindley(&delta, REPS, 0);
        assert!(within_sigmas(&est, evaluate_rank_rule(&delta), 4.0));
    }

    #[test]
    fn strip_sampler_counts_and_mapping() {
        // Window (1/e, 1), x_max = 1: expected count is 1.
        let runs = 100_000u64;
        let mut total = 0usize;
        for i in 0..runs {
            let mut rng = stream(21, "strip-count", i);
            total += sample_inhomogeneous_strip((-1.0f64).exp(), 1.0, 1.0, &mut rng)
                .unwrap()
                .len();
        }
        let mean = total as f64 / runs as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean count {mean}");

        // Mapped atoms (t, x/t) should be homogeneous unit rate: the count
        // in the rectangle (0.5,1) x (0,2) of area 1 is Poisson(1).
        let mut hist = [0u64; 5];
        let mut mapped_total = 0f64;
        for i in 0..runs {
            let mut rng = stream(22, "strip-map", i);
            let atoms = sample_inhomogeneous_strip(0.5, 1.0, 2.0, &mut rng).unwrap();
            let count = atoms.iter().filter(|a| a.x / a.t < 2.0).count();
            hist[count.min(4)] += 1;
            mapped_total += count as f64;
        }
        assert!((mapped_total / runs as f64 - 1.0).abs() < 0.02);
        // Chi-square against Poisson(1) over {0,1,2,3,>=4}; 1% critical
        // value at 4 degrees of freedom is 13.277.
        let e = std::f64::consts::E;
        let probs = [1.0 / e, 1.0 / e, 0.5 / e, 1.0 / (6.0 * e)];
        let mut stat = 0.0;
        let mut tail = 1.0;
        for (i, &p) in probs.iter().enumerate() {
            let expected = runs as f64 * p;
            stat += (hist[i] as f64 - expected).powi(2) / expected;
            tail -= p;
        }
        let expected = runs as f64 * tail;
        stat += (hist[4] as f64 - expected).powi(2) / expected;
        assert!(stat < 13.277, "chi-square statistic {stat}");

        let mut rng = stream(23, "strip-bad", 0);
        assert!(sample_inhomogeneous_strip(0.0, 1.0, 1.0, &mut rng).is_err());
        // Expected count for window (0.5, 1), x_max = 2 is 2 log 2.
        let mut total = 0usize;
        for i in 0..20_000u64 {
            let mut rng = stream(24, "strip-log2", i);
            total += sample_inhomogeneous_strip(0.5, 1.0, 2.0, &mut rng).unwrap().len();
        }
        let mean = total as f64 / 20_000.0;
        assert!((mean - 2.0 * 2.0f64.ln()).abs() < 0.05);
    }

    #[test]
    fn ks_distances_shrink_with_n() {
        let thresholds = moser_values(1_000).unwrap();
        let rows =
            ks_convergence_check(&[30, 100, 1_000], 1.0, &thresholds, 20_000, 0).unwrap();
        assert!(rows[0].ks_time > rows[1].ks_time && rows[1].ks_time > rows[2].ks_time);
        assert!(rows[0].ks_value > rows[2].ks_value);
        assert!((rows[2].mean_scaled_value - 2.0).abs() < 0.15);
    }
}
