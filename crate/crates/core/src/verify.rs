//! Cross-validation suite: every numerical claim the library is built
//! around, checked end to end and reported as one pass/fail line each.

use crate::discrete::{discrete_values, value_matrix};
use crate::error::{Error, Result};
use crate::limit::{
    beta_mean, cutoffs, prophet_crossing, rank_cutoff_time, u, w, CutoffTable, h, v,
};
use crate::lindley::{delta_rank_rule, evaluate_rank_rule, lindley_values, MemorylessRankRule};
use crate::moser::moser_values;
use crate::report::{format_sig, Check};
use crate::sim::{
    ks_convergence_check, simulate_beta_stop_time, simulate_beta_stop_time_sqdev,
    simulate_beta_value, simulate_cutoff, SimEstimate,
};

/// Reference matrix of stopping values, rows N = 2..10, columns n = 1..10,
/// truncated to two decimals.
const PRINTED_MATRIX: [[f64; 10]; 9] = [
    [0.50, 0.25, 0.12, 0.06, 0.03, 0.01, 0.00, 0.00, 0.00, 0.00],
    [1.00, 0.66, 0.44, 0.29, 0.19, 0.13, 0.08, 0.05, 0.03, 0.02],
    [1.50, 1.00, 0.75, 0.56, 0.42, 0.31, 0.23, 0.17, 0.13, 0.10],
    [2.00, 1.40, 1.04, 0.82, 0.65, 0.52, 0.42, 0.33, 0.27, 0.21],
    [2.50, 1.75, 1.33, 1.05, 0.87, 0.72, 0.60, 0.50, 0.41, 0.34],
    [3.00, 2.14, 1.65, 1.32, 1.08, 0.92, 0.78, 0.67, 0.57, 0.49],
    [3.50, 2.50, 1.93, 1.57, 1.30, 1.10, 0.95, 0.83, 0.73, 0.63],
    [4.00, 2.88, 2.25, 1.83, 1.54, 1.31, 1.13, 0.99, 0.88, 0.78],
    [4.50, 3.25, 2.55, 2.08, 1.75, 1.50, 1.30, 1.14, 1.01, 0.91],
];

/// Diagonal values V_{n,n} for n = 11..17, same precision.
const PRINTED_DIAGONAL: [f64; 7] = [0.94, 0.97, 0.99, 1.01, 1.03, 1.05, 1.07];

/// Reference cutoff values delta_1..delta_11, truncated to three decimals.
/// The k = 6 reference entry reads 0.303, which is inconsistent with the
/// recursion delta_5 - delta_6 = log(7/5)/6; the recursion forces 0.3078...,
/// so 0.307 is used here and the discrepancy is re-derived in the check.
const PRINTED_CUTOFFS: [f64; 11] = [
    1.353, 0.803, 0.572, 0.445, 0.363, 0.307, 0.266, 0.235, 0.210, 0.190, 0.173,
];

const MATRIX_TOL: f64 = 0.011;
const MC_REPS: u64 = 1_000_000;
const KS_REPS: u64 = 100_000;

fn table() -> CutoffTable {
    cutoffs(1_000, 1e-10).unwrap()
}

fn sig(x: f64) -> String {
    format_sig(x, 12)
}

fn within_sigmas(est: &SimEstimate, target: f64) -> bool {
    (est.mean - target).abs() <= 4.0 * est.stderr
}

fn check_moser_limit() -> Check {
    let seq = moser_values(10_000).unwrap();
    let products: Vec<f64> = [10usize, 100, 1_000, 10_000]
        .iter()
        .map(|&n| n as f64 * seq.value(n))
        .collect();
    let monotone = products.windows(2).all(|p| p[1] > p[0]);
    let last = products[3];
    Check::new(
        "c01-moser-limit",
        monotone && (1.99..=2.0).contains(&last),
        format!(
            "n*V_n = {} at n=10^4, sequence {}",
            sig(last),
            if monotone { "increasing" } else { "not increasing" }
        ),
        "n*V_n in [1.99, 2.0] and increasing along n in {10,10^2,10^3,10^4}",
    )
}

fn check_matrix() -> Check {
    let matrix = value_matrix(2..=10, 1..=10).unwrap();
    let mut worst = 0.0f64;
    for (i, row) in PRINTED_MATRIX.iter().enumerate() {
        for (j, &printed) in row.iter().enumerate() {
            worst = worst.max((matrix[i][j] - printed).abs());
        }
    }
    let mut worst_diag = 0.0f64;
    for (i, &printed) in PRINTED_DIAGONAL.iter().enumerate() {
        let n = 11 + i;
        let value = discrete_values(n, n).unwrap().value(n);
        worst_diag = worst_diag.max((value - printed).abs());
    }
    Check::new(
        "c02-discrete-matrix",
        worst <= MATRIX_TOL && worst_diag <= MATRIX_TOL,
        format!(
            "max deviation {} over 90 entries, {} over the diagonal",
            sig(worst),
            sig(worst_diag)
        ),
        "all printed values reproduced within 0.011",
    )
}

fn check_cutoffs() -> Check {
    let coarse = cutoffs(11, 1e-6).unwrap();
    // Truncated references: the true value lies in [printed, printed + 1e-3).
    let mut worst = 0.0f64;
    let mut printed_ok = true;
    for (i, &printed) in PRINTED_CUTOFFS.iter().enumerate() {
        let gap = coarse.delta(i + 1) - printed;
        printed_ok &= gap >= -1e-5 && gap < 1e-3 + 1e-5;
        worst = worst.max(gap.abs());
    }
    // Independent confirmation of the k = 6 entry via the recursion step.
    printed_ok &=
        (coarse.delta(5) - coarse.delta(6) - (1.4f64).ln() / 6.0).abs() < 1e-5;

    let fine = table();
    let mut bounds_ok = true;
    for k in 1..=1_000usize {
        let kd = k as f64 * fine.delta(k);
        bounds_ok &= kd < 2.0 && kd > 2.0 - 2.0 / (k as f64 + 1.0);
    }
    let mut worst_residual = 0.0f64;
    for k in 1..fine.k_max() {
        let step = (1.0 + 2.0 / k as f64).ln() / (k as f64 + 1.0);
        worst_residual = worst_residual.max(((fine.delta(k) - fine.delta(k + 1)) - step).abs());
    }
    Check::new(
        "c03-cutoffs",
        printed_ok && bounds_ok && worst_residual < 1e-9,
        format!(
            "max table deviation {}, k*delta_k bounds {}, recursion residual {}",
            sig(worst),
            if bounds_ok { "hold" } else { "violated" },
            sig(worst_residual)
        ),
        "11 three-decimal reference cutoffs reproduced up to truncation (k=6 entry fixed to 0.307 by the recursion); k*delta_k in (2-2/(k+1), 2) for k<=1000; recursion residual < 1e-9",
    )
}

fn check_limit_values() -> Check {
    let t = table();
    let u1 = u(1.0, &t).unwrap();
    let rank_constant = t.delta(1).exp();
    let upper = std::f64::consts::FRAC_PI_2.exp();
    let t0 = rank_cutoff_time();
    let pass = (u1 - 1.513).abs() <= 1e-3
        && (rank_constant - 3.869).abs() <= 1e-3
        && (upper - 4.8104773).abs() <= 1e-6
        && (t0 - 0.2078796).abs() <= 1e-6;
    Check::new(
        "c04-limit-values",
        pass,
        format!(
            "u(1) = {}, e^delta_1 = {}, e^(pi/2) = {}, t0 = {}",
            sig(u1),
            sig(rank_constant),
            sig(upper),
            sig(t0)
        ),
        "u(1) = 1.513 +- 0.001, e^delta_1 = 3.869 +- 0.001, e^(pi/2) = 4.8104773, t0 = 0.2078796",
    )
}

fn check_ode_residuals() -> Check {
    let t = table();
    let eps = 1e-6;
    let near_cutoff =
        |x: f64| (1..=40).any(|k| (t.delta(k) - x).abs() < 1e-3);

    let mut worst_u = 0.0f64;
    let mut big_t = 0.11;
    while big_t < 3.0 {
        if !near_cutoff(big_t) {
            let fd = (u(big_t + eps, &t).unwrap() - u(big_t - eps, &t).unwrap()) / (2.0 * eps);
            let uv = u(big_t, &t).unwrap();
            let rhs: f64 = -(0..=(uv.floor() as usize)).map(|j| uv - j as f64).sum::<f64>();
            worst_u = worst_u.max((fd - rhs).abs());
        }
        big_t += 0.0173;
    }

    let mut worst_h = 0.0f64;
    let mut tt = rank_cutoff_time() + 0.01;
    while tt < 0.99 {
        let fd = (h(tt + eps).unwrap() - h(tt - eps).unwrap()) / (2.0 * eps);
        let hv = h(tt).unwrap();
        let rhs = hv * hv / 2.0 + 1.0 / (2.0 * tt * tt) - hv / tt;
        worst_h = worst_h.max((fd - rhs).abs() / rhs.abs().max(1.0));
        tt += 0.0137;
    }

    let mut worst_w = 0.0f64;
    let mut big_t = 0.11;
    while big_t < 2.0 {
        if !near_cutoff(big_t) {
            let fd = (w(big_t + eps, &t).unwrap() - w(big_t - eps, &t).unwrap()) / (2.0 * eps);
            let wv = w(big_t, &t).unwrap();
            let et = big_t.exp();
            let mut rhs = 0.0;
            let mut j = 1.0;
            while wv - et * j > 0.0 {
                rhs -= wv - et * j;
                j += 1.0;
            }
            worst_w = worst_w.max((fd - rhs).abs() / rhs.abs().max(1.0));
        }
        big_t += 0.0173;
    }

    let mut worst_fit = 0.0f64;
    for k in 1..=5usize {
        let d = t.delta(k);
        let right = (u(d + eps, &t).unwrap() - u(d, &t).unwrap()) / eps;
        let left = (u(d, &t).unwrap() - u(d - eps, &t).unwrap()) / eps;
        worst_fit = worst_fit.max((right - left).abs());
    }

    Check::new(
        "c05-ode-residuals",
        worst_u < 1e-4 && worst_h < 1e-4 && worst_w < 1e-4 && worst_fit < 1e-3,
        format!(
            "residuals u {}, h {}, w {}; smooth-fit gap {}",
            sig(worst_u),
            sig(worst_h),
            sig(worst_w),
            sig(worst_fit)
        ),
        "finite-difference residuals < 1e-4 off the cutoffs; smooth fit at delta_1..5 within 1e-3",
    )
}

fn check_beta(seed: u64) -> Check {
    // Grid search for the minimiser of b^2/(2(b-1)).
    let mut best_b = 0.0;
    let mut best = f64::INFINITY;
    let mut i = 0usize;
    loop {
        let b = 1.1 + 0.001 * i as f64;
        if b > 5.0 {
            break;
        }
        let m = beta_mean(b).unwrap();
        if m < best {
            best = m;
            best_b = b;
        }
        i += 1;
    }
    let grid_ok = (best_b - 2.0).abs() <= 0.001 + 1e-12;

    let value = simulate_beta_value(2.0, 1.0, MC_REPS, seed).unwrap();
    let time = simulate_beta_stop_time(2.0, 1.0, MC_REPS, seed).unwrap();
    let sqdev = simulate_beta_stop_time_sqdev(2.0, 1.0, MC_REPS, seed).unwrap();
    let mc_ok = within_sigmas(&value, 2.0)
        && within_sigmas(&time, 1.0 / 3.0)
        && within_sigmas(&sqdev, 1.0 / 18.0);
    Check::new(
        "c06-beta-strategy",
        grid_ok && mc_ok,
        format!(
            "argmin b = {}; MC value {} (se {}), stop time {} (se {}), variance {} (se {})",
            sig(best_b),
            sig(value.mean),
            sig(value.stderr),
            sig(time.mean),
            sig(time.stderr),
            sig(sqdev.mean),
            sig(sqdev.stderr)
        ),
        "argmin = 2.000 +- 0.001; MC matches 2, 1/3, 1/18 within 4 standard errors",
    )
}

fn check_cutoff_simulation(seed: u64) -> Check {
    let t = table();
    let plain = simulate_cutoff(&t, 1.0, false, MC_REPS, seed).unwrap();
    let target_plain = u(1.0, &t).unwrap();
    let penalised = simulate_cutoff(&t, 2.0, true, MC_REPS, seed).unwrap();
    let target_pen = t.delta(1).exp();
    Check::new(
        "c07-cutoff-simulation",
        within_sigmas(&plain, target_plain) && within_sigmas(&penalised, target_pen),
        format!(
            "plain {} (se {}) vs u(1) = {}; penalised {} (se {}) vs {}",
            sig(plain.mean),
            sig(plain.stderr),
            sig(target_plain),
            sig(penalised.mean),
            sig(penalised.stderr),
            sig(target_pen)
        ),
        "T=1 reproduces u(1) and penalised T=2 reproduces 3.869, each within 4 standard errors",
    )
}

/// Exhaustive minimum over monotone memoryless rules, priced by enumerating
/// every relative-rank sequence; independent of the backward induction.
fn brute_force_rank_optimum(n: usize) -> f64 {
    fn rule_value(n: usize, accept_from: &[usize]) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        let mut seq = vec![1usize; n];
        loop {
            let mut outcome = (n, seq[n - 1]);
            for j in 1..=n {
                let r = seq[j - 1];
                if j == n || accept_from[r - 1] <= j {
                    outcome = (j, r);
                    break;
                }
            }
            total += outcome.1 as f64 * (n as f64 + 1.0) / (outcome.0 as f64 + 1.0);
            count += 1;
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

fn check_lindley() -> Check {
    let exact_ok = (lindley_values(1).unwrap().optimal - 1.0).abs() < 1e-12
        && (lindley_values(2).unwrap().optimal - 1.5).abs() < 1e-12
        && (lindley_values(3).unwrap().optimal - 5.0 / 3.0).abs() < 1e-12;

    let mut monotone = true;
    let mut bounded = true;
    let mut prev = 0.0;
    let mut n = 10usize;
    let mut last = 0.0;
    while n <= 100_000 {
        let r = lindley_values(n).unwrap().optimal;
        monotone &= r > prev;
        bounded &= r < 3.8695;
        prev = r;
        last = r;
        n *= 2;
    }

    let n = 10_000usize;
    let deep = cutoffs(4 * n, 1e-10).unwrap();
    let dp = lindley_values(n).unwrap();
    let delta_value = evaluate_rank_rule(&delta_rank_rule(n, &deep).unwrap());
    let delta_gap = delta_value - dp.optimal;
    let delta_ok = delta_gap >= -1e-12 && delta_gap <= 0.05;

    let mut brute_worst = 0.0f64;
    for m in 1..=5usize {
        let brute = brute_force_rank_optimum(m);
        brute_worst = brute_worst.max((brute - lindley_values(m).unwrap().optimal).abs());
    }

    // Constant rules cost (n+1)/2 regardless of the stopping step.
    let constant = MemorylessRankRule {
        n: 30,
        accept_from: vec![17; 30],
    };
    let constant_ok = (evaluate_rank_rule(&constant) - 15.5).abs() < 1e-12;

    Check::new(
        "c08-lindley",
        exact_ok && monotone && bounded && delta_ok && brute_worst < 1e-12 && constant_ok,
        format!(
            "R_1..R_3 exact: {exact_ok}; doubling grid increasing to {} and < 3.8695: {}; \
             delta-rule gap {}; brute-force deviation {}",
            sig(last),
            monotone && bounded,
            sig(delta_gap),
            sig(brute_worst)
        ),
        "R_1=1, R_2=1.5, R_3=5/3 to 1e-12; increasing and < 3.8695 up to 10^5; delta rule within 0.05 at n=10^4; brute force agrees to 1e-12",
    )
}

fn check_sandwiches() -> Check {
    let t = table();
    let mut u_ok = true;
    let mut big_t = 0.01;
    while big_t <= 5.0 + 1e-12 {
        let val = u(big_t, &t).unwrap();
        u_ok &= val <= 2.0 / big_t + 1e-9 && val >= (2.0 / big_t - 1.0).max(0.0) - 1e-9;
        big_t += 0.01;
    }
    let mut w_ok = true;
    let mut big_t = 0.02;
    while big_t < 1.55 {
        let val = w(big_t, &t).unwrap();
        w_ok &= 2.0 / (-(-big_t).exp_m1()) < val
            && val < big_t.exp() * ((std::f64::consts::PI - big_t) / 2.0).tan();
        big_t += 0.01;
    }
    let crossing = prophet_crossing(1e-6);
    let crossing_ok = (crossing - 1.594).abs() <= 1e-3;
    // The lower branch of the w sandwich prices the continuous value of the
    // mean-(e^T - 1) remaining draws: 2/(1 - e^{-T}) = e^T v(e^T - 1).
    let big_t = 0.7f64;
    let identity_ok = (big_t.exp() * v(big_t.exp() - 1.0).unwrap()
        - 2.0 / (-(-big_t).exp_m1()))
    .abs()
        < 1e-12;
    Check::new(
        "c09-sandwiches",
        u_ok && w_ok && crossing_ok && identity_ok,
        format!(
            "u sandwich {}, w sandwich {}, prophet crossing at {}",
            if u_ok { "holds" } else { "violated" },
            if w_ok { "holds" } else { "violated" },
            sig(crossing)
        ),
        "(2/T-1)_+ <= u <= 2/T on (0,5]; 2/(1-e^-T) < w < e^T tan((pi-T)/2) on (0.01,1.55); crossing 1.594 +- 0.001",
    )
}

fn check_ks(seed: u64) -> Check {
    let thresholds = moser_values(10_000).unwrap();
    let rows = ks_convergence_check(&[100, 1_000, 10_000], 1.0, &thresholds, KS_REPS, seed)
        .unwrap();
    let time_decreasing = rows.windows(2).all(|r| r[1].ks_time < r[0].ks_time);
    let value_decreasing = rows.windows(2).all(|r| r[1].ks_value < r[0].ks_value);
    let last = rows.last().unwrap();
    let tail_ok = last.ks_time < 0.02 && (last.mean_scaled_value - 2.0).abs() <= 0.05;
    Check::new(
        "c10-limit-law-ks",
        time_decreasing && value_decreasing && tail_ok,
        format!(
            "KS time {} / {} / {}, KS value {} / {} / {}, scaled mean {}",
            sig(rows[0].ks_time),
            sig(rows[1].ks_time),
            sig(rows[2].ks_time),
            sig(rows[0].ks_value),
            sig(rows[1].ks_value),
            sig(rows[2].ks_value),
            sig(last.mean_scaled_value)
        ),
        "KS distances strictly decreasing along n in {10^2,10^3,10^4}; time KS < 0.02 and scaled mean within 0.05 of 2 at n=10^4",
    )
}

/// Runs the requested suite; `all` runs everything, `quick` skips the
/// Monte Carlo checks.
pub fn run_suite(suite: &str, seed: u64) -> Result<Vec<Check>> {
    let names: Vec<&str> = match suite {
        "all" => vec![
            "moser", "matrix", "cutoffs", "limits", "ode", "beta", "cutoff-sim", "lindley",
            "sandwich", "ks",
        ],
        "quick" => vec!["moser", "matrix", "cutoffs", "limits", "ode", "lindley", "sandwich"],
        single => vec![single],
    };
    names
        .into_iter()
        .map(|name| match name {
            "moser" => Ok(check_moser_limit()),
            "matrix" => Ok(check_matrix()),
            "cutoffs" => Ok(check_cutoffs()),
            "limits" => Ok(check_limit_values()),
            "ode" => Ok(check_ode_residuals()),
            "beta" => Ok(check_beta(seed)),
            "cutoff-sim" => Ok(check_cutoff_simulation(seed)),
            "lindley" => Ok(check_lindley()),
            "sandwich" => Ok(check_sandwiches()),
            "ks" => Ok(check_ks(seed)),
            other => Err(Error::Domain(format!("unknown verify suite '{other}'"))),
        })
        .collect()
}
