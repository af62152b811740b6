//! Closed forms for the planar-Poisson limit objects.
//!
//! For the homogeneous unit-rate process on the strip `[0,T] x R_+` the
//! continuous stopping value is `v(T) = 2/T`, attained by the beta strategy
//! with threshold `2/(T-t)`.  For the floor loss the value `u(T)` is
//! piecewise exponential between the cutoffs
//!
//! ```text
//!     delta_k = sum_{j>=k} log(1 + 2/j) / (j+1),
//! ```
//!
//! and the penalised (expected-rank) value is `w(T) = e^T u(T)`, constant
//! `e^{delta_1} = 3.869...` for `T >= delta_1`.  The tangent upper bound
//! `h(t) = (1/t) tan((pi + log t)/2)` applies on `(t_0, 1)` with
//! `t_0 = e^{-pi/2}`.

use crate::error::{Error, Result};

/// Cutoff time below which draw value 0 becomes acceptable in the
/// rank-penalised problem: `e^{-pi/2}`.
pub fn rank_cutoff_time() -> f64 {
    (-std::f64::consts::FRAC_PI_2).exp()
}

/// Strictly decreasing cutoff sequence `delta_1 > delta_2 > ...` with a
/// certified absolute error bound valid for every entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffTable {
    delta: Vec<f64>,
    tail_bound: f64,
    tol: f64,
}

impl CutoffTable {
    pub fn k_max(&self) -> usize {
        self.delta.len()
    }

    /// `delta_k` for `1 <= k <= k_max`.
    pub fn delta(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.delta.len(), "k out of range");
        self.delta[k - 1]
    }

    pub fn deltas(&self) -> &[f64] {
        &self.delta
    }

    /// Certified absolute error on every entry.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Tolerance the table was built with; reused when extending.
    pub fn tol(&self) -> f64 {
        self.tol
    }
}

/// Single series term `log(1 + 2/j) / (j+1)`.
fn cutoff_term(j: usize) -> f64 {
    (2.0 / j as f64).ln_1p() / (j as f64 + 1.0)
}

/// Riemann bracket for the series tail `sum_{j>J} log(1+2/j)/(j+1)`.
///
/// The summand g is decreasing, so the tail lies between the integrals of g
/// over `[J+1, inf)` and `[J, inf)`, and `log(1+x) in [x - x^2/2, x]` gives
/// elementary brackets for those integrals:
/// `int_A^inf g in [4 log(1+1/A) - 2/A, 2 log(1+1/A)]`.
fn tail_bracket(j_last: usize) -> (f64, f64) {
    let a_lo = j_last as f64 + 1.0;
    let a_hi = j_last as f64;
    let lower = 4.0 * (1.0 / a_lo).ln_1p() - 2.0 / a_lo;
    let upper = 2.0 * (1.0 / a_hi).ln_1p();
    (lower.max(0.0), upper)
}

/// Cutoff sequence `delta_1..delta_{k_max}`, each entry accurate to `tol`.
///
/// Terms are summed directly up to an adaptively chosen index, then the
/// remaining tail is replaced by the midpoint of its Riemann bracket, so the
/// certified error is half the bracket width.
pub fn cutoffs(k_max: usize, tol: f64) -> Result<CutoffTable> {
    if k_max == 0 {
        return Err(Error::Domain("cutoffs requires k_max >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("cutoffs requires tol > 0".into()));
    }
    if tol < 1e-14 {
        return Err(Error::ToleranceTooTight(tol));
    }

    // Bracket halfwidth shrinks like 1/J^2; double until within tolerance.
    // The starting point is fixed (not k_max) so that tables of different
    // depths built at the same tolerance share bit-identical entries.
    let mut j_last = 64usize;
    loop {
        let (lo, hi) = tail_bracket(j_last);
        // Budget for summation roundoff on top of the truncation bracket.
        if (hi - lo) / 2.0 + j_last as f64 * 1e-17 <= tol {
            break;
        }
        j_last *= 2;
    }
    while j_last < k_max {
        j_last *= 2;
    }

    let (lo, hi) = tail_bracket(j_last);
    let tail_mid = (lo + hi) / 2.0;
    let tail_bound = (hi - lo) / 2.0 + j_last as f64 * 1e-17;

    // Suffix sums from the truncation point down, so a deeper table shares
    // bit-identical entries with a shallower one built at the same tol.
    let mut delta = vec![0.0; k_max];
    let mut acc = tail_mid;
    for j in (1..=j_last).rev() {
        acc += cutoff_term(j);
        if j <= k_max {
            delta[j - 1] = acc;
        }
    }
    Ok(CutoffTable {
        delta,
        tail_bound,
        tol,
    })
}

/// Continuous stopping value `v(T) = 2/T`.
pub fn v(t_horizon: f64) -> Result<f64> {
    if !(t_horizon > 0.0) {
        return Err(Error::Domain(format!("v requires T > 0, got {t_horizon}")));
    }
    Ok(2.0 / t_horizon)
}

/// Expected loss of the beta strategy at unit horizon: `b^2 / (2(b-1))`,
/// minimised at `b = 2` with value 2.
pub fn beta_mean(b: f64) -> Result<f64> {
    if !(b > 1.0) {
        return Err(Error::Domain(format!(
            "beta strategy has infinite expected loss for b <= 1, got {b}"
        )));
    }
    Ok(b * b / (2.0 * (b - 1.0)))
}

/// CDF of the beta-strategy stopping time at unit horizon: `1 - (1-t)^b`.
pub fn beta_stop_time_cdf(b: f64, t: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("beta strategy requires b > 0, got {b}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("stop-time CDF requires t in [0,1], got {t}")));
    }
    Ok(1.0 - (1.0 - t).powf(b))
}

/// Mean `1/(b+1)` and variance `b / ((b+1)^2 (b+2))` of the beta(1,b)
/// stopping time at unit horizon.
pub fn beta_stop_time_moments(b: f64) -> Result<(f64, f64)> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("beta strategy requires b > 0, got {b}")));
    }
    let mean = 1.0 / (b + 1.0);
    let var = b / ((b + 1.0) * (b + 1.0) * (b + 2.0));
    Ok((mean, var))
}

/// Density of the stopped draw value at unit horizon: uniform at `1/(b+1)`
/// on `[0, b]`, Pareto `(1/(b+1)) (b/x)^{b+1}` beyond.
pub fn stopped_value_density(b: f64, x: f64) -> Result<f64> {
    if !(b > 1.0) {
        return Err(Error::Domain(format!(
            "stopped value has no integrable density for b <= 1, got {b}"
        )));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("value density requires x >= 0, got {x}")));
    }
    if x <= b {
        Ok(1.0 / (b + 1.0))
    } else {
        Ok((b / x).powf(b + 1.0) / (b + 1.0))
    }
}

/// CDF of the stopped draw value at unit horizon.
pub fn stopped_value_cdf(b: f64, x: f64) -> Result<f64> {
    if !(b > 1.0) {
        return Err(Error::Domain(format!("stopped value CDF requires b > 1, got {b}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("value CDF requires x >= 0, got {x}")));
    }
    if x <= b {
        Ok(x / (b + 1.0))
    } else {
        Ok(1.0 - (b / x).powf(b) / (b + 1.0))
    }
}

/// Locates the piece `delta_{k+1} <= T <= delta_k` in a cutoff table.
/// Returns `k = 0` for `T >= delta_1`.
fn bracket_cutoffs(t_horizon: f64, table: &CutoffTable) -> Result<usize> {
    if t_horizon >= table.delta(1) {
        return Ok(0);
    }
    let last = table.k_max();
    if t_horizon < table.delta(last) {
        return Err(Error::ExtendTable(format!(
            "u(T) at T={t_horizon} needs cutoffs beyond k_max={last} (delta_{last}={})",
            table.delta(last)
        )));
    }
    // delta is strictly decreasing; find k with delta_{k+1} <= T < delta_k.
    let k = table.deltas().partition_point(|&d| d > t_horizon);
    debug_assert!(k >= 1 && k < table.k_max());
    debug_assert!(table.delta(k + 1) <= t_horizon && t_horizon < table.delta(k));
    Ok(k)
}

/// Limit stopping value `u(T)` for the floor loss, evaluated from the
/// piecewise solution between the cutoffs.
pub fn u(t_horizon: f64, table: &CutoffTable) -> Result<f64> {
    if !(t_horizon > 0.0) {
        return Err(Error::Domain(format!("u requires T > 0, got {t_horizon}")));
    }
    let k = bracket_cutoffs(t_horizon, table)?;
    if k == 0 {
        Ok((table.delta(1) - t_horizon).exp())
    } else {
        let kf = k as f64;
        Ok(kf / 2.0 * (((kf + 1.0) * (table.delta(k) - t_horizon)).exp() + 1.0))
    }
}

/// Penalised stopping value `w(T) = e^T u(T)`, constant `e^{delta_1}` for
/// `T >= delta_1`.
pub fn w(t_horizon: f64, table: &CutoffTable) -> Result<f64> {
    Ok(t_horizon.exp() * u(t_horizon, table)?)
}

/// Upper-bound value function `h(t)` on forward time `(0,1)`:
/// `(1/t) tan((pi + log t)/2)` for `t >= e^{-pi/2}`, constant `e^{pi/2}`
/// before the cutoff.
pub fn h(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("h requires t in (0,1), got {t}")));
    }
    let t0 = rank_cutoff_time();
    if t < t0 {
        Ok(std::f64::consts::FRAC_PI_2.exp())
    } else {
        Ok(((std::f64::consts::PI + t.ln()) / 2.0).tan() / t)
    }
}

/// Prophet benchmark for continuous uniform sampling: `1/T`.
pub fn prophet_continuous(t_horizon: f64) -> Result<f64> {
    if !(t_horizon > 0.0) {
        return Err(Error::Domain(format!(
            "prophet_continuous requires T > 0, got {t_horizon}"
        )));
    }
    Ok(1.0 / t_horizon)
}

/// Prophet benchmark for the floor loss: `1/(e^T - 1)` (geometric least box).
pub fn prophet_discrete(t_horizon: f64) -> Result<f64> {
    if !(t_horizon > 0.0) {
        return Err(Error::Domain(format!(
            "prophet_discrete requires T > 0, got {t_horizon}"
        )));
    }
    Ok(1.0 / t_horizon.exp_m1())
}

/// Horizon where the discrete prophet benchmark starts to improve on the
/// elementary lower bound `2/T - 1`, located by bisection.
pub fn prophet_crossing(tol: f64) -> f64 {
    let gap = |t: f64| 1.0 / t.exp_m1() - (2.0 / t - 1.0);
    let (mut lo, mut hi) = (1.0, 2.0);
    debug_assert!(gap(lo) < 0.0 && gap(hi) > 0.0);
    while hi - lo > tol {
        let mid = (lo + hi) / 2.0;
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Logarithmic time change `T = -log t`.
pub fn time_change(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("time_change requires t in (0,1], got {t}")));
    }
    Ok(-t.ln())
}

/// Inverse time change `t = e^{-T}`.
pub fn inverse_time_change(t_horizon: f64) -> Result<f64> {
    if !(t_horizon >= 0.0) {
        return Err(Error::Domain(format!(
            "inverse_time_change requires T >= 0, got {t_horizon}"
        )));
    }
    Ok((-t_horizon).exp())
}
