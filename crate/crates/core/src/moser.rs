//! Exact finite-horizon solver for Moser's minimisation problem.
//!
//! A decision maker observes up to `n` i.i.d. uniform draws on `[0,1]` and
//! must accept exactly one, online and irrevocably.  The optimal expected
//! loss `V_n` obeys the backward recursion
//!
//! ```text
//!     V_1 = 1/2,    V_n = V_{n-1} - V_{n-1}^2 / 2,
//! ```
//!
//! and the optimal strategy accepts draw `j` iff `U_j <= V_{n-j}`, always
//! accepting at the last step.  The two-sided harmonic bounds
//! `2/(n+H_n+2) <= V_n < 2/(n+H_n+1)` give `n V_n -> 2`.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant to 15 digits.
const EULER_GAMMA: f64 = 0.577_215_664_901_533;

/// Largest n for which the harmonic number is computed by direct summation.
const HARMONIC_DIRECT_MAX: usize = 1_000_000;

/// Finite-horizon stopping values `V_1, ..., V_{horizon_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSequence {
    horizon_max: usize,
    values: Vec<f64>,
}

impl ValueSequence {
    pub fn horizon_max(&self) -> usize {
        self.horizon_max
    }

    /// `V_n` for `1 <= n <= horizon_max`.
    pub fn value(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.horizon_max, "n out of range");
        self.values[n - 1]
    }

    /// All values, entry `i` holding `V_{i+1}`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Harmonic sandwich for `V_n`: `lower <= V_n < upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicBounds {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub harmonic: f64,
}

/// `H_n`, by direct summation up to 10^6 and the asymptotic expansion
/// `log n + gamma + 1/(2n)` beyond.
pub fn harmonic_number(n: usize) -> f64 {
    if n <= HARMONIC_DIRECT_MAX {
        // Sum small terms first to limit rounding.
        (1..=n).rev().map(|k| 1.0 / k as f64).sum()
    } else {
        let x = n as f64;
        x.ln() + EULER_GAMMA + 1.0 / (2.0 * x)
    }
}

/// Stopping values for horizons `1..=n_max` via the backward recursion.
pub fn moser_values(n_max: usize) -> Result<ValueSequence> {
    if n_max == 0 {
        return Err(Error::Domain(
            "n_max = 0: no trial permitted yet one acceptance is mandatory".into(),
        ));
    }
    let mut values = Vec::with_capacity(n_max);
    let mut v = 0.5;
    values.push(v);
    for _ in 2..=n_max {
        v -= v * v / 2.0;
        values.push(v);
    }
    Ok(ValueSequence {
        horizon_max: n_max,
        values,
    })
}

/// Two-sided harmonic bounds `(2/(n+H_n+2), 2/(n+H_n+1))` on `V_n`.
pub fn moser_bounds(n: usize) -> Result<HarmonicBounds> {
    if n == 0 {
        return Err(Error::Domain("moser_bounds requires n >= 1".into()));
    }
    let h = harmonic_number(n);
    let x = n as f64;
    Ok(HarmonicBounds {
        n,
        lower: 2.0 / (x + h + 2.0),
        upper: 2.0 / (x + h + 1.0),
        harmonic: h,
    })
}

/// Threshold strategy for the `n`-trial problem: accept draw `j` iff
/// `U_j <= V_{n-j}`, with forced acceptance at the last step.
#[derive(Debug, Clone, PartialEq)]
pub struct MoserRule {
    horizon: usize,
    // thresholds[j-1] is the acceptance threshold at step j, for j < horizon.
    thresholds: Vec<f64>,
}

impl MoserRule {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Threshold at step `j` (1-based); `None` at the forced final step.
    pub fn threshold(&self, step: usize) -> Option<f64> {
        assert!(step >= 1 && step <= self.horizon, "step out of range");
        if step == self.horizon {
            None
        } else {
            Some(self.thresholds[step - 1])
        }
    }

    /// Whether the rule accepts draw `value` at step `step`.
    pub fn accepts(&self, step: usize, value: f64) -> bool {
        match self.threshold(step) {
            None => true, // V_0 sentinel: always accept at the last step
            Some(t) => value <= t,
        }
    }
}

/// Optimal threshold rule induced by `moser_values(n)`.
pub fn moser_rule(n: usize) -> Result<MoserRule> {
    let seq = moser_values(n)?;
    // Step j compares against V_{n-j}; the last step is the sentinel.
    let thresholds = (1..n).map(|j| seq.value(n - j)).collect();
    Ok(MoserRule {
        horizon: n,
        thresholds,
    })
}
