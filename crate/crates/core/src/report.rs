//! Formatting helpers and the pass/fail record used by `verify`.

use serde::Serialize;

/// Formats `x` with the given number of significant digits, plain decimal.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: String,
    pub expected: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, measured: String, expected: &str) -> Self {
        Check {
            name: name.to_string(),
            pass,
            measured,
            expected: expected.to_string(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} | measured: {} | expected: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected
        )
    }
}
