//! Exponential integral `E1(x) = ∫_0^1 z^{-1} e^{-x/z} dz` and the kernel
//! `H(z, x) = -∫_z^1 u^{-1} e^{-a x / u} du` built from it.
//!
//! For `x ≤ 1` the convergent power series
//! `E1(x) = -γ_E - ln x + Σ_{k≥1} (-1)^{k+1} x^k / (k·k!)` is summed until the
//! next term drops below 1e-16; for `x > 1` a modified-Lentz evaluation of the
//! classical continued fraction is used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk, Integral};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments above this are flagged: `e^{-x}` is close to the bottom of the
/// double range.
pub const E1_UNDERFLOW_THRESHOLD: f64 = 700.0;

const SERIES_CUTOFF: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum E1Branch {
    Series,
    ContinuedFraction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E1Result {
    pub value: f64,
    pub branch: E1Branch,
    pub est_error: f64,
    /// Set when `x` exceeds [`E1_UNDERFLOW_THRESHOLD`].
    pub underflow: bool,
}

pub fn exp_integral_e1(x: f64) -> Result<E1Result> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "exp_integral_e1",
            format!("x = {x} must be positive"),
        ));
    }
    if x <= 1.0 {
        let (value, est_error) = series_with_error(x);
        Ok(E1Result {
            value,
            branch: E1Branch::Series,
            est_error,
            underflow: false,
        })
    } else {
        let (value, est_error) = e1_continued_fraction(x);
        Ok(E1Result {
            value,
            branch: E1Branch::ContinuedFraction,
            est_error,
            underflow: x > E1_UNDERFLOW_THRESHOLD,
        })
    }
}

/// Convenience wrapper returning only the value; panics on `x ≤ 0`.
pub fn e1(x: f64) -> f64 {
    exp_integral_e1(x)
        .expect("E1 argument must be positive")
        .value
}

fn series_with_error(x: f64) -> (f64, f64) {
    let mut term = x; // x^k / k!
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut k = 1usize;
    loop {
        let t = term / k as f64;
        let signed = if k % 2 == 1 { t } else { -t };
        sum += signed;
        abs_sum += t;
        k += 1;
        term *= x / k as f64;
        if term / (k as f64) < SERIES_CUTOFF || k > 200 {
            break;
        }
    }
    let lnx = x.ln();
    let value = -EULER_GAMMA - lnx + sum;
    let truncation = term / k as f64;
    let rounding = 4.0 * f64::EPSILON * (EULER_GAMMA + lnx.abs() + abs_sum);
    (value, truncation + rounding)
}

/// Continued-fraction branch, usable for any `x > 0` but efficient for `x ≥ 1`.
pub fn e1_continued_fraction(x: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    let mut last_delta = 1.0;
    let mut iterations = 0;
    for i in 1..100_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        last_delta = (del - 1.0).abs();
        iterations = i;
        if last_delta < 0.5 * f64::EPSILON {
            break;
        }
    }
    let value = h * (-x).exp();
    let est = value * (last_delta + 2.0 * f64::EPSILON * (iterations as f64).sqrt());
    (value, est)
}

/// Partial sum of the small-argument series with exactly `n_terms` terms.
pub fn e1_series(x: f64, n_terms: usize) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::domain(
            "e1_series",
            format!("x = {x} outside (0, 1]"),
        ));
    }
    if n_terms == 0 {
        return Err(Error::domain("e1_series", "n_terms must be positive"));
    }
    Ok(-EULER_GAMMA - x.ln() + series_sum(x, n_terms))
}

/// `Σ_{k=1}^{n} (-1)^{k+1} x^k / (k·k!)`.
pub fn series_sum(x: f64, n_terms: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=n_terms {
        term *= x / k as f64;
        let t = term / k as f64;
        sum += if k % 2 == 1 { t } else { -t };
    }
    sum
}

/// `(½ e^{-x} ln(1 + 2/x), e^{-x} ln(1 + 1/x))`, which bracket `E1(x)`.
pub fn e1_bounds(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "e1_bounds",
            format!("x = {x} must be positive"),
        ));
    }
    let ex = (-x).exp();
    Ok((0.5 * ex * (2.0 / x).ln_1p(), ex * (1.0 / x).ln_1p()))
}

/// `H(z, x) = -∫_z^1 u^{-1} exp(-(ν/ρ) x / u) du = E1(a/z) - E1(a)` with
/// `a = (ν/ρ) x`; `H(z, 0) = ln z`.
pub fn h_kernel(z: f64, x: f64, nu_over_rho: f64) -> Result<f64> {
    if !(z > 0.0 && z <= 1.0) {
        return Err(Error::domain("h_kernel", format!("z = {z} outside (0, 1]")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(
            "h_kernel",
            format!("x = {x} must be nonnegative"),
        ));
    }
    if !(nu_over_rho > 0.0) {
        return Err(Error::domain(
            "h_kernel",
            format!("nu/rho = {nu_over_rho} must be positive"),
        ));
    }
    if z == 1.0 {
        return Ok(0.0);
    }
    let a = nu_over_rho * x;
    if a == 0.0 {
        return Ok(z.ln());
    }
    let a_z = a / z;
    if a_z <= 1.0 {
        // Both arguments on the series branch: the logarithms combine into ln z.
        let mut term_a = 1.0;
        let mut term_az = 1.0;
        let mut sum = 0.0;
        for k in 1..=60 {
            term_a *= a / k as f64;
            term_az *= a_z / k as f64;
            let t = (term_az - term_a) / k as f64;
            sum += if k % 2 == 1 { t } else { -t };
            if term_az / (k as f64) < 1e-18 {
                break;
            }
        }
        Ok(z.ln() + sum)
    } else {
        Ok(e1(a_z) - e1(a))
    }
}

/// `E1(x)` by adaptive quadrature of `∫_0^∞ exp(-x e^t) dt`, the defining
/// integral after `z = e^{-t}`; independent of the series and fraction.
pub fn e1_quadrature(x: f64) -> Result<Integral> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "e1_quadrature",
            format!("x = {x} must be positive"),
        ));
    }
    // Beyond t = ln(800/x) the integrand is below e^{-800}.
    let t_max = (800.0 / x).ln().max(1.0);
    let r = adaptive_gk(|t| (-x * t.exp()).exp(), 0.0, t_max, 0.0, 1e-14, 2000);
    if !r.converged {
        return Err(Error::Quadrature {
            context: "e1_quadrature",
            estimated_error: r.abs_error,
        });
    }
    Ok(r)
}

/// One row of the E1 validation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct E1Check {
    pub x: f64,
    pub value: f64,
    pub branch: E1Branch,
    pub est_error: f64,
    pub oracle: f64,
    pub rel_error: f64,
    pub lower: f64,
    pub upper: f64,
}

impl E1Check {
    pub fn bounds_hold(&self) -> bool {
        self.lower < self.value && self.value < self.upper
    }
}

/// `E1` against the quadrature oracle and the bounds on `n` log-spaced
/// points of `[lo, hi]`.
pub fn e1_validation(n: usize, lo: f64, hi: f64) -> Result<Vec<E1Check>> {
    if n < 2 || !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(
            "e1_validation",
            format!("need n >= 2 and 0 < lo < hi, got {n}, [{lo}, {hi}]"),
        ));
    }
    (0..n)
        .map(|i| {
            let x = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
            let r = exp_integral_e1(x)?;
            let oracle = e1_quadrature(x)?.value;
            let (lower, upper) = e1_bounds(x)?;
            Ok(E1Check {
                x,
                value: r.value,
                branch: r.branch,
                est_error: r.est_error,
                oracle,
                rel_error: (r.value - oracle).abs() / oracle,
                lower,
                upper,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn e1_at_one() {
        let r = exp_integral_e1(1.0).unwrap();
        assert_eq!(r.branch, E1Branch::Series);
        assert_relative_eq!(r.value, 0.219_383_934_395_520_27, max_relative = 1e-14);
        assert!(r.est_error <= 1e-12 * r.value);
    }

    #[test]
    fn e1_small_argument_matches_log() {
        let x = 1e-8;
        let v = e1(x);
        assert!((v + x.ln() + EULER_GAMMA).abs() <= 2e-8);
    }

    #[test]
    fn domain_errors() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(e1_series(1.5, 10).is_err());
        assert!(e1_series(0.0, 10).is_err());
        assert!(e1_bounds(0.0).is_err());
        assert!(h_kernel(0.0, 1.0, 1.0).is_err());
        assert!(h_kernel(0.5, -1.0, 1.0).is_err());
        assert!(h_kernel(0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn large_argument_flagged() {
        let r = exp_integral_e1(720.0).unwrap();
        assert!(r.underflow);
        assert!(r.value >= 0.0);
        assert!(!exp_integral_e1(50.0).unwrap().underflow);
    }

    #[test]
    fn series_partial_sums() {
        assert_relative_eq!(
            series_sum(0.01, 5),
            0.009_975_055_451_556,
            max_relative = 1e-12
        );
        let full = e1_series(1.0, 30).unwrap();
        assert_relative_eq!(full, e1(1.0), epsilon = 1e-14);
    }

    #[test]
    fn quadrature_oracle_agrees() {
        for &x in &[1e-6, 0.3, 1.0, 7.5, 50.0] {
            let q = e1_quadrature(x).unwrap().value;
            assert!((q - e1(x)).abs() <= 1e-12 * q, "x={x}");
        }
    }

    #[test]
    fn bounds_at_one() {
        let (lo, hi) = e1_bounds(1.0).unwrap();
        assert_relative_eq!(lo, 0.5 * (-1.0f64).exp() * 3.0f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(hi, (-1.0f64).exp() * 2.0f64.ln(), epsilon = 1e-15);
        assert!(lo < e1(1.0) && e1(1.0) < hi);
    }

    #[test]
    fn branch_switch_is_continuous() {
        for &x in &[0.9, 0.97, 0.999, 1.0, 1.001, 1.05, 1.2] {
            let (series, _) = series_with_error(x);
            let (cf, _) = e1_continued_fraction(x);
            assert!(
                (series - cf).abs() <= 1e-11 * series,
                "x={x}: {series} vs {cf}"
            );
        }
    }

    #[test]
    fn h_kernel_edge_cases() {
        assert_eq!(h_kernel(1.0, 0.3, 2.0).unwrap(), 0.0);
        assert_relative_eq!(
            h_kernel(0.2, 0.0, 2.0).unwrap(),
            0.2f64.ln(),
            epsilon = 1e-15
        );
        let h = h_kernel(0.1, 0.5, 1.0).unwrap();
        assert!(h <= 0.0 && h.abs() <= 0.1f64.ln().abs());
    }
}
