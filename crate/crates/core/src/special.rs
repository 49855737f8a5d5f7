//! Gamma-family special functions for positive integer order.
//!
//! Every order used by the outage expressions is a positive integer
//! (`m + i`), so the incomplete gamma functions reduce to finite sums.
//! The regularized upper function is evaluated as
//! `Q(s, x) = e^{-x} Σ_{i<s} x^i / i!`, which has only positive terms. The
//! lower function is `1 - Q` except where `P` is small; there the ascending
//! series `P(s, x) = e^{-x} x^s / s! · Σ_k x^k / ((s+1)…(s+k))` avoids
//! cancellation. The series is summed until the increment no longer changes
//! the total in double precision.

use crate::math::{exp, log};
use crate::{Error, Result};

/// `n!` as a float. Exact for `n <= 22`.
pub fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| log(k as f64)).sum()
}

/// `Γ(s) = (s-1)!` for a positive integer `s`.
pub fn gamma(s: u32) -> Result<f64> {
    check_order(s)?;
    Ok(factorial(s - 1))
}

fn check_order(s: u32) -> Result<()> {
    if s == 0 {
        return Err(Error::Domain {
            name: "s",
            value: 0.0,
            expected: "integer order s >= 1",
        });
    }
    Ok(())
}

fn check_argument(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            name: "x",
            value: x,
            expected: "x >= 0",
        });
    }
    Ok(())
}

/// Regularized upper incomplete gamma `Q(s, x) = Γ(s, x) / Γ(s)`.
pub fn regularized_upper(s: u32, x: f64) -> Result<f64> {
    check_order(s)?;
    check_argument(x)?;
    Ok(upper_unchecked(s, x))
}

/// Regularized lower incomplete gamma `P(s, x) = Υ(s, x) / Γ(s)`.
pub fn regularized_lower(s: u32, x: f64) -> Result<f64> {
    check_order(s)?;
    check_argument(x)?;
    Ok(lower_unchecked(s, x))
}

pub(crate) fn upper_unchecked(s: u32, x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for i in 1..s {
        term *= x / i as f64;
        sum += term;
    }
    // e^{-x} can underflow while the sum is huge; combine in log space then.
    if x > 700.0 {
        exp(log(sum) - x)
    } else {
        exp(-x) * sum
    }
}

pub(crate) fn lower_unchecked(s: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x >= s as f64 {
        return 1.0 - upper_unchecked(s, x);
    }
    // x < s: the series ratio x / (s + k) < 1 and P < ~0.6.
    let log_lead = s as f64 * log(x) - x - ln_factorial(s);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1u32;
    loop {
        term *= x / (s + k) as f64;
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
        k += 1;
    }
    exp(log_lead) * sum
}

/// Lower incomplete gamma `Υ(s, x) = ∫_0^x t^{s-1} e^{-t} dt`.
pub fn lower_incomplete_gamma(s: u32, x: f64) -> Result<f64> {
    Ok(gamma(s)? * regularized_lower(s, x)?)
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt`.
pub fn upper_incomplete_gamma(s: u32, x: f64) -> Result<f64> {
    Ok(gamma(s)? * regularized_upper(s, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(1), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_relative_eq!(ln_factorial(10), (3_628_800.0f64).ln(), max_relative = 1e-15);
        assert_eq!(gamma(4).unwrap(), 6.0);
    }

    #[test]
    fn lower_at_zero_is_zero() {
        for s in 1..=6 {
            assert_eq!(lower_incomplete_gamma(s, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn order_one_is_exponential() {
        for &x in &[1e-8, 0.3, 1.0, 4.5, 30.0] {
            assert_relative_eq!(
                lower_incomplete_gamma(1, x).unwrap(),
                -(-x).exp_m1(),
                max_relative = 1e-14
            );
            assert_relative_eq!(
                upper_incomplete_gamma(1, x).unwrap(),
                (-x).exp(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn hand_evaluated_order_three() {
        // Υ(3, 2) = 2!(1 - e^{-2}(1 + 2 + 2)) = 2 - 10 e^{-2}
        let expected = 2.0 - 10.0 * (-2.0f64).exp();
        assert_relative_eq!(lower_incomplete_gamma(3, 2.0).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 0.646_647_167_633_873, max_relative = 1e-13);
    }

    #[test]
    fn upper_at_zero_is_complete_gamma() {
        for s in 1..=8 {
            assert_eq!(upper_incomplete_gamma(s, 0.0).unwrap(), factorial(s - 1));
        }
    }

    #[test]
    fn small_argument_keeps_relative_precision() {
        // P(2, x) = 1 - e^{-x}(1 + x) ~ x^2/2 - x^3/3
        let x = 1e-6;
        let expected = x * x / 2.0 - x * x * x / 3.0;
        assert_relative_eq!(regularized_lower(2, x).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn huge_argument_saturates() {
        assert_eq!(regularized_lower(3, 1e4).unwrap(), 1.0);
        assert_eq!(regularized_upper(3, 1e4).unwrap(), 0.0);
        assert_eq!(regularized_upper(3, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(lower_incomplete_gamma(2, -1.0), Err(Error::Domain { .. })));
        assert!(matches!(upper_incomplete_gamma(2, f64::NAN), Err(Error::Domain { .. })));
        assert!(matches!(lower_incomplete_gamma(0, 1.0), Err(Error::Domain { .. })));
    }
}
