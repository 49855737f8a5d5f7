//! The two integral families behind every non-elementary term:
//!
//! `g₁(a, b, s, t) = Σ_{i<m} (λ_F b)^i/i! ∫_s^t y^{m+i−1}/(y − a)^i · e^{−λ_B y − λ_F b y/(y − a)} dy`
//!
//! and `g₂(a, b, c)`, the same integrand over `[c, ∞)`. With
//! `q = λ_F b y/(y − a)` the integrand is `y^{m−1} e^{−λ_B y} Q(m, q)`, where
//! `Q` is the regularized upper incomplete gamma function. For `b > 0` it
//! tends to zero as `y ↓ a`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{exp, powi, sqrt};
use crate::quadrature::{adaptive_tail, QuadratureConfig, QuadratureRule};
use crate::special;
use crate::{Error, Result};

/// Gamma rates of both links and the fading parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainLaw {
    pub lambda_b: f64,
    pub lambda_f: f64,
    pub m: u32,
}

/// Integrand of `g₁`/`g₂` at `y`, scaled by `e^{λ_B·shift}`.
#[inline]
fn integrand(y: f64, a: f64, b: f64, law: &GainLaw, shift: f64) -> f64 {
    let q = if b == 0.0 {
        0.0
    } else if a == 0.0 {
        law.lambda_f * b
    } else if y - a <= 0.0 {
        return 0.0;
    } else {
        law.lambda_f * b * y / (y - a)
    };
    let tail = special::upper_unchecked(law.m, q);
    if tail == 0.0 {
        return 0.0;
    }
    powi(y, law.m - 1) * exp(-law.lambda_b * (y - shift)) * tail
}

/// Pointwise integrand, for oracles and diagnostics.
pub fn g_integrand(y: f64, a: f64, b: f64, law: &GainLaw) -> f64 {
    integrand(y, a, b, law, 0.0)
}

/// `g₁(a, b, s, t)` by `N`-node Gauss–Chebyshev, applied per panel under
/// [`QuadratureRule::Refined`].
pub fn g1(a: f64, b: f64, s: f64, t: f64, law: &GainLaw, quad: &QuadratureConfig) -> Result<f64> {
    if !(s < t) {
        return Err(Error::EmptyInterval { lower: s, upper: t });
    }
    if b != 0.0 && a > s && a < t {
        return Err(Error::PoleInDomain { pole: a, lower: s });
    }
    let rule = quad.chebyshev();
    let scaled = match quad.rule {
        QuadratureRule::Plain => rule.integrate(s, t, false, |y| integrand(y, a, b, law, s)),
        QuadratureRule::Refined => panels(a, b, s, t, law)
            .windows(2)
            .map(|w| rule.integrate(w[0], w[1], true, |y| integrand(y, a, b, law, s)))
            .sum(),
    };
    Ok(scaled * exp(-law.lambda_b * s))
}

/// Panel edges for the composite rule on `[s, t]`.
///
/// With `x = y − a` the integrand behaves like `e^{φ(y)}`,
/// `φ = −λ_B y − k/x`, `k = λ_F b a`. Panels are marched from `s` so that
/// `φ` changes by at most [`PANEL_DELTA`] across each (bounded through
/// `φ'` and `φ''`) and, near a pole, `x` at most doubles. The march stops
/// once `φ` has fallen [`PANEL_DEPTH`] e-folds below its maximum.
fn panels(a: f64, b: f64, s: f64, t: f64, law: &GainLaw) -> Vec<f64> {
    let lb = law.lambda_b;
    let pole = b != 0.0 && a != 0.0;
    if pole && a >= t {
        return vec![s, t];
    }
    let k = if pole { law.lambda_f * b * a } else { 0.0 };
    let phi = |y: f64| if pole { -lb * y - k / (y - a) } else { -lb * y };
    let dphi = |y: f64| if pole { -lb + k / ((y - a) * (y - a)) } else { -lb };

    let mut edges = vec![s];
    let mut y = s;
    if pole && s - a <= 0.0 {
        // Start where e^{−k/x} is PANEL_DEPTH e-folds below the largest
        // value on the interval, at the peak √(k/λ_B) or at `t`.
        let xm = sqrt(k / lb).min(t - a);
        let x1 = k / (PANEL_DEPTH + lb * xm + k / xm);
        if a + x1 >= t {
            return vec![s, t];
        }
        y = a + x1;
        edges.push(y);
    }
    let mut peak = phi(y);
    for _ in 0..MAX_PANELS {
        let mut h = PANEL_DELTA / dphi(y).abs();
        if pole {
            let x = y - a;
            let curvature = 2.0 * k.abs() / (x * x * x);
            h = h.min(sqrt(2.0 * PANEL_DELTA / curvature)).min(x);
        }
        y += h;
        if !(y < t) {
            break;
        }
        edges.push(y);
        let p = phi(y);
        peak = peak.max(p);
        if dphi(y) < 0.0 && peak - p > PANEL_DEPTH {
            break;
        }
    }
    edges.push(t);
    edges
}

const PANEL_DELTA: f64 = 4.0;
const PANEL_DEPTH: f64 = 80.0;
const MAX_PANELS: usize = 400;

/// Where the panel rule hands over to Laguerre in `g₂`: past the decay of
/// a pole layer, or `c` when `Q` is constant.
fn layer_end(a: f64, b: f64, c: f64, law: &GainLaw) -> f64 {
    if b == 0.0 || a == 0.0 {
        c
    } else {
        c + (PANEL_DEPTH + 20.0) / law.lambda_b
    }
}

/// `g₂(a, b, c)`.
///
/// For `a ≤ 0` the configured rule is used: composite Gauss–Chebyshev over
/// the layer next to the pole, then a Gauss–Laguerre rule shifted past it
/// and scaled by `λ_B` ([`QuadratureRule::Refined`]), or the full
/// Laguerre integral over `[0, ∞)` minus Gauss–Chebyshev over `[0, c]`
/// ([`QuadratureRule::Plain`]). For `0 < a < c` the tail is
/// integrated adaptively instead. `a ≥ c` is rejected.
pub fn g2(a: f64, b: f64, c: f64, law: &GainLaw, quad: &QuadratureConfig) -> Result<f64> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Domain { name: "c", value: c, expected: "finite lower limit c >= 0" });
    }
    if b != 0.0 && a >= c {
        return Err(Error::PoleInDomain { pole: a, lower: c });
    }
    let lb = law.lambda_b;
    if b != 0.0 && a > 0.0 {
        let est = adaptive_tail(|y| integrand(y, a, b, law, c), c, lb, quad.adaptive_rel_tol)?;
        return Ok(est.value * exp(-lb * c));
    }
    match quad.rule {
        QuadratureRule::Refined => {
            // The layer where Q changes goes to the panel rule, the rest to Laguerre.
            let split = layer_end(a, b, c, law);
            let head = if split > c { g1(a, b, c, split, law, quad)? } else { 0.0 };
            let lag = quad.laguerre();
            // y = split + u/λ_B: e^{u} w(u) e^{−λ_B y} = w(u) e^{−λ_B split}.
            let s = lag.sum_log(|u| {
                let y = split + u / lb;
                (0.0, integrand(y, a, b, law, y))
            });
            Ok(head + s * exp(-lb * split) / lb)
        }
        QuadratureRule::Plain => {
            let lag = quad.laguerre();
            let full = lag.sum_log(|u| {
                let y = u / lb;
                (0.0, integrand(y, a, b, law, y))
            }) / lb;
            if c == 0.0 {
                return Ok(full);
            }
            let head = quad.chebyshev().integrate(0.0, c, false, |y| integrand(y, a, b, law, 0.0));
            Ok(full - head)
        }
    }
}
