//! Fixed power allocation.

use super::{pow_over_fact, Branch, Ctx, Evaluator, OutageBreakdown};
use crate::quadrature::QuadratureConfig;
use crate::scheme::{FpaBranch, Scheme, ThresholdSet};
use crate::{Result, SystemParams};

/// `T₀ + T₁₁ + T₁₂`, where `T₁₂` takes its no-floor or floor form.
pub fn op_fpa_exact(params: &SystemParams, quad: &QuadratureConfig) -> Result<OutageBreakdown> {
    let branch = params.rates.fpa_branch()?;
    let t = params.thresholds()?;
    let cx = Ctx::new(&t);
    let mut out = OutageBreakdown::new(Scheme::Fpa, Evaluator::Exact, Branch::Fpa(branch));

    let t0 = cx.cdf_b(t.eps1);
    let (chi1, chi2, phi1, phi2) = t11_parts(&cx, quad)?;
    out.summand("T0", t0);
    out.summand("T11", chi1 - chi2);
    out.probability("chi1", chi1);
    out.probability("chi2", chi2);
    out.auxiliary("Phi1", phi1);
    out.auxiliary("Phi2", phi2);

    match branch {
        FpaBranch::NoFloor => {
            let eps3 = ThresholdSet::require(t.eps3, "eps3")?;
            let eps4 = ThresholdSet::require(t.eps4, "eps4")?;
            let eps5 = ThresholdSet::require(t.eps5, "eps5")?;
            let a1_phi3 = cx.a1_lower_sum(t.eps1, eps5);
            let chi3 = cx.cdf_b_between(t.eps1, eps5) - a1_phi3;
            let phi4 = cx.g2(eps3, eps4, eps5, quad)?;
            let chi4 = cx.ccdf_b(eps5) - t.a1 * phi4;
            out.summand("T12", chi3 + chi4);
            out.probability("chi3", chi3);
            out.probability("chi4", chi4);
            out.auxiliary("Phi3", a1_phi3 / t.a1);
            out.auxiliary("Phi4", phi4);
        }
        FpaBranch::Floor => {
            out.summand("T12", cx.ccdf_b(t.eps1) - cx.a1_upper_sum(t.eps1));
        }
    }
    Ok(out.finish())
}

/// `(χ₁, χ₂, Φ₁, Σλ_F^iΦ₂/i!)`, shared with the DPA evaluator.
pub(super) fn t11_parts(cx: &Ctx<'_>, quad: &QuadratureConfig) -> Result<(f64, f64, f64, f64)> {
    let t = cx.t;
    let between = cx.cdf_b_between(t.eps1, t.eps0);
    let phi1 = cx.g1(t.eps1, t.eps2, t.eps1, t.eps0, quad)?;
    let chi1 = between - t.a1 * phi1;
    let a1_phi2 = cx.a1_lower_sum(t.eps1, t.eps0);
    let chi2 = between - a1_phi2;
    Ok((chi1, chi2, phi1, a1_phi2 / t.a1))
}

/// `(T₀^∞, T₁₁^∞)`, shared with the DPA evaluator.
pub(super) fn asymptotic_head(cx: &Ctx<'_>) -> (f64, f64) {
    let t = cx.t;
    let m = cx.m();
    let (lb, lf) = (t.lambda_b, t.lambda_f);
    let t0 = pow_over_fact(lb * t.eps1, m);
    let t11 = (pow_over_fact(lb * t.eps0, m) - pow_over_fact(lb * t.eps1, m))
        * (pow_over_fact(lf * t.eps2, m) - 1.0)
        + cx.a1_power_sum(t.eps1, t.eps0);
    (t0, t11)
}

/// High-SNR expansion of [`op_fpa_exact`].
pub fn op_fpa_asymptotic(params: &SystemParams) -> Result<OutageBreakdown> {
    let branch = params.rates.fpa_branch()?;
    let t = params.thresholds()?;
    let cx = Ctx::new(&t);
    let m = t.m;
    let (lb, lf) = (t.lambda_b, t.lambda_f);
    let mut out = OutageBreakdown::new(Scheme::Fpa, Evaluator::Asymptotic, Branch::Fpa(branch));

    let (t0, t11) = asymptotic_head(&cx);
    out.summand("T0", t0);
    out.summand("T11", t11);
    match branch {
        FpaBranch::NoFloor => {
            let eps4 = ThresholdSet::require(t.eps4, "eps4")?;
            let eps5 = ThresholdSet::require(t.eps5, "eps5")?;
            let chi3 = pow_over_fact(lb * eps5, m) - pow_over_fact(lb * t.eps1, m) - cx.a1_power_sum(t.eps1, eps5);
            let chi4 = pow_over_fact(lf * eps4, m) * (1.0 - pow_over_fact(lb * eps5, m));
            out.summand("T12", chi3 + chi4);
            out.probability("chi3", chi3);
            out.probability("chi4", chi4);
        }
        FpaBranch::Floor => {
            let sum = cx.a1_upper_sum(0.0) - cx.a1_power_sum(0.0, t.eps1);
            out.summand("T12", 1.0 - pow_over_fact(lb * t.eps1, m) - sum);
        }
    }
    Ok(out.finish())
}

/// Limit of the FPA outage probability in the floor branch,
/// `1 − A₁ Σ_i λ_F^i Γ(i+m)/(i! A₂^{i+m})`.
pub fn fpa_floor_constant(params: &SystemParams) -> Result<f64> {
    let t = params.thresholds()?;
    let cx = Ctx::new(&t);
    Ok(1.0 - cx.a1_upper_sum(0.0))
}
