//! Dynamic power allocation.
//!
//! `T₂` collects admitted draws that keep the FPA decoding order
//! (`G_F < Θ_BG_B/(ρG_B + 1)`) and fail, `T₃` those that switch to the
//! raised coefficient `ω₂` and still fail. In branch B the upper limit of
//! `G_B` in `T₃` is finite (`ε₇`), since `Θ_BG_B/(ρG_B + 1)` crosses `ε₀`
//! there.

use super::fpa::{asymptotic_head, t11_parts};
use super::{pow_over_fact, Branch, Ctx, Evaluator, OutageBreakdown};
use crate::math::powi;
use crate::quadrature::QuadratureConfig;
use crate::scheme::{DpaBranch, Scheme, ThresholdSet};
use crate::{Result, SystemParams};

/// `T₀ + T₁₁ + T₂ + T₃`.
pub fn op_dpa_exact(params: &SystemParams, quad: &QuadratureConfig) -> Result<OutageBreakdown> {
    let branch = params.rates.dpa_branch()?;
    let t = params.thresholds()?;
    let cx = Ctx::new(&t);
    let mut out = OutageBreakdown::new(Scheme::Dpa, Evaluator::Exact, Branch::Dpa(branch));

    let t0 = cx.cdf_b(t.eps1);
    let (chi1, chi2, phi1, phi2) = t11_parts(&cx, quad)?;
    let a1_phi2 = phi2 * t.a1;
    let (a, b) = (-1.0 / t.rho, t.theta_b() / t.rho);

    let (t2, t3) = match branch {
        DpaBranch::A => {
            let phi5 = cx.g2(a, b, t.eps1, quad)?;
            out.auxiliary("Phi5", phi5);
            let t2 = cx.ccdf_b(t.eps1) - t.a1 * phi5;
            let t3 = t.a1 * phi5 - cx.ccdf_f(t.eps0) * cx.ccdf_b(t.eps0) - a1_phi2;
            (t2, t3)
        }
        DpaBranch::B => {
            let eps3 = ThresholdSet::require(t.eps3, "eps3")?;
            let eps4 = ThresholdSet::require(t.eps4, "eps4")?;
            let eps6 = ThresholdSet::require(t.eps6, "eps6")?;
            let eps7 = ThresholdSet::require(t.eps7, "eps7")?;
            let head = cx.g1(a, b, t.eps1, eps6, quad)?;
            let tail = cx.g2(eps3, eps4, eps6, quad)?;
            let upto7 = cx.g1(a, b, t.eps1, eps7, quad)?;
            out.auxiliary("g1_eps6", head);
            out.auxiliary("g2_eps6", tail);
            out.auxiliary("g1_eps7", upto7);
            let t2 = cx.ccdf_b(t.eps1) - t.a1 * head - t.a1 * tail;
            let t3 = t.a1 * upto7 - a1_phi2 - cx.ccdf_f(t.eps0) * cx.cdf_b_between(t.eps0, eps7);
            (t2, t3)
        }
    };

    out.summand("T0", t0);
    out.summand("T11", chi1 - chi2);
    out.summand("T2", t2);
    out.summand("T3", t3);
    out.probability("chi1", chi1);
    out.probability("chi2", chi2);
    if let Some(eps3) = t.eps3 {
        let chi5 = cx.cdf_b_between(t.eps1, eps3) - t.a1 * cx.g1(a, b, t.eps1, eps3, quad)?;
        out.probability("chi5", chi5);
        out.probability("chi6", t2 - chi5);
    }
    out.auxiliary("Phi1", phi1);
    out.auxiliary("Phi2", phi2);
    out.auxiliary("Phi6", phi2);
    Ok(out.finish())
}

/// High-SNR expansion of [`op_dpa_exact`]; every summand decays as `ρ^{−m}`.
pub fn op_dpa_asymptotic(params: &SystemParams) -> Result<OutageBreakdown> {
    let branch = params.rates.dpa_branch()?;
    let t = params.thresholds()?;
    let cx = Ctx::new(&t);
    let m = t.m;
    let (lb, lf) = (t.lambda_b, t.lambda_f);
    let mut out = OutageBreakdown::new(Scheme::Dpa, Evaluator::Asymptotic, Branch::Dpa(branch));

    let (t0, t11) = asymptotic_head(&cx);
    let (t2, t3) = match branch {
        DpaBranch::A => {
            let t2 = pow_over_fact(lf * t.theta_b() / t.rho, m) * (1.0 - pow_over_fact(t.eps1 * lb, m));
            let t3 = pow_over_fact(lb * t.eps0, m) - pow_over_fact(lb * t.eps1, m)
                + powi(lf, m) / super::factorial(m) * (powi(t.eps0, m) - powi(t.theta_b() / t.rho, m))
                - cx.a1_power_sum(t.eps1, t.eps0);
            (t2, t3)
        }
        DpaBranch::B => {
            let eps4 = ThresholdSet::require(t.eps4, "eps4")?;
            let eps6 = ThresholdSet::require(t.eps6, "eps6")?;
            // T₃ is confined to G_B < ε₇ = O(1/ρ) here and decays as ρ^{−2m}.
            (pow_over_fact(lf * eps4, m) * (1.0 - pow_over_fact(lb * eps6, m)), 0.0)
        }
    };
    out.summand("T0", t0);
    out.summand("T11", t11);
    out.summand("T2", t2);
    out.summand("T3", t3);
    Ok(out.finish())
}
