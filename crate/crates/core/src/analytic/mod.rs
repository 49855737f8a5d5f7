//! Closed-form outage probability of the GF user.
//!
//! Each evaluator returns an [`OutageBreakdown`]: the raw total, every
//! summand (`T0`, `T11`, `T12` for FPA; `T0`, `T11`, `T2`, `T3` for DPA)
//! and the intermediates they are built from (`chi*`, `Phi*`).
//!
//! Term names are stable strings so downstream tables can keep fixed
//! columns. `Phi2`, `Phi3` and `Phi6` are the `i`-sums
//! `Σ_{i<m} λ_F^i Φ_i / i!` rather than the individual `Φ_i`.

mod dpa;
mod fpa;
mod integrals;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use dpa::{op_dpa_asymptotic, op_dpa_exact};
pub use fpa::{fpa_floor_constant, op_fpa_asymptotic, op_fpa_exact};
pub use integrals::{g1, g2, g_integrand, GainLaw};

use crate::math::powi;
use crate::quadrature::QuadratureConfig;
use crate::scheme::{DpaBranch, FpaBranch, Scheme, ThresholdSet};
use crate::special::{self, factorial};
use crate::{Error, Result, SystemParams};

/// Slack allowed for quadrature error when checking that terms are
/// probabilities.
pub const HEALTH_SLACK: f64 = 1e-6;

/// Summand names in the order they are added.
pub const SUMMAND_NAMES: [&str; 5] = ["T0", "T11", "T12", "T2", "T3"];
/// Probability-valued intermediates.
pub const CHI_NAMES: [&str; 6] = ["chi1", "chi2", "chi3", "chi4", "chi5", "chi6"];
/// Integral-valued intermediates.
pub const PHI_NAMES: [&str; 6] = ["Phi1", "Phi2", "Phi3", "Phi4", "Phi5", "Phi6"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evaluator {
    Exact,
    Asymptotic,
}

impl Evaluator {
    pub fn name(self) -> &'static str {
        match self {
            Evaluator::Exact => "exact",
            Evaluator::Asymptotic => "asymptotic",
        }
    }
}

/// Branch of the closed form that produced a breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Fpa(FpaBranch),
    Dpa(DpaBranch),
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Fpa(FpaBranch::NoFloor) => "fpa-no-floor",
            Branch::Fpa(FpaBranch::Floor) => "fpa-floor",
            Branch::Dpa(DpaBranch::A) => "dpa-a",
            Branch::Dpa(DpaBranch::B) => "dpa-b",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Evaluator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Evaluator::Exact),
            "asym" | "asymptotic" => Ok(Evaluator::Asymptotic),
            _ => Err(Error::InvalidParameter { name: "evaluator", reason: "expected exact or asym" }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermRole {
    /// Added into the total.
    Summand,
    /// A probability that is not itself added.
    Probability,
    /// An integral or sum; no range constraint.
    Auxiliary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
    pub role: TermRole,
}

/// Per-term outage decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageBreakdown {
    pub scheme: Scheme,
    pub evaluator: Evaluator,
    pub branch: Branch,
    /// Raw sum of the summands, not clamped.
    pub total: f64,
    pub terms: Vec<Term>,
}

impl OutageBreakdown {
    fn new(scheme: Scheme, evaluator: Evaluator, branch: Branch) -> Self {
        Self { scheme, evaluator, branch, total: 0.0, terms: Vec::new() }
    }

    fn push(&mut self, name: &'static str, value: f64, role: TermRole) {
        self.terms.push(Term { name, value, role });
    }

    fn summand(&mut self, name: &'static str, value: f64) {
        self.push(name, value, TermRole::Summand);
    }

    fn probability(&mut self, name: &'static str, value: f64) {
        self.push(name, value, TermRole::Probability);
    }

    fn auxiliary(&mut self, name: &'static str, value: f64) {
        self.push(name, value, TermRole::Auxiliary);
    }

    fn finish(mut self) -> Self {
        self.total = self.reconstruct();
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    pub fn summands(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| t.role == TermRole::Summand)
    }

    /// Sum of the summands.
    pub fn reconstruct(&self) -> f64 {
        self.summands().map(|t| t.value).sum()
    }

    /// Total clamped to `[0, 1]`, for presentation.
    pub fn total_clamped(&self) -> f64 {
        self.total.clamp(0.0, 1.0)
    }

    /// Checks that the total and every probability-valued term of an exact
    /// breakdown lie in `[−slack, 1 + slack]`. Asymptotic terms are
    /// approximations that are not probabilities at low SNR and are not
    /// checked.
    pub fn health_check(&self, slack: f64) -> Result<()> {
        if self.evaluator == Evaluator::Asymptotic {
            return Ok(());
        }
        let check = |name: &'static str, value: f64| {
            if !(value >= -slack && value <= 1.0 + slack) {
                Err(Error::NumericalHealth { term: name, value, slack })
            } else {
                Ok(())
            }
        };
        for t in self.terms.iter().filter(|t| t.role != TermRole::Auxiliary) {
            check(t.name, t.value)?;
        }
        check("total", self.total)
    }
}

/// Exact or asymptotic outage probability for `scheme`.
pub fn evaluate(
    params: &SystemParams,
    scheme: Scheme,
    evaluator: Evaluator,
    quad: &QuadratureConfig,
) -> Result<OutageBreakdown> {
    match (scheme, evaluator) {
        (Scheme::Fpa, Evaluator::Exact) => op_fpa_exact(params, quad),
        (Scheme::Fpa, Evaluator::Asymptotic) => op_fpa_asymptotic(params),
        (Scheme::Dpa, Evaluator::Exact) => op_dpa_exact(params, quad),
        (Scheme::Dpa, Evaluator::Asymptotic) => op_dpa_asymptotic(params),
    }
}

/// High-SNR slope of the outage probability: FPA has `m` without a floor
/// and 0 with one; DPA always has `m`.
pub fn diversity_order(params: &SystemParams, scheme: Scheme) -> Result<u32> {
    match scheme {
        Scheme::Fpa => Ok(match params.rates.fpa_branch()? {
            FpaBranch::NoFloor => params.m,
            FpaBranch::Floor => 0,
        }),
        Scheme::Dpa => {
            params.rates.dpa_branch()?;
            Ok(params.m)
        }
    }
}

impl SystemParams {
    pub fn law(&self) -> GainLaw {
        GainLaw { lambda_b: self.lambda_b, lambda_f: self.lambda_f, m: self.m }
    }
}

/// Shared helpers over a threshold set.
pub(crate) struct Ctx<'a> {
    pub t: &'a ThresholdSet,
    pub law: GainLaw,
}

impl<'a> Ctx<'a> {
    pub fn new(t: &'a ThresholdSet) -> Self {
        Self { t, law: GainLaw { lambda_b: t.lambda_b, lambda_f: t.lambda_f, m: t.m } }
    }

    pub fn m(&self) -> u32 {
        self.t.m
    }

    pub fn cdf_b(&self, x: f64) -> f64 {
        special::lower_unchecked(self.m(), self.t.lambda_b * x)
    }

    pub fn ccdf_b(&self, x: f64) -> f64 {
        special::upper_unchecked(self.m(), self.t.lambda_b * x)
    }

    pub fn ccdf_f(&self, x: f64) -> f64 {
        special::upper_unchecked(self.m(), self.t.lambda_f * x)
    }

    /// `F_B(hi) − F_B(lo)` without cancellation in either tail.
    pub fn cdf_b_between(&self, lo: f64, hi: f64) -> f64 {
        reg_between(self.m(), self.t.lambda_b * lo, self.t.lambda_b * hi)
    }

    /// `A₁ λ_F^i / (i! A₂^{i+m}) · Γ(i+m)`, the weight of the `i`-th
    /// regularized incomplete gamma in the `Φ₂`-type sums.
    fn sum_weight(&self, i: u32) -> f64 {
        let m = self.m();
        let rb = self.t.lambda_b / self.t.a2;
        let rf = self.t.lambda_f / self.t.a2;
        powi(rb, m) * powi(rf, i) * factorial(i + m - 1) / (factorial(m - 1) * factorial(i))
    }

    /// `A₁ Σ_i λ_F^i/i! · [Υ(i+m, A₂hi) − Υ(i+m, A₂lo)]/A₂^{i+m}`.
    pub fn a1_lower_sum(&self, lo: f64, hi: f64) -> f64 {
        let a2 = self.t.a2;
        (0..self.m())
            .map(|i| self.sum_weight(i) * reg_between(i + self.m(), a2 * lo, a2 * hi))
            .sum()
    }

    /// `A₁ Σ_i λ_F^i/i! · Γ(i+m, A₂x)/A₂^{i+m}`.
    pub fn a1_upper_sum(&self, x: f64) -> f64 {
        let a2 = self.t.a2;
        (0..self.m())
            .map(|i| self.sum_weight(i) * special::upper_unchecked(i + self.m(), a2 * x))
            .sum()
    }

    /// `A₁ Σ_i λ_F^i (hi^{i+m} − lo^{i+m})/(i!(i+m))`, the small-argument
    /// form of [`Self::a1_lower_sum`].
    pub fn a1_power_sum(&self, lo: f64, hi: f64) -> f64 {
        let m = self.m();
        (0..m)
            .map(|i| {
                let k = i + m;
                let diff = powi(hi, k) - powi(lo, k);
                self.t.a1 * powi(self.t.lambda_f, i) * diff / (factorial(i) * k as f64)
            })
            .sum()
    }

    pub fn g1(&self, a: f64, b: f64, s: f64, t: f64, quad: &QuadratureConfig) -> Result<f64> {
        g1(a, b, s, t, &self.law, quad)
    }

    pub fn g2(&self, a: f64, b: f64, c: f64, quad: &QuadratureConfig) -> Result<f64> {
        g2(a, b, c, &self.law, quad)
    }
}

/// `P(s, hi) − P(s, lo)` computed from whichever tail is small.
fn reg_between(s: u32, lo: f64, hi: f64) -> f64 {
    if lo >= s as f64 {
        special::upper_unchecked(s, lo) - special::upper_unchecked(s, hi)
    } else {
        special::lower_unchecked(s, hi) - special::lower_unchecked(s, lo)
    }
}

/// `x^m / m!`.
pub(crate) fn pow_over_fact(x: f64, m: u32) -> f64 {
    powi(x, m) / factorial(m)
}

#[cfg(test)]
mod tests;
