//! Semi-grant-free decision logic: GF admission, FPA/DPA power coefficients,
//! decoding order and the resulting rate of the GF user.

use core::fmt;
use core::str::FromStr;

use crate::math::{log2, powf, powi};
use crate::special::factorial;
use crate::{Error, Result};

/// Relative tolerance under which a rate pair counts as sitting on a branch
/// boundary.
pub const BOUNDARY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Fixed power allocation.
    Fpa,
    /// Dynamic power allocation.
    Dpa,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Fpa, Scheme::Dpa];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Fpa => "fpa",
            Scheme::Dpa => "dpa",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fpa" => Ok(Scheme::Fpa),
            "dpa" => Ok(Scheme::Dpa),
            _ => Err(Error::InvalidParameter { name: "scheme", reason: "expected fpa or dpa" }),
        }
    }
}

/// Branch of the FPA closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FpaBranch {
    /// `Θ_th < Θ_B/(Θ_B − 1)`: diversity order `m`.
    NoFloor,
    /// `Θ_th > Θ_B/(Θ_B − 1)`: the outage probability saturates.
    Floor,
}

/// Branch of the DPA closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DpaBranch {
    /// `Θ_B > 1/(Θ_th − 1)`.
    A,
    /// `Θ_B < 1/(Θ_th − 1)`.
    B,
}

/// Target rates of both users and their linear thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConfig {
    r_th_b: f64,
    r_th_f: f64,
    theta_b: f64,
    theta_th: f64,
}

impl RateConfig {
    pub fn new(r_th_b: f64, r_th_f: f64) -> Result<Self> {
        if !(r_th_b > 0.0 && r_th_b.is_finite()) {
            return Err(Error::Domain { name: "r_th_b", value: r_th_b, expected: "r_th_b > 0" });
        }
        if !(r_th_f > 0.0 && r_th_f.is_finite()) {
            return Err(Error::Domain { name: "r_th_f", value: r_th_f, expected: "r_th_f > 0" });
        }
        Ok(Self {
            r_th_b,
            r_th_f,
            theta_b: powf(2.0, r_th_b),
            theta_th: powf(2.0, r_th_f),
        })
    }

    pub fn r_th_b(&self) -> f64 {
        self.r_th_b
    }
    pub fn r_th_f(&self) -> f64 {
        self.r_th_f
    }
    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }
    pub fn theta_th(&self) -> f64 {
        self.theta_th
    }

    /// `D = Θ_th + Θ_B − Θ_thΘ_B`; positive exactly in the no-floor branch.
    pub fn d(&self) -> f64 {
        self.theta_th + self.theta_b - self.theta_th * self.theta_b
    }

    /// `E = Θ_B + 1 − Θ_thΘ_B`; positive exactly in DPA branch B.
    pub fn e(&self) -> f64 {
        self.theta_b + 1.0 - self.theta_th * self.theta_b
    }

    /// `Θ_th > Θ_B/(Θ_B − 1)` (ignores exact equality).
    pub fn has_floor(&self) -> bool {
        self.d() < 0.0
    }

    pub fn fpa_branch(&self) -> Result<FpaBranch> {
        let d = self.d();
        if d.abs() <= BOUNDARY_RTOL * self.theta_th * self.theta_b {
            return Err(Error::BoundaryEquality {
                condition: "theta_th = theta_b/(theta_b - 1)",
                theta_b: self.theta_b,
                theta_th: self.theta_th,
            });
        }
        Ok(if d > 0.0 { FpaBranch::NoFloor } else { FpaBranch::Floor })
    }

    pub fn dpa_branch(&self) -> Result<DpaBranch> {
        self.fpa_branch()?;
        let e = self.e();
        if e.abs() <= BOUNDARY_RTOL * self.theta_th * self.theta_b {
            return Err(Error::BoundaryEquality {
                condition: "theta_b = 1/(theta_th - 1)",
                theta_b: self.theta_b,
                theta_th: self.theta_th,
            });
        }
        Ok(if e < 0.0 { DpaBranch::A } else { DpaBranch::B })
    }

    /// Checks every boundary relevant to `scheme`.
    pub fn check_boundaries(&self, scheme: Scheme) -> Result<()> {
        match scheme {
            Scheme::Fpa => self.fpa_branch().map(|_| ()),
            Scheme::Dpa => self.dpa_branch().map(|_| ()),
        }
    }
}

/// Gain thresholds partitioning the `(G_B, G_F)` plane, plus the constants
/// shared by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet {
    pub rates: RateConfig,
    pub rho: f64,
    pub lambda_b: f64,
    pub lambda_f: f64,
    pub m: u32,
    /// `ε₁ + ε₂`.
    pub eps0: f64,
    /// `(Θ_B − 1)/ρ`, the admission threshold.
    pub eps1: f64,
    /// `Θ_B(Θ_th − 1)/ρ`.
    pub eps2: f64,
    /// `ε₁Θ_th/D`; requires `D > 0`.
    pub eps3: Option<f64>,
    /// `Θ_B(Θ_th − 1)/(Dρ)`; requires `D > 0`.
    pub eps4: Option<f64>,
    /// `ε₃ + ε₄`.
    pub eps5: Option<f64>,
    /// `D(Θ_Bε₃ + ε₄)/(Θ_B·E)`; requires `E > 0`.
    pub eps6: Option<f64>,
    /// `ε₀/(1 − Θ_B(Θ_th − 1))`; requires `E > 0`.
    pub eps7: Option<f64>,
    /// `λ_B^m / Γ(m)`.
    pub a1: f64,
    /// `λ_B + λ_F`.
    pub a2: f64,
}

impl ThresholdSet {
    pub fn new(rates: RateConfig, rho: f64, lambda_b: f64, lambda_f: f64, m: u32) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain { name: "rho", value: rho, expected: "linear SNR > 0" });
        }
        for (name, v) in [("lambda_b", lambda_b), ("lambda_f", lambda_f)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain { name, value: v, expected: "gamma rate > 0" });
            }
        }
        if m == 0 {
            return Err(Error::Domain { name: "m", value: 0.0, expected: "m >= 1" });
        }
        let tb = rates.theta_b;
        let tt = rates.theta_th;
        let d = rates.d();
        let e = rates.e();
        let eps1 = (tb - 1.0) / rho;
        let eps2 = tb * (tt - 1.0) / rho;
        let eps0 = eps1 + eps2;
        let (eps3, eps4, eps5) = if d > 0.0 {
            let e3 = eps1 * tt / d;
            let e4 = tb * (tt - 1.0) / (d * rho);
            (Some(e3), Some(e4), Some(e3 + e4))
        } else {
            (None, None, None)
        };
        let (eps6, eps7) = match (eps3, eps4) {
            (Some(e3), Some(e4)) if e > 0.0 => (
                Some(d * (tb * e3 + e4) / (tb * e)),
                Some(eps0 / (1.0 - tb * (tt - 1.0))),
            ),
            _ => (None, None),
        };
        Ok(Self {
            rates,
            rho,
            lambda_b,
            lambda_f,
            m,
            eps0,
            eps1,
            eps2,
            eps3,
            eps4,
            eps5,
            eps6,
            eps7,
            a1: powi(lambda_b, m) / factorial(m - 1),
            a2: lambda_b + lambda_f,
        })
    }

    pub fn theta_b(&self) -> f64 {
        self.rates.theta_b
    }
    pub fn theta_th(&self) -> f64 {
        self.rates.theta_th
    }

    pub fn require(value: Option<f64>, name: &'static str) -> Result<f64> {
        value.ok_or(Error::UndefinedThreshold(name))
    }
}

/// One realization of the two link gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub g_b: f64,
    pub g_f: f64,
}

impl ChannelDraw {
    pub fn new(g_b: f64, g_f: f64) -> Result<Self> {
        if g_b.is_nan() || g_b < 0.0 {
            return Err(Error::Domain { name: "g_b", value: g_b, expected: "g_b >= 0" });
        }
        if g_f.is_nan() || g_f < 0.0 {
            return Err(Error::Domain { name: "g_f", value: g_f, expected: "g_f >= 0" });
        }
        Ok(Self { g_b, g_f })
    }
}

/// The GF user is admitted iff `g_b > ε₁`.
#[inline]
pub fn gb_admission(g_b: f64, thresholds: &ThresholdSet) -> bool {
    g_b > thresholds.eps1
}

/// `1 − ω`, clamped at 0, computed without forming `ω`.
#[inline]
fn fpa_omega_bar(g_b: f64, theta_b: f64, rho: f64) -> f64 {
    let x = rho * g_b;
    if x <= theta_b - 1.0 {
        return 0.0;
    }
    (x - (theta_b - 1.0)) / (x * theta_b)
}

/// `ω = min{(ρg_b + 1)(Θ_B − 1)/(ρg_bΘ_B), 1}`; 1 at `g_b = 0`.
pub fn fpa_omega(g_b: f64, config: &RateConfig, rho: f64) -> f64 {
    let x = rho * g_b;
    if x <= 0.0 {
        return 1.0;
    }
    ((x + 1.0) * (config.theta_b - 1.0) / (x * config.theta_b)).min(1.0)
}

/// `ω₂ = 1 − (ρg_f − (Θ_B − 1))/(ρΘ_Bg_f)`; needs `ρg_f ≥ Θ_B − 1`.
pub fn dpa_omega2(g_f: f64, config: &RateConfig, rho: f64) -> Result<f64> {
    let x = rho * g_f;
    if !(x >= config.theta_b - 1.0) || x <= 0.0 {
        return Err(Error::Domain {
            name: "rho*g_f",
            value: x,
            expected: "rho*g_f >= theta_b - 1",
        });
    }
    Ok(1.0 - (x - (config.theta_b - 1.0)) / (x * config.theta_b))
}

/// SINR of the GF user decoded after cancelling the GB signal.
#[inline]
fn sinr_case1(omega_bar: f64, rho: f64, g_f: f64) -> f64 {
    omega_bar * rho * g_f
}

/// SINR of the GF user decoded first, treating the GB signal as noise.
#[inline]
fn sinr_case2(omega_bar: f64, rho: f64, g_f: f64) -> f64 {
    let omega = 1.0 - omega_bar;
    omega_bar * rho * g_f / (1.0 + omega * rho * g_f)
}

/// SINR of the GF user under the raised coefficient `ω₂`.
#[inline]
fn sinr_case3(theta_b: f64, rho: f64, g_f: f64) -> f64 {
    ((rho * g_f - (theta_b - 1.0)) / theta_b).max(0.0)
}

/// `Θ_Bg_b/(ρg_b + 1)`, below which DPA keeps the FPA decoding order.
#[inline]
fn dpa_lower_edge(g_b: f64, theta_b: f64, rho: f64) -> f64 {
    theta_b * g_b / (rho * g_b + 1.0)
}

/// Which rate expression applies to the GF user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateCase {
    /// GB signal cancelled first with `ω`.
    Case1,
    /// GF signal decoded first with `ω`.
    Case2,
    /// GB signal cancelled first with `ω₂` (DPA only).
    Case3,
}

fn select_case(draw: &ChannelDraw, scheme: Scheme, theta_b: f64, rho: f64) -> RateCase {
    if draw.g_f > draw.g_b {
        return RateCase::Case1;
    }
    match scheme {
        Scheme::Fpa => RateCase::Case2,
        Scheme::Dpa => {
            if draw.g_f < dpa_lower_edge(draw.g_b, theta_b, rho) {
                RateCase::Case2
            } else {
                RateCase::Case3
            }
        }
    }
}

fn sinr(draw: &ChannelDraw, case: RateCase, theta_b: f64, rho: f64) -> f64 {
    let wb = fpa_omega_bar(draw.g_b, theta_b, rho);
    match case {
        RateCase::Case1 => sinr_case1(wb, rho, draw.g_f),
        RateCase::Case2 => sinr_case2(wb, rho, draw.g_f),
        RateCase::Case3 => sinr_case3(theta_b, rho, draw.g_f),
    }
}

/// Rate of the GF user under FPA; ties `g_f = g_b` use case 2.
pub fn achievable_rate_fpa(draw: &ChannelDraw, config: &RateConfig, rho: f64) -> f64 {
    let case = select_case(draw, Scheme::Fpa, config.theta_b, rho);
    log2(1.0 + sinr(draw, case, config.theta_b, rho))
}

/// Rate of the GF user under DPA.
pub fn achievable_rate_dpa(draw: &ChannelDraw, config: &RateConfig, rho: f64) -> f64 {
    let case = select_case(draw, Scheme::Dpa, config.theta_b, rho);
    log2(1.0 + sinr(draw, case, config.theta_b, rho))
}

pub fn achievable_rate(draw: &ChannelDraw, scheme: Scheme, config: &RateConfig, rho: f64) -> f64 {
    match scheme {
        Scheme::Fpa => achievable_rate_fpa(draw, config, rho),
        Scheme::Dpa => achievable_rate_dpa(draw, config, rho),
    }
}

/// Mutually exclusive outcome of one trial, in branching order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    GbBlocked,
    Case1Outage,
    Case2Outage,
    Case3Outage,
    NoOutage,
}

impl Event {
    pub fn is_outage(self) -> bool {
        self != Event::NoOutage
    }
}

/// Classifies a draw; the outage comparison is done on SINR against
/// `Θ_th − 1`, which is equivalent to comparing rates with `R_th^F`.
#[inline]
pub fn classify(draw: &ChannelDraw, scheme: Scheme, thresholds: &ThresholdSet) -> Event {
    if !gb_admission(draw.g_b, thresholds) {
        return Event::GbBlocked;
    }
    let theta_b = thresholds.rates.theta_b;
    let rho = thresholds.rho;
    let case = select_case(draw, scheme, theta_b, rho);
    if sinr(draw, case, theta_b, rho) < thresholds.rates.theta_th - 1.0 {
        match case {
            RateCase::Case1 => Event::Case1Outage,
            RateCase::Case2 => Event::Case2Outage,
            RateCase::Case3 => Event::Case3Outage,
        }
    } else {
        Event::NoOutage
    }
}

/// `g_b ≤ ε₁`, or admitted with a rate below `R_th^F`.
pub fn outage_event(draw: &ChannelDraw, scheme: Scheme, thresholds: &ThresholdSet) -> bool {
    classify(draw, scheme, thresholds).is_outage()
}
