//! Air-to-ground channel: geometry, LoS probability, angle-dependent path
//! loss and the gamma-distributed power gain induced by Nakagami-m fading.
//!
//! The average path loss `ḡ` is a loss (usually far above 1) and the gain
//! `G` of a link is `Gamma(m, rate λ)` with `λ = m·ḡ`, so `E[G] = 1/ḡ`.

use core::f64::consts::FRAC_PI_2;
use core::fmt;
use core::str::FromStr;

use rand_core::RngCore;

use crate::math::{asin, db_to_linear, exp, powf, sqrt};
use crate::special;
use crate::{Error, Result};

/// Path-loss exponent at elevation `π/2` (pure LoS).
pub const ALPHA_VERTICAL: f64 = 2.0;
/// Path-loss exponent at grazing elevation.
pub const ALPHA_GRAZING: f64 = 4.0;

/// Deployment environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Environment {
    Suburban,
    Urban,
    DenseUrban,
    HighRiseUrban,
    /// User-supplied constants.
    Custom,
}

impl Environment {
    pub const PRESETS: [Environment; 4] = [
        Environment::Suburban,
        Environment::Urban,
        Environment::DenseUrban,
        Environment::HighRiseUrban,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Environment::Suburban => "suburban",
            Environment::Urban => "urban",
            Environment::DenseUrban => "dense-urban",
            Environment::HighRiseUrban => "high-rise",
            Environment::Custom => "custom",
        }
    }

    /// Preset constants; `None` for [`Environment::Custom`].
    pub fn preset(self) -> Option<EnvironmentParams> {
        let (a0, b0, eta_los_db, eta_nlos_db) = match self {
            Environment::Suburban => (4.88, 0.43, 0.1, 21.0),
            Environment::Urban => (9.61, 0.16, 1.0, 20.0),
            Environment::DenseUrban => (12.08, 0.11, 1.6, 23.0),
            Environment::HighRiseUrban => (27.23, 0.08, 2.3, 34.0),
            Environment::Custom => return None,
        };
        Some(EnvironmentParams {
            kind: self,
            a0,
            b0,
            eta_los_db,
            eta_nlos_db,
        })
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "suburban" => Ok(Environment::Suburban),
            "urban" => Ok(Environment::Urban),
            "dense-urban" => Ok(Environment::DenseUrban),
            "high-rise" => Ok(Environment::HighRiseUrban),
            "custom" => Ok(Environment::Custom),
            _ => Err(Error::InvalidParameter {
                name: "environment",
                reason: "expected suburban, urban, dense-urban, high-rise or custom",
            }),
        }
    }
}

/// LoS-model constants and attenuation factors of an environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentParams {
    kind: Environment,
    a0: f64,
    b0: f64,
    eta_los_db: f64,
    eta_nlos_db: f64,
}

impl EnvironmentParams {
    pub fn new(kind: Environment, a0: f64, b0: f64, eta_los_db: f64, eta_nlos_db: f64) -> Result<Self> {
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(Error::Domain { name: "a0", value: a0, expected: "a0 > 0" });
        }
        if !(b0 > 0.0 && b0.is_finite()) {
            return Err(Error::Domain { name: "b0", value: b0, expected: "b0 > 0" });
        }
        if !eta_los_db.is_finite() || !eta_nlos_db.is_finite() {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: "attenuation factors must be finite",
            });
        }
        if eta_los_db > eta_nlos_db {
            return Err(Error::InvalidParameter {
                name: "eta_los_db",
                reason: "LoS attenuation must not exceed NLoS attenuation",
            });
        }
        Ok(Self { kind, a0, b0, eta_los_db, eta_nlos_db })
    }

    pub fn kind(&self) -> Environment {
        self.kind
    }
    pub fn a0(&self) -> f64 {
        self.a0
    }
    pub fn b0(&self) -> f64 {
        self.b0
    }
    pub fn eta_los_db(&self) -> f64 {
        self.eta_los_db
    }
    pub fn eta_nlos_db(&self) -> f64 {
        self.eta_nlos_db
    }

    /// `(η_L, η_nL)` as multiplicative factors.
    pub fn eta_linear(&self, scale: EtaScale) -> (f64, f64) {
        match scale {
            EtaScale::DbToLinear => (db_to_linear(self.eta_los_db), db_to_linear(self.eta_nlos_db)),
            EtaScale::Raw => (self.eta_los_db, self.eta_nlos_db),
        }
    }
}

impl From<Environment> for EnvironmentParams {
    /// Panics for [`Environment::Custom`], which has no preset.
    fn from(env: Environment) -> Self {
        env.preset().expect("custom environment has no preset constants")
    }
}

/// How the tabulated attenuation factors enter the path-loss formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EtaScale {
    /// `η = 10^(η_dB / 10)`.
    #[default]
    DbToLinear,
    /// The tabulated number is used as is.
    Raw,
}

impl EtaScale {
    pub fn name(self) -> &'static str {
        match self {
            EtaScale::DbToLinear => "db->linear",
            EtaScale::Raw => "raw",
        }
    }
}

impl FromStr for EtaScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "db->linear" | "db-to-linear" | "linear" => Ok(EtaScale::DbToLinear),
            "raw" => Ok(EtaScale::Raw),
            _ => Err(Error::InvalidParameter {
                name: "eta_scale",
                reason: "expected db->linear or raw",
            }),
        }
    }
}

impl fmt::Display for EtaScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundPoint {
    pub x: f64,
    pub y: f64,
}

/// Which ground user a link serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UserRole {
    /// Grant-based user `D_B`.
    GrantBased,
    /// Grant-free user `D_F`.
    GrantFree,
}

/// UAV position and the two ground users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    uav: Position,
    user_b: GroundPoint,
    user_f: GroundPoint,
}

impl Geometry {
    pub fn new(uav: Position, user_b: GroundPoint, user_f: GroundPoint) -> Result<Self> {
        let coords = [uav.x, uav.y, uav.z, user_b.x, user_b.y, user_f.x, user_f.y];
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "geometry",
                reason: "coordinates must be finite",
            });
        }
        if uav.z <= 0.0 {
            return Err(Error::Domain {
                name: "uav.z",
                value: uav.z,
                expected: "uav altitude must be positive",
            });
        }
        Ok(Self { uav, user_b, user_f })
    }

    pub fn uav(&self) -> Position {
        self.uav
    }
    pub fn user(&self, role: UserRole) -> GroundPoint {
        match role {
            UserRole::GrantBased => self.user_b,
            UserRole::GrantFree => self.user_f,
        }
    }

    /// Copy with the UAV moved.
    pub fn with_uav(&self, uav: Position) -> Result<Self> {
        Self::new(uav, self.user_b, self.user_f)
    }
}

/// Euclidean UAV-to-user distance in meters.
pub fn distance(geometry: &Geometry, role: UserRole) -> f64 {
    let u = geometry.uav;
    let p = geometry.user(role);
    let (dx, dy) = (p.x - u.x, p.y - u.y);
    sqrt(dx * dx + dy * dy + u.z * u.z)
}

/// Elevation angle in radians, `asin(z_U / d)`.
pub fn elevation(geometry: &Geometry, role: UserRole) -> f64 {
    let d = distance(geometry, role);
    asin((geometry.uav.z / d).min(1.0))
}

/// Sigmoid LoS probability `1 / (1 + a0·exp(-b0·(θ° - a0)))`.
pub fn los_probability(elevation: f64, env: &EnvironmentParams) -> Result<f64> {
    if !(elevation > 0.0 && elevation <= FRAC_PI_2) {
        return Err(Error::Domain {
            name: "elevation",
            value: elevation,
            expected: "0 < elevation <= pi/2",
        });
    }
    let degrees = elevation.to_degrees();
    Ok(1.0 / (1.0 + env.a0 * exp(-env.b0 * (degrees - env.a0))))
}

/// `α = (α_{π/2} − α₀)·P_L + α₀`.
pub fn path_loss_exponent(p_los: f64) -> f64 {
    (ALPHA_VERTICAL - ALPHA_GRAZING) * p_los + ALPHA_GRAZING
}

/// `ḡ = (P_L·η_L + (1 − P_L)·η_nL)·d^α`.
pub fn average_path_loss(distance: f64, p_los: f64, env: &EnvironmentParams, scale: EtaScale) -> f64 {
    let (eta_l, eta_n) = env.eta_linear(scale);
    let alpha = path_loss_exponent(p_los);
    (p_los * eta_l + (1.0 - p_los) * eta_n) * powf(distance, alpha)
}

/// Derived statistics of one UAV-to-user link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkStat {
    pub distance: f64,
    pub elevation: f64,
    pub p_los: f64,
    pub alpha: f64,
    pub eta_los: f64,
    pub eta_nlos: f64,
    pub g_bar: f64,
    pub lambda: f64,
    pub m: u32,
}

impl LinkStat {
    pub fn new(
        geometry: &Geometry,
        role: UserRole,
        env: &EnvironmentParams,
        scale: EtaScale,
        m: u32,
    ) -> Result<Self> {
        check_m(m)?;
        let distance = distance(geometry, role);
        let elevation = elevation(geometry, role);
        let p_los = los_probability(elevation, env)?;
        let alpha = path_loss_exponent(p_los);
        let (eta_los, eta_nlos) = env.eta_linear(scale);
        let g_bar = average_path_loss(distance, p_los, env, scale);
        if !(g_bar > 0.0 && g_bar.is_finite()) {
            return Err(Error::Domain {
                name: "g_bar",
                value: g_bar,
                expected: "positive finite average path loss",
            });
        }
        Ok(Self {
            distance,
            elevation,
            p_los,
            alpha,
            eta_los,
            eta_nlos,
            g_bar,
            lambda: m as f64 * g_bar,
            m,
        })
    }
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain {
            name: "m",
            value: 0.0,
            expected: "integer fading parameter m >= 1",
        });
    }
    Ok(())
}

fn check_gain_args(x: f64, lambda: f64, m: u32) -> Result<()> {
    check_m(m)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain { name: "lambda", value: lambda, expected: "lambda > 0" });
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain { name: "x", value: x, expected: "gain x >= 0" });
    }
    Ok(())
}

/// `F_G(x) = 1 − e^{−λx} Σ_{i<m} (λx)^i / i!`.
pub fn gain_cdf(x: f64, lambda: f64, m: u32) -> Result<f64> {
    check_gain_args(x, lambda, m)?;
    Ok(special::lower_unchecked(m, lambda * x))
}

/// `1 − F_G(x)`, computed without cancellation.
pub fn gain_ccdf(x: f64, lambda: f64, m: u32) -> Result<f64> {
    check_gain_args(x, lambda, m)?;
    special::regularized_upper(m, lambda * x)
}

/// `f_G(x) = λ^m x^{m−1} e^{−λx} / Γ(m)`.
pub fn gain_pdf(x: f64, lambda: f64, m: u32) -> Result<f64> {
    check_gain_args(x, lambda, m)?;
    if m == 1 {
        return Ok(lambda * exp(-lambda * x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let lx = lambda * x;
    let log_density = crate::math::log(lambda) + (m - 1) as f64 * crate::math::log(lx) - lx
        - special::ln_factorial(m - 1);
    Ok(exp(log_density))
}

/// Uniform draw in `(0, 1]` from the top 53 bits of one `u64`.
#[inline]
pub fn unit_open_closed<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One exact draw from `Gamma(m, rate λ)` as a sum of `m` exponentials.
#[inline]
pub fn sample_gain<R: RngCore + ?Sized>(lambda: f64, m: u32, rng: &mut R) -> f64 {
    let mut acc = 0.0;
    for _ in 0..m {
        acc -= crate::math::log(unit_open_closed(rng));
    }
    acc / lambda
}
