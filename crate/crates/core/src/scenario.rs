//! The input record shared by every evaluator.

use crate::channel::{EnvironmentParams, EtaScale, Geometry, LinkStat, Position, UserRole};
use crate::math::{db_to_linear, log10};
use crate::scheme::{RateConfig, ThresholdSet};
use crate::{Error, Result};

/// Geometry, environment, fading, rate targets and transmit SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    geometry: Geometry,
    env: EnvironmentParams,
    eta_scale: EtaScale,
    m: u32,
    rates: RateConfig,
    rho_db: f64,
    rho: f64,
}

impl Scenario {
    pub fn new(
        geometry: Geometry,
        env: EnvironmentParams,
        eta_scale: EtaScale,
        m: u32,
        rates: RateConfig,
        rho_db: f64,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain { name: "m", value: 0.0, expected: "m >= 1" });
        }
        if !rho_db.is_finite() {
            return Err(Error::Domain { name: "rho_db", value: rho_db, expected: "finite SNR in dB" });
        }
        Ok(Self { geometry, env, eta_scale, m, rates, rho_db, rho: db_to_linear(rho_db) })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }
    pub fn env(&self) -> &EnvironmentParams {
        &self.env
    }
    pub fn eta_scale(&self) -> EtaScale {
        self.eta_scale
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn rates(&self) -> &RateConfig {
        &self.rates
    }
    pub fn rho_db(&self) -> f64 {
        self.rho_db
    }
    /// Linear transmit SNR `ρ = P/σ²`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho_db(&self, rho_db: f64) -> Result<Self> {
        Self::new(self.geometry, self.env, self.eta_scale, self.m, self.rates, rho_db)
    }

    pub fn with_rates(&self, rates: RateConfig) -> Self {
        Self { rates, ..*self }
    }

    pub fn with_uav(&self, uav: Position) -> Result<Self> {
        Ok(Self { geometry: self.geometry.with_uav(uav)?, ..*self })
    }

    pub fn link(&self, role: UserRole) -> Result<LinkStat> {
        LinkStat::new(&self.geometry, role, &self.env, self.eta_scale, self.m)
    }

    pub fn system(&self) -> Result<SystemParams> {
        let b = self.link(UserRole::GrantBased)?;
        let f = self.link(UserRole::GrantFree)?;
        SystemParams::new(b.lambda, f.lambda, self.m, self.rates, self.rho)
    }

    pub fn thresholds(&self) -> Result<ThresholdSet> {
        self.system()?.thresholds()
    }
}

/// The reduced parameter set the closed forms and the simulator depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub lambda_b: f64,
    pub lambda_f: f64,
    pub m: u32,
    pub rates: RateConfig,
    pub rho: f64,
}

impl SystemParams {
    pub fn new(lambda_b: f64, lambda_f: f64, m: u32, rates: RateConfig, rho: f64) -> Result<Self> {
        let p = Self { lambda_b, lambda_f, m, rates, rho };
        p.thresholds()?;
        Ok(p)
    }

    pub fn rho_db(&self) -> f64 {
        10.0 * log10(self.rho)
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.lambda_b, self.lambda_f, self.m, self.rates, rho)
    }

    pub fn thresholds(&self) -> Result<ThresholdSet> {
        ThresholdSet::new(self.rates, self.rho, self.lambda_b, self.lambda_f, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Environment, GroundPoint};
    use approx::assert_relative_eq;

    #[test]
    fn fixture_scenario() {
        let g = Geometry::new(
            Position { x: 0.0, y: 0.0, z: 100.0 },
            GroundPoint { x: 50.0, y: -50.0 },
            GroundPoint { x: 50.0, y: 50.0 },
        )
        .unwrap();
        let s = Scenario::new(
            g,
            Environment::Suburban.into(),
            EtaScale::DbToLinear,
            2,
            RateConfig::new(0.2, 2.0).unwrap(),
            30.0,
        )
        .unwrap();
        assert_relative_eq!(s.rho(), 1000.0, max_relative = 1e-15);
        let p = s.system().unwrap();
        assert_eq!(p.lambda_b, p.lambda_f);
        assert_relative_eq!(p.lambda_b, 30_698.799_419_387_48, max_relative = 1e-12);
        assert_relative_eq!(p.rho_db(), 30.0, max_relative = 1e-15);
        assert!(s.with_rho_db(f64::NAN).is_err());
        assert!(s.with_uav(Position { x: 0.0, y: 0.0, z: -1.0 }).is_err());
    }
}
