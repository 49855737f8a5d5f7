//! Configuration ingestion and validation.
//!
//! A run is described by a [`RawConfig`], read from TOML (or JSON when the
//! file ends in `.json`). Every field is optional; the effective config is
//! `defaults ← file ← flags`, each layer overriding the previous one field
//! by field. [`validate_scenario`] then checks the whole record and reports
//! every problem it finds with its field path.

use std::fmt;
use std::path::Path;

use aerial_noma_core::analytic::Evaluator;
use aerial_noma_core::channel::{Environment, EnvironmentParams, EtaScale, Geometry, GroundPoint, Position};
use aerial_noma_core::montecarlo::DEFAULT_TRIALS;
use aerial_noma_core::quadrature::{QuadratureConfig, QuadratureRule, DEFAULT_CHEBYSHEV_NODES, DEFAULT_LAGUERRE_NODES};
use aerial_noma_core::scheme::{RateConfig, Scheme};
use aerial_noma_core::{Error as CoreError, Scenario};
use serde::{Deserialize, Serialize};

/// Default number of Monte Carlo RNG streams. Fixed rather than tied to the
/// core count so that output does not depend on the machine.
pub const DEFAULT_WORKERS: u32 = 8;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_RHO_DB: f64 = 60.0;

/// Field-wise "right wins" merge.
pub trait Overlay {
    fn overlay(self, top: Self) -> Self;
}

macro_rules! overlay_struct {
    ($t:ty { $($opt:ident),* $(; $($nested:ident),*)? }) => {
        impl Overlay for $t {
            fn overlay(self, top: Self) -> Self {
                Self {
                    $($opt: top.$opt.or(self.$opt),)*
                    $($($nested: self.$nested.overlay(top.$nested),)*)?
                }
            }
        }
    };
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawPoint3 {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}
overlay_struct!(RawPoint3 { x, y, z });

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawPoint2 {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}
overlay_struct!(RawPoint2 { x, y });

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawGeometry {
    pub uav: RawPoint3,
    pub user_b: RawPoint2,
    pub user_f: RawPoint2,
}
overlay_struct!(RawGeometry { ; uav, user_b, user_f });

/// Parameters of a custom environment (`env = "custom"`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawCustomEnv {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_los_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_nlos_db: Option<f64>,
}
overlay_struct!(RawCustomEnv { a0, b0, eta_los_db, eta_nlos_db });

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawChannel {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub env: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_scale: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    pub custom: RawCustomEnv,
}
overlay_struct!(RawChannel { env, eta_scale, m; custom });

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawRates {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_th_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_th_f: Option<f64>,
}
overlay_struct!(RawRates { r_th_b, r_th_f });

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawSnr {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_db: Option<f64>,
}
overlay_struct!(RawSnr { rho_db });

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawQuadrature {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_chebyshev: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_laguerre: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
}
overlay_struct!(RawQuadrature { n_chebyshev, n_laguerre, rule });

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawMonteCarlo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<i64>,
}
overlay_struct!(RawMonteCarlo { trials, seed, workers });

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<i64>,
}
overlay_struct!(RawSweep { axis, start, stop, steps });

/// Unvalidated run description.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    /// `fpa`, `dpa` or `both`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Subset of `exact`, `asym`, `mc`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluators: Option<Vec<String>>,
    pub geometry: RawGeometry,
    pub channel: RawChannel,
    pub rates: RawRates,
    pub snr: RawSnr,
    pub quadrature: RawQuadrature,
    pub montecarlo: RawMonteCarlo,
    pub sweep: RawSweep,
}
overlay_struct!(RawConfig { scheme, evaluators; geometry, channel, rates, snr, quadrature, montecarlo, sweep });

impl RawConfig {
    /// The reference deployment: `m = 2`, UAV at `(0, 0, 100)`, users at
    /// `(50, ∓50)`, suburban, `R_th^B = 0.2`, `R_th^F = 2`.
    pub fn defaults() -> Self {
        RawConfig {
            scheme: Some("both".into()),
            evaluators: Some(vec!["exact".into(), "asym".into()]),
            geometry: RawGeometry {
                uav: RawPoint3 { x: Some(0.0), y: Some(0.0), z: Some(100.0) },
                user_b: RawPoint2 { x: Some(50.0), y: Some(-50.0) },
                user_f: RawPoint2 { x: Some(50.0), y: Some(50.0) },
            },
            channel: RawChannel {
                env: Some("suburban".into()),
                eta_scale: Some(EtaScale::DbToLinear.name().into()),
                m: Some(2),
                custom: RawCustomEnv::default(),
            },
            rates: RawRates { r_th_b: Some(0.2), r_th_f: Some(2.0) },
            snr: RawSnr { rho_db: Some(DEFAULT_RHO_DB) },
            quadrature: RawQuadrature {
                n_chebyshev: Some(DEFAULT_CHEBYSHEV_NODES as i64),
                n_laguerre: Some(DEFAULT_LAGUERRE_NODES as i64),
                rule: Some(QuadratureRule::Refined.name().into()),
            },
            montecarlo: RawMonteCarlo {
                trials: Some(DEFAULT_TRIALS as i64),
                seed: Some(DEFAULT_SEED),
                workers: Some(DEFAULT_WORKERS as i64),
            },
            sweep: RawSweep::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, Issues> {
        toml::from_str(text).map_err(|e| Issues::single("config", e.message().trim()))
    }

    /// Parses a JSON config, or the `config` record of a sweep manifest.
    pub fn from_json(text: &str) -> Result<Self, Issues> {
        let err = |e: serde_json::Error| Issues::single("config", &e.to_string());
        let mut value: serde_json::Value = serde_json::from_str(text).map_err(err)?;
        if value.get("tool").is_some() {
            if let Some(inner) = value.get_mut("config") {
                value = inner.take();
            }
        }
        serde_json::from_value(value).map_err(err)
    }

    /// Reads TOML, or JSON for a `.json` extension.
    pub fn from_file(path: &Path) -> Result<Self, Issues> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Issues::single("config", &format!("cannot read {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always representable in TOML")
    }
}

/// One invalid field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

/// Every problem found in a config.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Issues(pub Vec<Issue>);

impl Issues {
    pub fn single(path: &str, message: &str) -> Self {
        Issues(vec![Issue { path: path.into(), message: message.into() }])
    }

    pub fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Issue { path: path.into(), message: message.into() });
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&mut self, other: Issues) {
        self.0.extend(other.0);
    }

    fn into_result<T>(self, value: impl FnOnce() -> T) -> Result<T, Issues> {
        if self.is_empty() {
            Ok(value())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for Issues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", issue.path, issue.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for Issues {}

/// Which evaluators to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EvaluatorSet {
    pub exact: bool,
    pub asym: bool,
    pub mc: bool,
}

impl EvaluatorSet {
    pub fn analytic(&self) -> impl Iterator<Item = Evaluator> {
        [(self.exact, Evaluator::Exact), (self.asym, Evaluator::Asymptotic)]
            .into_iter()
            .filter_map(|(on, e)| on.then_some(e))
    }
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    /// Number of RNG streams (not threads).
    pub workers: u32,
}

/// A validated run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub schemes: Vec<Scheme>,
    pub evaluators: EvaluatorSet,
    pub quad: QuadratureConfig,
    pub mc: McSettings,
    /// The fully resolved input, for manifests and round trips.
    pub raw: RawConfig,
}

/// Sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    RhoDb,
    UavY,
    UavZ,
    RThB,
    RThF,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::RhoDb, Axis::UavY, Axis::UavZ, Axis::RThB, Axis::RThF];

    pub fn name(self) -> &'static str {
        match self {
            Axis::RhoDb => "rho_db",
            Axis::UavY => "uav_y",
            Axis::UavZ => "uav_z",
            Axis::RThB => "r_th_b",
            Axis::RThF => "r_th_f",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// A validated sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// Grid points, with both ends exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| match i {
                0 => self.start,
                i if i == self.steps - 1 => self.stop,
                i => self.start + (self.stop - self.start) * i as f64 / last,
            })
            .collect()
    }
}

fn require<T: Clone>(issues: &mut Issues, path: &str, v: &Option<T>) -> Option<T> {
    if v.is_none() {
        issues.push(path, "missing value");
    }
    v.clone()
}

fn finite(issues: &mut Issues, path: &str, v: Option<f64>) -> Option<f64> {
    match v {
        Some(x) if !x.is_finite() => {
            issues.push(path, "must be finite");
            None
        }
        other => other,
    }
}

fn positive_count(issues: &mut Issues, path: &str, v: Option<i64>, min: i64) -> Option<i64> {
    match v {
        Some(n) if n < min => {
            issues.push(path, format!("must be at least {min}, got {n}"));
            None
        }
        other => other,
    }
}

fn required_finite(issues: &mut Issues, path: &str, v: &Option<f64>) -> Option<f64> {
    let v = require(issues, path, v);
    finite(issues, path, v)
}

fn required_count(issues: &mut Issues, path: &str, v: &Option<i64>, min: i64) -> Option<i64> {
    let v = require(issues, path, v);
    positive_count(issues, path, v, min)
}

/// Checks `raw` (already merged with defaults) and builds the run.
pub fn validate_scenario(raw: &RawConfig) -> Result<RunConfig, Issues> {
    let mut issues = Issues::default();
    let g = &raw.geometry;
    let coord = |issues: &mut Issues, path: &str, v: &Option<f64>| {
        let v = require(issues, path, v);
        finite(issues, path, v)
    };
    let ux = coord(&mut issues, "geometry.uav.x", &g.uav.x);
    let uy = coord(&mut issues, "geometry.uav.y", &g.uav.y);
    let uz = coord(&mut issues, "geometry.uav.z", &g.uav.z);
    if let Some(z) = uz {
        if z <= 0.0 {
            issues.push("geometry.uav.z", "uav altitude must be positive");
        }
    }
    let bx = coord(&mut issues, "geometry.user_b.x", &g.user_b.x);
    let by = coord(&mut issues, "geometry.user_b.y", &g.user_b.y);
    let fx = coord(&mut issues, "geometry.user_f.x", &g.user_f.x);
    let fy = coord(&mut issues, "geometry.user_f.y", &g.user_f.y);

    let env = environment(&mut issues, &raw.channel);
    let eta_scale = require(&mut issues, "channel.eta_scale", &raw.channel.eta_scale).and_then(|s| {
        s.parse::<EtaScale>()
            .map_err(|_| issues.push("channel.eta_scale", format!("unknown scale {s:?}; expected db->linear or raw")))
            .ok()
    });
    let m = required_count(&mut issues, "channel.m", &raw.channel.m, 1);
    let m = m.and_then(|m| {
        u32::try_from(m).ok().filter(|&m| m <= 64).or_else(|| {
            issues.push("channel.m", "must not exceed 64");
            None
        })
    });

    let r_b = required_finite(&mut issues, "rates.r_th_b", &raw.rates.r_th_b);
    let r_f = required_finite(&mut issues, "rates.r_th_f", &raw.rates.r_th_f);
    for (path, r) in [("rates.r_th_b", r_b), ("rates.r_th_f", r_f)] {
        if r.is_some_and(|r| r <= 0.0) {
            issues.push(path, "target rate must be positive");
        }
    }
    let rho_db = required_finite(&mut issues, "snr.rho_db", &raw.snr.rho_db);

    let schemes = require(&mut issues, "scheme", &raw.scheme).and_then(|s| match s.as_str() {
        "both" => Some(Scheme::ALL.to_vec()),
        other => match other.parse::<Scheme>() {
            Ok(s) => Some(vec![s]),
            Err(_) => {
                issues.push("scheme", format!("unknown scheme {other:?}; expected fpa, dpa or both"));
                None
            }
        },
    });
    let evaluators = require(&mut issues, "evaluators", &raw.evaluators).map(|list| {
        let mut set = EvaluatorSet::default();
        for (i, e) in list.iter().enumerate() {
            match e.as_str() {
                "exact" => set.exact = true,
                "asym" | "asymptotic" => set.asym = true,
                "mc" | "montecarlo" => set.mc = true,
                other => issues.push(format!("evaluators[{i}]"), format!("unknown evaluator {other:?}; expected exact, asym or mc")),
            }
        }
        if list.is_empty() {
            issues.push("evaluators", "at least one evaluator is required");
        }
        set
    });

    let q = &raw.quadrature;
    let nc = required_count(&mut issues, "quadrature.n_chebyshev", &q.n_chebyshev, 1);
    let nl = required_count(&mut issues, "quadrature.n_laguerre", &q.n_laguerre, 2);
    let rule = require(&mut issues, "quadrature.rule", &q.rule).and_then(|s| {
        s.parse::<QuadratureRule>()
            .map_err(|_| issues.push("quadrature.rule", format!("unknown rule {s:?}; expected refined or plain")))
            .ok()
    });
    let mc = &raw.montecarlo;
    let trials = required_count(&mut issues, "montecarlo.trials", &mc.trials, 1);
    let seed = require(&mut issues, "montecarlo.seed", &mc.seed);
    let workers = required_count(&mut issues, "montecarlo.workers", &mc.workers, 1);
    let workers = workers.and_then(|w| {
        u32::try_from(w).ok().filter(|&w| w <= 4096).or_else(|| {
            issues.push("montecarlo.workers", "must not exceed 4096");
            None
        })
    });

    let rates = match (r_b, r_f) {
        (Some(b), Some(f)) if b > 0.0 && f > 0.0 => RateConfig::new(b, f).ok(),
        _ => None,
    };
    if let (Some(rates), Some(schemes)) = (rates, &schemes) {
        boundary_issues(&mut issues, "rates.r_th_f", &rates, schemes);
    }
    if !issues.is_empty() {
        return Err(issues);
    }

    // Everything below is present and individually valid.
    let geometry = Geometry::new(
        Position { x: ux.unwrap(), y: uy.unwrap(), z: uz.unwrap() },
        GroundPoint { x: bx.unwrap(), y: by.unwrap() },
        GroundPoint { x: fx.unwrap(), y: fy.unwrap() },
    );
    let scenario = geometry.and_then(|g| Scenario::new(g, env.unwrap(), eta_scale.unwrap(), m.unwrap(), rates.unwrap(), rho_db.unwrap()));
    let scenario = match scenario.and_then(|s| s.system().map(|_| s)) {
        Ok(s) => s,
        Err(e) => return Err(Issues::single("scenario", &e.to_string())),
    };
    let quad = match QuadratureConfig::new(nc.unwrap() as usize, nl.unwrap() as usize, rule.unwrap()) {
        Ok(q) => q,
        Err(e) => return Err(Issues::single("quadrature", &e.to_string())),
    };
    issues.into_result(|| RunConfig {
        scenario,
        schemes: schemes.unwrap(),
        evaluators: evaluators.unwrap(),
        quad,
        mc: McSettings { trials: trials.unwrap() as u64, seed: seed.unwrap(), workers: workers.unwrap() },
        raw: raw.clone(),
    })
}

fn environment(issues: &mut Issues, ch: &RawChannel) -> Option<EnvironmentParams> {
    let name = require(issues, "channel.env", &ch.env)?;
    let kind = match name.parse::<Environment>() {
        Ok(k) => k,
        Err(_) => {
            issues.push(
                "channel.env",
                format!("unknown environment {name:?}; expected suburban, urban, dense-urban, high-rise or custom"),
            );
            return None;
        }
    };
    if let Some(p) = kind.preset() {
        return Some(p);
    }
    let c = &ch.custom;
    let mut field = |key: &str, v: &Option<f64>| {
        let path = format!("channel.custom.{key}");
        let v = require(issues, &path, v);
        finite(issues, &path, v)
    };
    let (a0, b0, los, nlos) = (field("a0", &c.a0), field("b0", &c.b0), field("eta_los_db", &c.eta_los_db), field("eta_nlos_db", &c.eta_nlos_db));
    let (a0, b0, los, nlos) = (a0?, b0?, los?, nlos?);
    EnvironmentParams::new(kind, a0, b0, los, nlos)
        .map_err(|e| {
            let key = match &e {
                CoreError::Domain { name, .. } => name,
                CoreError::InvalidParameter { name, .. } if *name != "eta" => name,
                _ => "eta_los_db",
            };
            issues.push(format!("channel.custom.{key}"), e.to_string());
        })
        .ok()
}

/// Flags rate pairs on a branch boundary of any selected scheme, with the
/// nearest safe values of `r_th_f` on either side.
pub fn boundary_issues(issues: &mut Issues, path: &str, rates: &RateConfig, schemes: &[Scheme]) {
    for &scheme in schemes {
        if let Err(CoreError::BoundaryEquality { condition, .. }) = rates.check_boundaries(scheme) {
            let f = rates.r_th_f();
            issues.push(
                path,
                format!(
                    "rate targets sit exactly on the boundary {condition} ({scheme}); \
                     perturb r_th_f, e.g. to {} or {}",
                    f - 1e-6,
                    f + 1e-6
                ),
            );
            return;
        }
    }
}

/// Checks the `[sweep]` section.
pub fn validate_sweep(raw: &RawSweep) -> Result<SweepSpec, Issues> {
    let mut issues = Issues::default();
    let axis = require(&mut issues, "sweep.axis", &raw.axis).and_then(|s| {
        Axis::parse(&s).or_else(|| {
            issues.push("sweep.axis", format!("unknown axis {s:?}; expected rho_db, uav_y, uav_z, r_th_b or r_th_f"));
            None
        })
    });
    let start = required_finite(&mut issues, "sweep.start", &raw.start);
    let stop = required_finite(&mut issues, "sweep.stop", &raw.stop);
    let steps = required_count(&mut issues, "sweep.steps", &raw.steps, 2);
    if let (Some(a), Some(b)) = (start, stop) {
        if a == b {
            issues.push("sweep.stop", "must differ from sweep.start");
        }
        if let Some(axis) = axis {
            let positive = matches!(axis, Axis::UavZ | Axis::RThB | Axis::RThF);
            if positive && (a <= 0.0 || b <= 0.0) {
                issues.push("sweep.start", format!("{} values must be positive", axis.name()));
            }
        }
    }
    issues.into_result(|| SweepSpec { axis: axis.unwrap(), start: start.unwrap(), stop: stop.unwrap(), steps: steps.unwrap() as usize })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with(f: impl FnOnce(&mut RawConfig)) -> RawConfig {
        let mut raw = RawConfig::defaults();
        f(&mut raw);
        raw
    }

    #[test]
    fn defaults_are_valid() {
        let run = validate_scenario(&RawConfig::defaults()).unwrap();
        assert_eq!(run.schemes, Scheme::ALL.to_vec());
        assert_eq!(run.scenario.m(), 2);
        assert_eq!(run.mc.workers, DEFAULT_WORKERS);
        assert!(run.evaluators.exact && run.evaluators.asym && !run.evaluators.mc);
    }

    #[test]
    fn zero_altitude_is_rejected() {
        let err = validate_scenario(&with(|r| r.geometry.uav.z = Some(0.0))).unwrap_err();
        assert_eq!(err.0, vec![Issue { path: "geometry.uav.z".into(), message: "uav altitude must be positive".into() }]);
    }

    #[test]
    fn issues_are_aggregated() {
        let raw = with(|r| {
            r.geometry.uav.z = Some(-1.0);
            r.channel.m = Some(0);
            r.rates.r_th_f = Some(f64::NAN);
            r.channel.env = Some("lunar".into());
            r.evaluators = Some(vec!["exact".into(), "magic".into()]);
            r.montecarlo.trials = Some(0);
        });
        let err = validate_scenario(&raw).unwrap_err();
        let paths: Vec<_> = err.0.iter().map(|i| i.path.as_str()).collect();
        for p in ["geometry.uav.z", "channel.m", "rates.r_th_f", "channel.env", "evaluators[1]", "montecarlo.trials"] {
            assert!(paths.contains(&p), "{p} missing from {paths:?}");
        }
    }

    #[test]
    fn boundary_pair_is_reported_with_a_suggestion() {
        // Θ_th = Θ_B/(Θ_B − 1) with Θ_B = 2 gives Θ_th = 2: R_B = R_F = 1.
        let err = validate_scenario(&with(|r| {
            r.rates.r_th_b = Some(1.0);
            r.rates.r_th_f = Some(1.0);
        }))
        .unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].path, "rates.r_th_f");
        assert!(err.0[0].message.contains("boundary") && err.0[0].message.contains("1.000001"), "{}", err.0[0].message);
        // The same pair is fine once nudged.
        assert!(validate_scenario(&with(|r| {
            r.rates.r_th_b = Some(1.0);
            r.rates.r_th_f = Some(1.000001);
        }))
        .is_ok());
    }

    #[test]
    fn custom_environment_requires_parameters() {
        let err = validate_scenario(&with(|r| r.channel.env = Some("custom".into()))).unwrap_err();
        assert_eq!(err.0.len(), 4);
        let ok = validate_scenario(&with(|r| {
            r.channel.env = Some("custom".into());
            r.channel.custom = RawCustomEnv { a0: Some(5.0), b0: Some(0.4), eta_los_db: Some(0.5), eta_nlos_db: Some(20.0) };
        }));
        assert!(ok.is_ok());
        let bad = validate_scenario(&with(|r| {
            r.channel.env = Some("custom".into());
            r.channel.custom = RawCustomEnv { a0: Some(-5.0), b0: Some(0.4), eta_los_db: Some(0.5), eta_nlos_db: Some(20.0) };
        }))
        .unwrap_err();
        assert_eq!(bad.0[0].path, "channel.custom.a0");
    }

    #[test]
    fn overlay_precedence() {
        let file = RawConfig::from_toml("[rates]\nr_th_b = 0.5\n[snr]\nrho_db = 40.0\n").unwrap();
        let flags = RawConfig { snr: RawSnr { rho_db: Some(70.0) }, ..Default::default() };
        let merged = RawConfig::defaults().overlay(file).overlay(flags);
        assert_eq!(merged.rates.r_th_b, Some(0.5));
        assert_eq!(merged.rates.r_th_f, Some(2.0));
        assert_eq!(merged.snr.rho_db, Some(70.0));
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = RawConfig::from_toml("[rates]\nr_b = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("r_b"), "{err}");
    }

    #[test]
    fn toml_and_json_round_trip() {
        let raw = RawConfig::defaults();
        assert_eq!(RawConfig::from_toml(&raw.to_toml()).unwrap(), raw);
        assert_eq!(RawConfig::from_json(&serde_json::to_string(&raw).unwrap()).unwrap(), raw);
    }

    #[test]
    fn sweep_validation() {
        let ok = validate_sweep(&RawSweep { axis: Some("uav_y".into()), start: Some(-200.0), stop: Some(300.0), steps: Some(51) }).unwrap();
        let v = ok.values();
        assert_eq!((v.len(), v[0], v[50]), (51, -200.0, 300.0));
        assert_eq!(v[20], 0.0);
        let err = validate_sweep(&RawSweep { axis: Some("uav_w".into()), start: Some(1.0), stop: Some(1.0), steps: Some(1) }).unwrap_err();
        assert_eq!(err.0.len(), 3);
        let err = validate_sweep(&RawSweep { axis: Some("uav_z".into()), start: Some(0.0), stop: Some(100.0), steps: Some(3) }).unwrap_err();
        assert_eq!(err.0[0].path, "sweep.start");
    }
}
