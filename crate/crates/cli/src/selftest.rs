//! Built-in oracle-agreement checks for the `selftest` verb.
//!
//! Each check compares two independent routes to the same number on the
//! reference deployment and reports PASS/FAIL.

use aerial_noma_core::analytic::{evaluate, fpa_floor_constant, g1, g2, g_integrand, Evaluator, HEALTH_SLACK};
use aerial_noma_core::channel::Environment;
use aerial_noma_core::quadrature::{adaptive_gk15, adaptive_tail, QuadratureConfig};
use aerial_noma_core::scheme::{RateConfig, Scheme};
use aerial_noma_core::special::{regularized_lower, regularized_upper};
use aerial_noma_core::{Result as CoreResult, Scenario, SystemParams};

use crate::config::{McSettings, RunConfig};
use crate::sim;

/// Rate pairs covering every closed-form branch.
pub const RATE_PAIRS: [(f64, f64); 3] = [(0.2, 2.0), (0.5, 2.5), (0.2, 0.5)];

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn fixture(base: &Scenario, env: Environment, rb: f64, rf: f64, rho_db: f64) -> CoreResult<SystemParams> {
    let s = Scenario::new(*base.geometry(), env.into(), base.eta_scale(), base.m(), RateConfig::new(rb, rf)?, rho_db)?;
    s.system()
}

fn check_special() -> Check {
    let mut worst = 0.0f64;
    for s in 1..=10u32 {
        for k in 0..=40 {
            let x = 1e-3 * 5e4f64.powf(k as f64 / 40.0);
            let sum = regularized_lower(s, x).unwrap_or(f64::NAN) + regularized_upper(s, x).unwrap_or(f64::NAN);
            worst = worst.max((sum - 1.0).abs());
        }
    }
    Check::new("incomplete gamma partition", worst <= 1e-14, format!("max |P + Q - 1| = {worst:.1e}"))
}

fn check_quadrature(base: &Scenario) -> Check {
    let quad = QuadratureConfig::default().with_chebyshev(200).and_then(|q| q.with_laguerre(200));
    let mut worst = 0.0f64;
    let mut failure = None;
    for (rb, rf) in RATE_PAIRS {
        for rho_db in [30.0, 60.0, 85.0] {
            let r = (|| -> CoreResult<f64> {
                let quad = quad.clone()?;
                let p = fixture(base, Environment::Suburban, rb, rf, rho_db)?;
                let t = p.thresholds()?;
                let law = p.law();
                let mut err = 0.0f64;
                let (a, b) = (-1.0 / t.rho, t.theta_b() / t.rho);
                let f1 = |a: f64, b: f64, s: f64, u: f64| -> CoreResult<f64> {
                    let want = adaptive_gk15(|y| g_integrand(y, a, b, &law), s, u, 1e-12, 0.0)?.value;
                    Ok((g1(a, b, s, u, &law, &quad)? - want).abs() / want)
                };
                let f2 = |a: f64, b: f64, c: f64| -> CoreResult<f64> {
                    let want = adaptive_tail(|y| g_integrand(y, a, b, &law), c, law.lambda_b, 1e-12)?.value;
                    Ok((g2(a, b, c, &law, &quad)? - want).abs() / want)
                };
                err = err.max(f1(t.eps1, t.eps2, t.eps1, t.eps0)?);
                err = err.max(match t.eps6 {
                    None => f2(a, b, t.eps1)?,
                    Some(e6) => f1(a, b, t.eps1, e6)?,
                });
                Ok(err)
            })();
            match r {
                Ok(e) => worst = worst.max(e),
                Err(e) => failure = Some(e.to_string()),
            }
        }
    }
    match failure {
        Some(e) => Check::new("quadrature vs adaptive oracle", false, e),
        None => Check::new("quadrature vs adaptive oracle", worst <= 1e-6, format!("max rel err {worst:.1e} at N = 200")),
    }
}

fn check_monte_carlo(run: &RunConfig) -> Check {
    let quad = QuadratureConfig::default();
    let mc = McSettings { trials: run.mc.trials, seed: run.mc.seed, workers: run.mc.workers };
    let mut worst = 0.0f64;
    for (rb, rf) in RATE_PAIRS {
        for rho_db in [40.0, 55.0] {
            for scheme in Scheme::ALL {
                let z = (|| -> CoreResult<f64> {
                    let p = fixture(&run.scenario, Environment::Suburban, rb, rf, rho_db)?;
                    let exact = evaluate(&p, scheme, Evaluator::Exact, &quad)?.total;
                    let r = sim::estimate_op(&p, scheme, &mc)?;
                    Ok(r.z_score(exact))
                })();
                worst = worst.max(z.unwrap_or(f64::INFINITY));
            }
        }
    }
    // Twelve comparisons: 4σ keeps the false-alarm rate below 0.1%.
    Check::new("exact vs Monte Carlo", worst <= 4.0, format!("max |z| = {worst:.2} ({} trials)", mc.trials))
}

fn check_grid(base: &Scenario) -> Vec<Check> {
    let quad = QuadratureConfig::default();
    let mut unhealthy = Vec::new();
    let mut dominance = 0.0f64;
    for env in [Environment::Suburban, Environment::Urban] {
        for (rb, rf) in RATE_PAIRS {
            for k in 0..12 {
                let rho_db = 30.0 + 5.0 * k as f64;
                let totals: CoreResult<Vec<f64>> = (|| {
                    let p = fixture(base, env, rb, rf, rho_db)?;
                    Scheme::ALL
                        .iter()
                        .map(|&s| {
                            let b = evaluate(&p, s, Evaluator::Exact, &quad)?;
                            b.health_check(HEALTH_SLACK)?;
                            Ok(b.total)
                        })
                        .collect()
                })();
                match totals {
                    Ok(t) => dominance = dominance.max(t[1] - t[0]),
                    Err(e) => unhealthy.push(format!("{} ({rb},{rf}) {rho_db} dB: {e}", env.name())),
                }
            }
        }
    }
    vec![
        Check::new(
            "exact terms within [0, 1]",
            unhealthy.is_empty(),
            unhealthy.first().cloned().unwrap_or_else(|| "72 points x 2 schemes".into()),
        ),
        Check::new("DPA <= FPA", dominance <= 1e-6, format!("max DPA - FPA = {dominance:.1e}")),
    ]
}

fn check_floor(base: &Scenario) -> Check {
    let r = (|| -> CoreResult<(f64, f64)> {
        let p = fixture(base, Environment::Suburban, 0.5, 2.5, 120.0)?;
        let op = evaluate(&p, Scheme::Fpa, Evaluator::Exact, &QuadratureConfig::default())?.total;
        Ok((op, fpa_floor_constant(&p)?))
    })();
    match r {
        Ok((op, c)) => {
            let rel = (op - c).abs() / c;
            Check::new("FPA floor constant", rel <= 1e-2, format!("OP(120 dB) = {op:.6e}, constant = {c:.6e}"))
        }
        Err(e) => Check::new("FPA floor constant", false, e.to_string()),
    }
}

/// Runs every check; Monte Carlo settings come from `run`.
pub fn run_all(run: &RunConfig) -> Vec<Check> {
    let mut checks = vec![check_special(), check_quadrature(&run.scenario), check_floor(&run.scenario)];
    checks.extend(check_grid(&run.scenario));
    checks.push(check_monte_carlo(run));
    checks
}
