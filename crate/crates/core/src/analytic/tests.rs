use super::*;
use crate::channel::{gain_cdf, Environment, EtaScale, Geometry, GroundPoint, Position};
use crate::quadrature::QuadratureRule;
use crate::scheme::RateConfig;
use crate::Scenario;
use approx::assert_relative_eq;

fn params(env: Environment, rb: f64, rf: f64, rho_db: f64) -> SystemParams {
    let g = Geometry::new(
        Position { x: 0.0, y: 0.0, z: 100.0 },
        GroundPoint { x: 50.0, y: -50.0 },
        GroundPoint { x: 50.0, y: 50.0 },
    )
    .unwrap();
    Scenario::new(g, env.into(), EtaScale::DbToLinear, 2, RateConfig::new(rb, rf).unwrap(), rho_db)
        .unwrap()
        .system()
        .unwrap()
}

const FIXTURES: [(f64, f64); 3] = [(0.2, 2.0), (0.5, 2.5), (0.2, 0.5)];

#[test]
fn totals_reconstruct_from_summands() {
    let q = QuadratureConfig::default();
    for (rb, rf) in FIXTURES {
        for rho_db in [30.0, 55.0, 85.0] {
            let p = params(Environment::Suburban, rb, rf, rho_db);
            for scheme in Scheme::ALL {
                for ev in [Evaluator::Exact, Evaluator::Asymptotic] {
                    let b = evaluate(&p, scheme, ev, &q).unwrap();
                    assert!((b.total - b.reconstruct()).abs() <= 1e-12);
                    let names: Vec<_> = b.summands().map(|t| t.name).collect();
                    match scheme {
                        Scheme::Fpa => assert_eq!(names, ["T0", "T11", "T12"]),
                        Scheme::Dpa => assert_eq!(names, ["T0", "T11", "T2", "T3"]),
                    }
                }
            }
        }
    }
}

#[test]
fn branches_follow_rate_targets() {
    let q = QuadratureConfig::default();
    let p = params(Environment::Suburban, 0.2, 2.0, 40.0);
    assert_eq!(op_fpa_exact(&p, &q).unwrap().branch, Branch::Fpa(FpaBranch::NoFloor));
    assert_eq!(op_dpa_exact(&p, &q).unwrap().branch, Branch::Dpa(DpaBranch::A));
    let p = params(Environment::Suburban, 0.5, 2.5, 40.0);
    assert_eq!(op_fpa_exact(&p, &q).unwrap().branch, Branch::Fpa(FpaBranch::Floor));
    let p = params(Environment::Suburban, 0.2, 0.5, 40.0);
    assert_eq!(op_dpa_asymptotic(&p).unwrap().branch, Branch::Dpa(DpaBranch::B));
}

#[test]
fn t0_is_the_gb_cdf() {
    let q = QuadratureConfig::default();
    let p = params(Environment::Urban, 0.2, 2.0, 45.0);
    let t = p.thresholds().unwrap();
    let b = op_fpa_exact(&p, &q).unwrap();
    assert_eq!(b.get("T0").unwrap(), gain_cdf(t.eps1, p.lambda_b, 2).unwrap());
    let a = op_fpa_asymptotic(&p).unwrap();
    assert_relative_eq!(a.get("T0").unwrap(), (p.lambda_b * t.eps1).powi(2) / 2.0, max_relative = 1e-14);
}

#[test]
fn dpa_asymptotic_t2_transcription() {
    let p = params(Environment::Suburban, 0.5, 2.5, 70.0);
    let t = p.thresholds().unwrap();
    let b = op_dpa_asymptotic(&p).unwrap();
    let expected = (p.lambda_f * t.theta_b() / t.rho).powi(2) / 2.0 * (1.0 - (t.eps1 * p.lambda_b).powi(2) / 2.0);
    assert_relative_eq!(b.get("T2").unwrap(), expected, max_relative = 1e-14);
}

#[test]
fn floor_constant_is_probability_gf_weaker() {
    // Symmetric links: Pr{G_F < G_B} = 1/2.
    let p = params(Environment::Suburban, 0.5, 2.5, 60.0);
    assert_relative_eq!(fpa_floor_constant(&p).unwrap(), 0.5, max_relative = 1e-14);
    // m = 1: Pr{G_F < G_B} = λ_F/(λ_B + λ_F).
    let r = RateConfig::new(0.5, 2.5).unwrap();
    let p = SystemParams::new(3.0, 5.0, 1, r, 1e4).unwrap();
    assert_relative_eq!(fpa_floor_constant(&p).unwrap(), 5.0 / 8.0, max_relative = 1e-14);
}

#[test]
fn diversity_orders() {
    let p = params(Environment::Suburban, 0.2, 2.0, 40.0);
    assert_eq!(diversity_order(&p, Scheme::Fpa).unwrap(), 2);
    assert_eq!(diversity_order(&p, Scheme::Dpa).unwrap(), 2);
    let p = params(Environment::Suburban, 0.5, 2.5, 40.0);
    assert_eq!(diversity_order(&p, Scheme::Fpa).unwrap(), 0);
    assert_eq!(diversity_order(&p, Scheme::Dpa).unwrap(), 2);
}

#[test]
fn boundary_pairs_are_rejected() {
    let q = QuadratureConfig::default();
    let r = RateConfig::new(1.0, 1.0).unwrap();
    let p = SystemParams::new(1e3, 1e3, 2, r, 1e5).unwrap();
    for scheme in Scheme::ALL {
        assert!(matches!(
            evaluate(&p, scheme, Evaluator::Exact, &q),
            Err(Error::BoundaryEquality { .. })
        ));
        assert!(matches!(diversity_order(&p, scheme), Err(Error::BoundaryEquality { .. })));
    }
}

#[test]
fn exact_terms_are_healthy_on_the_fixture_grid() {
    let q = QuadratureConfig::default();
    for env in [Environment::Suburban, Environment::Urban] {
        for (rb, rf) in FIXTURES {
            for k in 0..12 {
                let p = params(env, rb, rf, 30.0 + 5.0 * k as f64);
                for scheme in Scheme::ALL {
                    let b = evaluate(&p, scheme, Evaluator::Exact, &q).unwrap();
                    b.health_check(HEALTH_SLACK).unwrap_or_else(|e| panic!("{env:?} {rb} {rf} {k} {scheme}: {e}"));
                }
            }
        }
    }
}

#[test]
fn dpa_never_exceeds_fpa() {
    let q = QuadratureConfig::default();
    for (rb, rf) in FIXTURES {
        for k in 0..12 {
            let p = params(Environment::Suburban, rb, rf, 30.0 + 5.0 * k as f64);
            let f = op_fpa_exact(&p, &q).unwrap().total;
            let d = op_dpa_exact(&p, &q).unwrap().total;
            assert!(d <= f + 1e-6, "{rb} {rf} {k}: dpa {d} fpa {f}");
        }
    }
}

#[test]
fn chi6_completes_t2() {
    let q = QuadratureConfig::default();
    let p = params(Environment::Suburban, 0.2, 0.5, 50.0);
    let b = op_dpa_exact(&p, &q).unwrap();
    let sum = b.get("chi5").unwrap() + b.get("chi6").unwrap();
    assert_eq!(sum, b.get("T2").unwrap());
    let floor = op_dpa_exact(&params(Environment::Suburban, 0.5, 2.5, 50.0), &q).unwrap();
    assert!(floor.get("chi5").is_none());
}

#[test]
fn phi1_self_convergence() {
    let q = QuadratureConfig::default();
    for rho_db in [40.0, 60.0, 80.0] {
        let p = params(Environment::Suburban, 0.2, 2.0, rho_db);
        let t = p.thresholds().unwrap();
        let at = |n| g1(t.eps1, t.eps2, t.eps1, t.eps0, &p.law(), &q.with_chebyshev(n).unwrap()).unwrap();
        let (a, b) = (at(200), at(400));
        assert!((a - b).abs() <= 1e-6 * b.abs(), "{rho_db}: {a} vs {b}");
    }
}

#[test]
fn literal_rule_is_close_to_refined() {
    let refined = QuadratureConfig::new(200, 64, QuadratureRule::Refined).unwrap();
    let literal = QuadratureConfig::new(200, 64, QuadratureRule::Plain).unwrap();
    for (rb, rf) in FIXTURES {
        let p = params(Environment::Suburban, rb, rf, 40.0);
        for scheme in Scheme::ALL {
            let a = evaluate(&p, scheme, Evaluator::Exact, &refined).unwrap().total;
            let b = evaluate(&p, scheme, Evaluator::Exact, &literal).unwrap().total;
            assert!((a - b).abs() <= 1e-3 * a, "{rb} {rf} {scheme}: {a} vs {b}");
        }
    }
}

#[test]
fn health_check_flags_excursions() {
    let mut b = OutageBreakdown::new(Scheme::Fpa, Evaluator::Exact, Branch::Fpa(FpaBranch::NoFloor));
    b.summand("T0", 0.5);
    b.summand("T11", -1e-3);
    let b = b.finish();
    assert!(matches!(b.health_check(HEALTH_SLACK), Err(Error::NumericalHealth { term: "T11", .. })));
    assert_eq!(b.total_clamped(), b.total);
}
