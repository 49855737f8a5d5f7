//! Outage probability by direct integration over `G_B` of the conditional
//! outage probability, with the `G_F` outage set located by bisection on
//! the decision logic alone.

mod common;

use aerial_noma_core::analytic::{evaluate, Evaluator};
use aerial_noma_core::channel::Environment;
use aerial_noma_core::quadrature::QuadratureConfig;
use aerial_noma_core::scheme::{classify, ChannelDraw, Event, Scheme, ThresholdSet};
use common::{fixture, offset_fixture, gamma_cdf_ref, gamma_pdf_ref, rel_err, tanh_sinh_tail_tol, tanh_sinh_tol, RATE_FIXTURES, UAV_Y_OFFSETS};

const TOL: f64 = 1e-11;
const MIN_STEP: f64 = 1.0 / 128.0;

fn outage(g_b: f64, g_f: f64, scheme: Scheme, t: &ThresholdSet) -> bool {
    classify(&ChannelDraw { g_b, g_f }, scheme, t) != Event::NoOutage
}

/// `Pr{outage | G_B = g_b}`.
fn conditional(g_b: f64, scheme: Scheme, t: &ThresholdSet) -> f64 {
    let lf = t.lambda_f;
    let mut grid: Vec<f64> = (0..=400).map(|k| 1e-12 / lf * 10f64.powf(k as f64 * 14.0 / 400.0)).collect();
    let h = t.theta_b() * g_b / (t.rho * g_b + 1.0);
    for hint in [g_b, h, t.eps0, t.eps2 * g_b / (g_b - t.eps1)] {
        if hint.is_finite() && hint > 0.0 {
            grid.extend([hint * (1.0 - 1e-9), hint, hint * (1.0 + 1e-9)]);
        }
    }
    grid.sort_by(f64::total_cmp);
    let flags: Vec<bool> = grid.iter().map(|&x| outage(g_b, x, scheme, t)).collect();

    let mut edges = Vec::new();
    for (w, f) in grid.windows(2).zip(flags.windows(2)) {
        if f[0] != f[1] {
            let (mut lo, mut hi) = (w[0], w[1]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if outage(g_b, mid, scheme, t) == f[0] {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            edges.push(0.5 * (lo + hi));
        }
    }

    let cdf = |x: f64| gamma_cdf_ref(x, lf, t.m);
    let mut p = 0.0;
    let mut start = 0.0;
    let mut inside = flags[0];
    for &e in &edges {
        if inside {
            p += cdf(e) - cdf(start);
        }
        start = e;
        inside = !inside;
    }
    if inside {
        p += 1.0 - cdf(start);
    }
    p
}

fn op_oracle(scheme: Scheme, t: &ThresholdSet) -> f64 {
    let lb = t.lambda_b;
    let f = |y: f64| gamma_pdf_ref(y, lb, t.m) * conditional(y, scheme, t);
    let mut cuts: Vec<f64> = [Some(t.eps0), t.eps3, t.eps5, t.eps6, t.eps7]
        .into_iter()
        .flatten()
        .filter(|&x| x > t.eps1)
        .collect();
    cuts.push(t.eps1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = gamma_cdf_ref(t.eps1, lb, t.m);
    for w in cuts.windows(2) {
        total += tanh_sinh_tol(f, w[0], w[1], TOL, MIN_STEP);
    }
    total + tanh_sinh_tail_tol(f, *cuts.last().unwrap(), lb, TOL, MIN_STEP)
}

#[test]
fn conditional_probability_limits() {
    let t = fixture(Environment::Suburban, 0.2, 2.0, 50.0).thresholds().unwrap();
    assert_eq!(conditional(0.5 * t.eps1, Scheme::Fpa, &t), 1.0);
    // Far above every threshold the weaker-GF region is the only outage set.
    let g_b = 1e3 * t.eps0;
    let (e3, e4) = (t.eps3.unwrap(), t.eps4.unwrap());
    let want = gamma_cdf_ref(e4 * g_b / (g_b - e3), t.lambda_f, t.m);
    assert!(rel_err(conditional(g_b, Scheme::Fpa, &t), want) < 1e-12);
}

#[test]
fn exact_op_matches_direct_integration() {
    let quad = QuadratureConfig::default();
    for env in [Environment::Suburban, Environment::Urban] {
        for (rb, rf) in RATE_FIXTURES {
            for rho_db in [30.0, 45.0, 60.0, 75.0, 85.0] {
                let p = fixture(env, rb, rf, rho_db);
                let t = p.thresholds().unwrap();
                for scheme in Scheme::ALL {
                    let exact = evaluate(&p, scheme, Evaluator::Exact, &quad).unwrap().total;
                    let want = op_oracle(scheme, &t);
                    assert!(
                        rel_err(exact, want) <= 1e-6,
                        "{env:?} ({rb},{rf}) {rho_db} dB {scheme}: exact {exact:e} oracle {want:e}"
                    );
                }
            }
        }
    }
}

#[test]
fn exact_op_matches_direct_integration_for_unequal_links() {
    let quad = QuadratureConfig::default();
    for env in [Environment::Suburban, Environment::Urban] {
        for (rb, rf) in RATE_FIXTURES {
            for rho_db in [45.0, 60.0, 85.0] {
                for y in UAV_Y_OFFSETS {
                    let p = offset_fixture(env, rb, rf, rho_db, y);
                    let t = p.thresholds().unwrap();
                    for scheme in Scheme::ALL {
                        let b = evaluate(&p, scheme, Evaluator::Exact, &quad).unwrap();
                        let want = op_oracle(scheme, &t);
                        assert!(
                            rel_err(b.total, want) <= 1e-6,
                            "{env:?} ({rb},{rf}) {rho_db} dB y={y} {scheme}: exact {:e} oracle {want:e}",
                            b.total
                        );
                        assert!(b.health_check(1e-9).is_ok(), "{env:?} ({rb},{rf}) {rho_db} dB y={y} {scheme}: {b:?}");
                    }
                }
            }
        }
    }
}
