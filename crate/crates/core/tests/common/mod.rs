//! Reference integrators shared by the integration and acceptance tests.
//!
//! Nothing here calls the crate's quadrature or special functions: the
//! integrand is rebuilt from the finite-sum form of `Q(m, q)` and
//! integrated with double-exponential (tanh-sinh) quadrature.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use aerial_noma_core::channel::{Environment, EtaScale, Geometry, GroundPoint, Position};
use aerial_noma_core::scheme::{RateConfig, ThresholdSet};
use aerial_noma_core::{Scenario, SystemParams};

/// `(R_th^B, R_th^F)` pairs: FPA without and with a floor, and DPA branch B.
pub const RATE_FIXTURES: [(f64, f64); 3] = [(0.2, 2.0), (0.5, 2.5), (0.2, 0.5)];

/// Nakagami `m = 2`, UAV at `(0, 0, 100)`, users at `(50, ∓50)`.
pub fn fixture_scenario(env: Environment, r_b: f64, r_f: f64, rho_db: f64) -> Scenario {
    let geometry = Geometry::new(
        Position { x: 0.0, y: 0.0, z: 100.0 },
        GroundPoint { x: 50.0, y: -50.0 },
        GroundPoint { x: 50.0, y: 50.0 },
    )
    .unwrap();
    let rates = RateConfig::new(r_b, r_f).unwrap();
    Scenario::new(geometry, env.into(), EtaScale::DbToLinear, 2, rates, rho_db).unwrap()
}

pub fn fixture(env: Environment, r_b: f64, r_f: f64, rho_db: f64) -> SystemParams {
    fixture_scenario(env, r_b, r_f, rho_db).system().unwrap()
}

/// UAV `y` offsets that make the two links unequal (`λ_F/λ_B` up to ~10³).
pub const UAV_Y_OFFSETS: [f64; 4] = [-200.0, -110.0, 150.0, 300.0];

/// [`fixture`] with the UAV moved to `(0, y, 100)`.
pub fn offset_fixture(env: Environment, r_b: f64, r_f: f64, rho_db: f64, y: f64) -> SystemParams {
    fixture_scenario(env, r_b, r_f, rho_db)
        .with_uav(Position { x: 0.0, y, z: 100.0 })
        .unwrap()
        .system()
        .unwrap()
}

/// `∫_a^b f` by tanh-sinh, halving the step until two levels agree to
/// `1e-15` relative.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    tanh_sinh_tol(f, a, b, 1e-15, 1.0 / 4096.0)
}

/// [`tanh_sinh`] with a relative tolerance and a minimum step.
pub fn tanh_sinh_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, min_step: f64) -> f64 {
    assert!(a < b, "empty interval [{a}, {b}]");
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let level = |h: f64| {
        let mut sum = FRAC_PI_2 * f(mid);
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u).exp();
            // Distance of the node from each endpoint, without cancellation.
            let d = half * 2.0 * e / (1.0 + e);
            let w = FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            if d == 0.0 || w == 0.0 || t > 7.0 {
                break;
            }
            let lo = a + d;
            let hi = b - d;
            let fl = if lo > a { f(lo) } else { 0.0 };
            let fh = if hi < b { f(hi) } else { 0.0 };
            sum += w * (fl + fh);
            k += 1;
        }
        sum * h * half
    };
    let mut prev = level(0.5);
    let mut h = 0.25;
    loop {
        let cur = level(h);
        if (cur - prev).abs() <= tol * cur.abs() || h < min_step {
            return cur;
        }
        prev = cur;
        h *= 0.5;
    }
}

/// `∫_c^∞ f` through `y = c + s/((1 − s)·scale)`; `scale` is the decay
/// rate of `f`.
pub fn tanh_sinh_tail<F: Fn(f64) -> f64>(f: F, c: f64, scale: f64) -> f64 {
    tanh_sinh_tail_tol(f, c, scale, 1e-15, 1.0 / 4096.0)
}

pub fn tanh_sinh_tail_tol<F: Fn(f64) -> f64>(f: F, c: f64, scale: f64, tol: f64, min_step: f64) -> f64 {
    tanh_sinh_tol(
        |s| {
            if s >= 1.0 {
                return 0.0;
            }
            let v = f(c + s / ((1.0 - s) * scale));
            if v == 0.0 {
                0.0
            } else {
                v / ((1.0 - s) * (1.0 - s) * scale)
            }
        },
        0.0,
        1.0,
        tol,
        min_step,
    )
}

/// `Q(m, q) = e^{−q} Σ_{k<m} q^k/k!` for integer `m`.
pub fn q_integer(m: u32, q: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..m {
        term *= q / k as f64;
        sum += term;
    }
    (-q).exp() * sum
}

/// `y^{m−1} e^{−λ_B y} Q(m, λ_F b y/(y − a))`, zero for `y ≤ a` when `b > 0`.
pub fn integrand_ref(y: f64, a: f64, b: f64, lambda_b: f64, lambda_f: f64, m: u32) -> f64 {
    if b != 0.0 && y <= a {
        return 0.0;
    }
    let q = if b == 0.0 { 0.0 } else { lambda_f * b * y / (y - a) };
    if !q.is_finite() {
        return 0.0;
    }
    y.powi(m as i32 - 1) * (-lambda_b * y).exp() * q_integer(m, q)
}

/// Where an integral is evaluated by the closed forms.
#[derive(Debug, Clone, Copy)]
pub enum Site {
    G1 { a: f64, b: f64, s: f64, t: f64 },
    G2 { a: f64, b: f64, c: f64 },
}

/// Every quadrature-evaluated integral used for `t`, by term name.
pub fn call_sites(t: &ThresholdSet) -> Vec<(&'static str, Site)> {
    let (a, b) = (-1.0 / t.rho, t.theta_b() / t.rho);
    let mut out = vec![("Phi1", Site::G1 { a: t.eps1, b: t.eps2, s: t.eps1, t: t.eps0 })];
    if let (Some(e3), Some(e4), Some(e5)) = (t.eps3, t.eps4, t.eps5) {
        out.push(("Phi4", Site::G2 { a: e3, b: e4, c: e5 }));
        out.push(("chi5", Site::G1 { a, b, s: t.eps1, t: e3 }));
    }
    match (t.eps6, t.eps7) {
        (Some(e6), Some(e7)) => {
            out.push(("g1_eps6", Site::G1 { a, b, s: t.eps1, t: e6 }));
            out.push(("g2_eps6", Site::G2 { a: t.eps3.unwrap(), b: t.eps4.unwrap(), c: e6 }));
            out.push(("g1_eps7", Site::G1 { a, b, s: t.eps1, t: e7 }));
        }
        _ => out.push(("Phi5", Site::G2 { a, b, c: t.eps1 })),
    }
    out
}

/// Reference value of a call site.
pub fn site_ref(site: Site, lambda_b: f64, lambda_f: f64, m: u32) -> f64 {
    match site {
        Site::G1 { a, b, s, t } => tanh_sinh(|y| integrand_ref(y, a, b, lambda_b, lambda_f, m), s, t),
        Site::G2 { a, b, c } => tanh_sinh_tail(|y| integrand_ref(y, a, b, lambda_b, lambda_f, m), c, lambda_b),
    }
}

/// Relative error with a floor for values at round-off level.
pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

/// `Pr{G ≤ x}` for `G ~ Gamma(m, rate λ)`, by the Poisson tail for small
/// arguments and the finite sum otherwise.
pub fn gamma_cdf_ref(x: f64, lambda: f64, m: u32) -> f64 {
    let z = lambda * x;
    if z <= 0.0 {
        return 0.0;
    }
    if z < m as f64 {
        let mut term = (-z).exp();
        for k in 1..=m {
            term *= z / k as f64;
        }
        let mut sum = 0.0;
        let mut k = m;
        while term > 1e-18 * sum || sum == 0.0 {
            sum += term;
            k += 1;
            term *= z / k as f64;
            if term == 0.0 {
                break;
            }
        }
        sum
    } else {
        1.0 - q_integer(m, z)
    }
}

pub fn gamma_pdf_ref(x: f64, lambda: f64, m: u32) -> f64 {
    let ln_fact: f64 = (2..m).map(|k| (k as f64).ln()).sum();
    (m as f64 * lambda.ln() + (m as f64 - 1.0) * x.ln() - lambda * x - ln_fact).exp()
}
