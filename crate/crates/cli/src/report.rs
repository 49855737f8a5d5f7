//! Single-scenario evaluation output for the `eval` verb.

use std::fmt::Write as _;

use aerial_noma_core::analytic::{OutageBreakdown, TermRole};
use aerial_noma_core::channel::UserRole;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::sweep::{evaluate_scheme, SchemeResult, Status};

/// Evaluates every selected scheme at the configured scenario.
pub fn eval(run: &RunConfig) -> Vec<SchemeResult> {
    run.schemes.iter().map(|&s| evaluate_scheme(&run.scenario, s, run)).collect()
}

/// Worst status over all schemes.
pub fn worst(results: &[SchemeResult]) -> Status {
    if results.iter().any(|r| r.status == Status::Invalid) {
        Status::Invalid
    } else if results.iter().any(|r| r.status == Status::Unhealthy) {
        Status::Unhealthy
    } else {
        Status::Ok
    }
}

fn role(r: TermRole) -> &'static str {
    match r {
        TermRole::Summand => "summand",
        TermRole::Probability => "probability",
        TermRole::Auxiliary => "auxiliary",
    }
}

fn breakdown_json(b: &OutageBreakdown) -> Value {
    json!({
        "branch": b.branch.name(),
        "total": b.total,
        "terms": b.terms.iter().map(|t| json!({"name": t.name, "value": t.value, "role": role(t.role)})).collect::<Vec<_>>(),
    })
}

pub fn to_json(run: &RunConfig, results: &[SchemeResult]) -> Value {
    let s = &run.scenario;
    let link = |role| s.link(role).ok().map(|l| json!({"distance": l.distance, "p_los": l.p_los, "alpha": l.alpha, "g_bar": l.g_bar, "lambda": l.lambda}));
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": run.raw,
        "links": {"gb": link(UserRole::GrantBased), "gf": link(UserRole::GrantFree)},
        "results": results.iter().map(|r| json!({
            "scheme": r.scheme.name(),
            "branch": r.branch(),
            "status": r.status.name(),
            "error": r.error,
            "exact": r.exact.as_ref().map(breakdown_json),
            "asymptotic": r.asym.as_ref().map(breakdown_json),
            "mc": r.mc.map(|m| json!({
                "op_hat": m.op_hat, "std_err": m.std_err, "trials": m.trials, "seed": m.seed,
                "events": m.events.map(|e| json!({
                    "gb_blocked": e.gb_blocked, "case1_outage": e.case1_outage, "case2_outage": e.case2_outage,
                    "case3_outage": e.case3_outage, "no_outage": e.no_outage,
                })),
            })),
        })).collect::<Vec<_>>(),
    })
}

/// Plain-text breakdown.
pub fn to_text(run: &RunConfig, results: &[SchemeResult]) -> String {
    let s = &run.scenario;
    let u = s.geometry().uav();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} m={} rho={} dB r_th_b={} r_th_f={} uav=({}, {}, {})",
        s.env().kind().name(),
        s.m(),
        s.rho_db(),
        s.rates().r_th_b(),
        s.rates().r_th_f(),
        u.x,
        u.y,
        u.z
    );
    for (name, role) in [("gb", UserRole::GrantBased), ("gf", UserRole::GrantFree)] {
        if let Ok(l) = s.link(role) {
            let _ = writeln!(out, "  {name}: d={:.3} m  P_LoS={:.6}  alpha={:.6}  lambda={:.6e}", l.distance, l.p_los, l.alpha, l.lambda);
        }
    }
    for r in results {
        let _ = writeln!(out, "\n[{}] branch={} status={}", r.scheme, r.branch().unwrap_or("-"), r.status.name());
        if let Some(e) = &r.error {
            let _ = writeln!(out, "  error: {e}");
        }
        for (label, b) in [("exact", &r.exact), ("asymptotic", &r.asym)] {
            if let Some(b) = b {
                let _ = writeln!(out, "  {label:<11}{:.6e}", b.total);
                for t in &b.terms {
                    let _ = writeln!(out, "    {:<9}{:>14.6e}  {}", t.name, t.value, role(t.role));
                }
            }
        }
        if let Some(m) = r.mc {
            let _ = writeln!(out, "  {:<11}{:.6e} ± {:.2e}  ({} trials, seed {})", "mc", m.op_hat, m.std_err, m.trials, m.seed);
        }
    }
    out
}
