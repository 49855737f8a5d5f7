//! Point evaluation, sweeps and their CSV/JSON output.
//!
//! # CSV columns
//!
//! One row per axis value per scheme, ordered by axis value, then FPA
//! before DPA. The header is fixed; evaluators that were not requested or
//! failed leave their cells empty.
//!
//! | column | meaning |
//! |---|---|
//! | `axis`, `value` | swept parameter and its value |
//! | `rho_db`, `uav_x`, `uav_y`, `uav_z`, `r_th_b`, `r_th_f` | the resolved point |
//! | `lambda_b`, `lambda_f` | Gamma rates of the two links |
//! | `scheme`, `branch` | `fpa`/`dpa` and the closed-form branch |
//! | `status`, `error` | `ok`, `invalid` or `unhealthy`, with the reason |
//! | `op_exact`, `op_asym`, `op_mc` | outage probability per evaluator (raw, not clamped) |
//! | `mc_std_err`, `mc_trials`, `mc_seed` | Monte Carlo uncertainty and provenance |
//! | `T0_exact` … `T3_exact`, `T0_asym` … `T3_asym` | summands; absent ones empty |
//! | `chi1` … `chi6`, `Phi1` … `Phi6` | exact intermediates |
//! | `mc_gb_blocked` … `mc_no_outage` | Monte Carlo outcome counts |
//!
//! Floats use the shortest representation that round-trips.

use std::io::Write;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use aerial_noma_core::analytic::{evaluate, Evaluator, OutageBreakdown, CHI_NAMES, HEALTH_SLACK, PHI_NAMES, SUMMAND_NAMES};
use aerial_noma_core::channel::Position;
use aerial_noma_core::montecarlo::SimResult;
use aerial_noma_core::scheme::{RateConfig, Scheme};
use aerial_noma_core::{Error as CoreError, Scenario};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{boundary_issues, Axis, Issues, RawConfig, RunConfig, SweepSpec};
use crate::sim;

/// Outcome of one scheme at one point.
#[derive(Debug, Clone)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub exact: Option<OutageBreakdown>,
    pub asym: Option<OutageBreakdown>,
    pub mc: Option<SimResult>,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// An evaluator failed.
    Invalid,
    /// An exact term left `[0, 1]` beyond the health slack.
    Unhealthy,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Invalid => "invalid",
            Status::Unhealthy => "unhealthy",
        }
    }
}

impl SchemeResult {
    pub fn branch(&self) -> Option<&'static str> {
        self.exact.as_ref().or(self.asym.as_ref()).map(|b| b.branch.name())
    }
}

/// Runs every requested evaluator for `scheme` at `scenario`.
pub fn evaluate_scheme(scenario: &Scenario, scheme: Scheme, run: &RunConfig) -> SchemeResult {
    let mut out = SchemeResult { scheme, exact: None, asym: None, mc: None, status: Status::Ok, error: None };
    let mut errors = Vec::new();
    let params = match scenario.system() {
        Ok(p) => p,
        Err(e) => {
            out.status = Status::Invalid;
            out.error = Some(e.to_string());
            return out;
        }
    };
    for ev in run.evaluators.analytic() {
        match evaluate(&params, scheme, ev, &run.quad) {
            Ok(b) => {
                if let Err(e) = b.health_check(HEALTH_SLACK) {
                    out.status = Status::Unhealthy;
                    errors.push(format!("{}: {e}", ev.name()));
                }
                match ev {
                    Evaluator::Exact => out.exact = Some(b),
                    Evaluator::Asymptotic => out.asym = Some(b),
                }
            }
            Err(e) => {
                out.status = Status::Invalid;
                errors.push(format!("{}: {e}", ev.name()));
            }
        }
    }
    if run.evaluators.mc {
        match sim::estimate_op(&params, scheme, &run.mc) {
            Ok(r) => out.mc = Some(r),
            Err(e) => {
                out.status = Status::Invalid;
                errors.push(format!("mc: {e}"));
            }
        }
    }
    if !errors.is_empty() {
        out.error = Some(errors.join("; "));
    }
    out
}

/// One CSV row.
#[derive(Debug, Clone)]
pub struct Row {
    pub axis: Axis,
    pub value: f64,
    pub point: Option<Scenario>,
    pub result: SchemeResult,
}

/// `base` with the swept parameter set to `value`.
pub fn point(base: &Scenario, axis: Axis, value: f64) -> Result<Scenario, CoreError> {
    let uav = base.geometry().uav();
    match axis {
        Axis::RhoDb => base.with_rho_db(value),
        Axis::UavY => base.with_uav(Position { y: value, ..uav }),
        Axis::UavZ => base.with_uav(Position { z: value, ..uav }),
        Axis::RThB => Ok(base.with_rates(RateConfig::new(value, base.rates().r_th_f())?)),
        Axis::RThF => Ok(base.with_rates(RateConfig::new(base.rates().r_th_b(), value)?)),
    }
}

/// Rejects sweeps that cross a branch boundary exactly, naming the rows.
pub fn check_rows(run: &RunConfig, spec: &SweepSpec) -> Result<(), Issues> {
    let mut issues = Issues::default();
    for (i, v) in spec.values().into_iter().enumerate() {
        if let Ok(s) = point(&run.scenario, spec.axis, v) {
            boundary_issues(&mut issues, &format!("sweep row {i} ({} = {v})", spec.axis.name()), s.rates(), &run.schemes);
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

/// Evaluates every point of `spec`, in parallel, returning rows in axis
/// order.
pub fn run_sweep(run: &RunConfig, spec: &SweepSpec) -> Result<Vec<Row>, Issues> {
    check_rows(run, spec)?;
    let values = spec.values();
    let rows = values
        .par_iter()
        .map(|&v| {
            let point = point(&run.scenario, spec.axis, v);
            run.schemes
                .iter()
                .map(|&scheme| match &point {
                    Ok(p) => Row { axis: spec.axis, value: v, point: Some(*p), result: evaluate_scheme(p, scheme, run) },
                    Err(e) => Row {
                        axis: spec.axis,
                        value: v,
                        point: None,
                        result: SchemeResult {
                            scheme,
                            exact: None,
                            asym: None,
                            mc: None,
                            status: Status::Invalid,
                            error: Some(e.to_string()),
                        },
                    },
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    Ok(rows.into_iter().flatten().collect())
}

/// Header of the sweep CSV.
pub fn columns() -> Vec<String> {
    let mut cols: Vec<String> = [
        "axis", "value", "rho_db", "uav_x", "uav_y", "uav_z", "r_th_b", "r_th_f", "lambda_b", "lambda_f", "scheme",
        "branch", "status", "error", "op_exact", "op_asym", "op_mc", "mc_std_err", "mc_trials", "mc_seed",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    for suffix in ["exact", "asym"] {
        cols.extend(SUMMAND_NAMES.iter().map(|t| format!("{t}_{suffix}")));
    }
    cols.extend(CHI_NAMES.iter().map(|s| s.to_string()));
    cols.extend(PHI_NAMES.iter().map(|s| s.to_string()));
    cols.extend(
        ["mc_gb_blocked", "mc_case1_outage", "mc_case2_outage", "mc_case3_outage", "mc_no_outage"].map(String::from),
    );
    cols
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn row_cells(row: &Row) -> Vec<String> {
    let r = &row.result;
    let sys = row.point.as_ref().and_then(|p| p.system().ok());
    let uav = row.point.as_ref().map(|p| p.geometry().uav());
    let mut cells = vec![
        row.axis.name().to_string(),
        num(row.value),
        opt(row.point.as_ref().map(|p| p.rho_db())),
        opt(uav.map(|u| u.x)),
        opt(uav.map(|u| u.y)),
        opt(uav.map(|u| u.z)),
        opt(row.point.as_ref().map(|p| p.rates().r_th_b())),
        opt(row.point.as_ref().map(|p| p.rates().r_th_f())),
        opt(sys.map(|s| s.lambda_b)),
        opt(sys.map(|s| s.lambda_f)),
        r.scheme.name().to_string(),
        r.branch().unwrap_or_default().to_string(),
        r.status.name().to_string(),
        r.error.clone().unwrap_or_default(),
        opt(r.exact.as_ref().map(|b| b.total)),
        opt(r.asym.as_ref().map(|b| b.total)),
        opt(r.mc.map(|m| m.op_hat)),
        opt(r.mc.map(|m| m.std_err)),
        r.mc.map(|m| m.trials.to_string()).unwrap_or_default(),
        r.mc.map(|m| m.seed.to_string()).unwrap_or_default(),
    ];
    for b in [&r.exact, &r.asym] {
        cells.extend(SUMMAND_NAMES.iter().map(|t| opt(b.as_ref().and_then(|b| b.get(t)))));
    }
    for names in [&CHI_NAMES, &PHI_NAMES] {
        cells.extend(names.iter().map(|t| opt(r.exact.as_ref().and_then(|b| b.get(t)))));
    }
    match r.mc.and_then(|m| m.events) {
        Some(e) => cells.extend(
            [e.gb_blocked, e.case1_outage, e.case2_outage, e.case3_outage, e.no_outage].map(|n| n.to_string()),
        ),
        None => cells.extend(std::iter::repeat_n(String::new(), 5)),
    }
    cells
}

/// Writes the header and every row.
pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns())?;
    for row in rows {
        w.write_record(row_cells(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Machine-readable record of a sweep run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// Fully resolved input; can be passed back with `--config`.
    pub config: RawConfig,
    pub sweep: SweepSpec,
    pub seed: u64,
    pub workers: u32,
    pub columns: Vec<String>,
    pub rows: usize,
    pub invalid_rows: usize,
    pub unhealthy_rows: usize,
    pub csv: Option<String>,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
}

/// Timer for the manifest.
pub struct Clock {
    started: SystemTime,
    instant: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Self { started: SystemTime::now(), instant: Instant::now() }
    }
}

impl Manifest {
    pub fn new(run: &RunConfig, spec: &SweepSpec, rows: &[Row], csv: Option<String>, clock: &Clock) -> Self {
        let count = |s: Status| rows.iter().filter(|r| r.result.status == s).count();
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: "sweep",
            config: run.raw.clone(),
            sweep: *spec,
            seed: run.mc.seed,
            workers: run.mc.workers,
            columns: columns(),
            rows: rows.len(),
            invalid_rows: count(Status::Invalid),
            unhealthy_rows: count(Status::Unhealthy),
            csv,
            started_unix_s: clock.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            wall_clock_s: clock.instant.elapsed().as_secs_f64(),
        }
    }
}
