use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aerial_noma::config::{validate_scenario, validate_sweep, Issues, Overlay, RawConfig, RawPoint3, RawSweep};
use aerial_noma::sweep::{check_rows, run_sweep, write_csv, Clock, Manifest, Status};
use aerial_noma::{report, selftest, ExitStatus};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

/// Outage analysis of UAV-served semi-grant-free NOMA.
#[derive(Debug, Parser)]
#[command(name = "aerial-noma", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one scenario and print the per-term breakdown.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Sweep one parameter and write CSV plus a JSON manifest.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Check a configuration and print the resolved form.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the built-in oracle-agreement checks.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config file (JSON if it ends in .json; sweep manifests are accepted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// fpa, dpa or both.
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated subset of exact, asym, mc.
    #[arg(long, value_delimiter = ',')]
    evaluators: Option<Vec<String>>,
    /// Monte Carlo trials per point and scheme.
    #[arg(long)]
    trials: Option<i64>,
    /// Monte Carlo seed, shared by every row and both schemes.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo RNG streams; with the seed it fixes the output.
    #[arg(long)]
    workers: Option<i64>,
    /// Gauss-Chebyshev nodes.
    #[arg(long = "quad-n")]
    quad_n: Option<i64>,
    /// Gauss-Laguerre nodes.
    #[arg(long = "laguerre-n")]
    laguerre_n: Option<i64>,
    /// refined or plain.
    #[arg(long = "quad-rule")]
    quad_rule: Option<String>,
    /// suburban, urban, dense-urban, high-rise or custom.
    #[arg(long)]
    env: Option<String>,
    /// db->linear or raw.
    #[arg(long = "eta-scale")]
    eta_scale: Option<String>,
    /// Nakagami fading parameter.
    #[arg(long)]
    m: Option<i64>,
    /// Transmit SNR in dB.
    #[arg(long = "rho-db", allow_hyphen_values = true)]
    rho_db: Option<f64>,
    /// Target rate of the grant-based user, bit/s/Hz.
    #[arg(long = "r-th-b")]
    r_th_b: Option<f64>,
    /// Target rate of the grant-free user, bit/s/Hz.
    #[arg(long = "r-th-f")]
    r_th_f: Option<f64>,
    /// UAV position in metres.
    #[arg(long = "uav-x", allow_hyphen_values = true)]
    uav_x: Option<f64>,
    #[arg(long = "uav-y", allow_hyphen_values = true)]
    uav_y: Option<f64>,
    #[arg(long = "uav-z", allow_hyphen_values = true)]
    uav_z: Option<f64>,
    /// Output file (CSV for sweep, JSON for eval).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// rho_db, uav_y, uav_z, r_th_b or r_th_f.
    #[arg(long)]
    axis: Option<String>,
    /// First value (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    /// Last value (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<f64>,
    /// Number of points, at least 2.
    #[arg(long)]
    steps: Option<i64>,
}

impl Common {
    fn flags(&self) -> RawConfig {
        let mut raw = RawConfig {
            scheme: self.scheme.clone(),
            evaluators: self.evaluators.clone(),
            ..Default::default()
        };
        raw.montecarlo.trials = self.trials;
        raw.montecarlo.seed = self.seed;
        raw.montecarlo.workers = self.workers;
        raw.quadrature.n_chebyshev = self.quad_n;
        raw.quadrature.n_laguerre = self.laguerre_n;
        raw.quadrature.rule = self.quad_rule.clone();
        raw.channel.env = self.env.clone();
        raw.channel.eta_scale = self.eta_scale.clone();
        raw.channel.m = self.m;
        raw.snr.rho_db = self.rho_db;
        raw.rates.r_th_b = self.r_th_b;
        raw.rates.r_th_f = self.r_th_f;
        raw.geometry.uav = RawPoint3 { x: self.uav_x, y: self.uav_y, z: self.uav_z };
        raw
    }

    /// `defaults ← file ← flags`.
    fn resolve(&self, sweep: Option<&SweepArgs>) -> Result<RawConfig, Issues> {
        let mut raw = RawConfig::defaults();
        if let Some(path) = &self.config {
            raw = raw.overlay(RawConfig::from_file(path)?);
        }
        let mut flags = self.flags();
        if let Some(s) = sweep {
            flags.sweep = RawSweep { axis: s.axis.clone(), start: s.start, stop: s.stop, steps: s.steps };
        }
        Ok(raw.overlay(flags))
    }

    fn init_threads(&self) -> Result<()> {
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting thread pool")?;
        }
        Ok(())
    }
}

fn invalid(issues: &Issues) -> ExitStatus {
    for issue in &issues.0 {
        eprintln!("error: {}: {}", issue.path, issue.message);
    }
    ExitStatus::Validation
}

fn status_exit(statuses: impl IntoIterator<Item = Status>) -> ExitStatus {
    let mut exit = ExitStatus::Success;
    for s in statuses {
        match s {
            Status::Unhealthy => return ExitStatus::NumericalHealth,
            Status::Invalid => exit = ExitStatus::Validation,
            Status::Ok => {}
        }
    }
    exit
}

fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

fn cmd_eval(common: &Common, json: bool) -> Result<ExitStatus> {
    let raw = match common.resolve(None) {
        Ok(r) => r,
        Err(i) => return Ok(invalid(&i)),
    };
    let run = match validate_scenario(&raw) {
        Ok(r) => r,
        Err(i) => return Ok(invalid(&i)),
    };
    common.init_threads()?;
    let results = report::eval(&run);
    let value = report::to_json(&run, &results);
    if json {
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        print!("{}", report::to_text(&run, &results));
    }
    if let Some(path) = &common.out {
        std::fs::write(path, serde_json::to_string_pretty(&value)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(status_exit(results.iter().map(|r| r.status)))
}

fn cmd_sweep(common: &Common, args: &SweepArgs) -> Result<ExitStatus> {
    let raw = match common.resolve(Some(args)) {
        Ok(r) => r,
        Err(i) => return Ok(invalid(&i)),
    };
    let (run, spec) = match (validate_scenario(&raw), validate_sweep(&raw.sweep)) {
        (Ok(r), Ok(s)) => (r, s),
        (r, s) => {
            let mut issues = Issues::default();
            if let Err(i) = r {
                issues.extend(i);
            }
            if let Err(i) = s {
                issues.extend(i);
            }
            return Ok(invalid(&issues));
        }
    };
    common.init_threads()?;
    let clock = Clock::start();
    let rows = match run_sweep(&run, &spec) {
        Ok(rows) => rows,
        Err(i) => return Ok(invalid(&i)),
    };
    match &common.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(BufWriter::new(file), &rows)?;
            let manifest = Manifest::new(&run, &spec, &rows, Some(path.display().to_string()), &clock);
            let mpath = manifest_path(path);
            std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)? + "\n")
                .with_context(|| format!("writing {}", mpath.display()))?;
            eprintln!("wrote {} rows to {} ({})", rows.len(), path.display(), mpath.display());
        }
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    for r in rows.iter().filter(|r| r.result.status != Status::Ok) {
        eprintln!(
            "warning: {} = {} {}: {} ({})",
            r.axis.name(),
            r.value,
            r.result.scheme,
            r.result.status.name(),
            r.result.error.as_deref().unwrap_or("")
        );
    }
    Ok(status_exit(rows.iter().map(|r| r.result.status)))
}

fn cmd_validate(common: &Common, args: &SweepArgs) -> Result<ExitStatus> {
    let raw = match common.resolve(Some(args)) {
        Ok(r) => r,
        Err(i) => return Ok(invalid(&i)),
    };
    let mut issues = Issues::default();
    let run = validate_scenario(&raw).map_err(|i| issues.extend(i)).ok();
    if raw.sweep != RawSweep::default() {
        match (validate_sweep(&raw.sweep), &run) {
            (Ok(spec), Some(run)) => {
                if let Err(i) = check_rows(run, &spec) {
                    issues.extend(i);
                }
            }
            (Err(i), _) => issues.extend(i),
            _ => {}
        }
    }
    if !issues.is_empty() {
        return Ok(invalid(&issues));
    }
    let mut out = io::stdout().lock();
    writeln!(out, "# valid")?;
    write!(out, "{}", raw.to_toml())?;
    Ok(ExitStatus::Success)
}

fn cmd_selftest(common: &Common) -> Result<ExitStatus> {
    let raw = match common.resolve(None) {
        Ok(r) => r,
        Err(i) => return Ok(invalid(&i)),
    };
    let run = match validate_scenario(&raw) {
        Ok(r) => r,
        Err(i) => return Ok(invalid(&i)),
    };
    common.init_threads()?;
    let checks = selftest::run_all(&run);
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(if failed == 0 { ExitStatus::Success } else { ExitStatus::NumericalHealth })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval { common, json } => cmd_eval(common, *json),
        Command::Sweep { common, sweep } => cmd_sweep(common, sweep),
        Command::Validate { common, sweep } => cmd_validate(common, sweep),
        Command::Selftest { common } => cmd_selftest(common),
    };
    match result {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ExitStatus::Validation.code() as u8)
        }
    }
}
