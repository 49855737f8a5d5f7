//! Multi-threaded front end of the core Monte Carlo kernel.
//!
//! Worker `k` always draws from RNG stream `k`, whichever thread runs it,
//! and counts are summed, so results equal the sequential core estimator
//! for the same `(seed, workers)`.

use aerial_noma_core::montecarlo::{simulate_term_worker, simulate_worker, EventCounts, SimResult, TermSelector};
use aerial_noma_core::scheme::Scheme;
use aerial_noma_core::{Error, Result, SystemParams};
use rayon::prelude::*;

use crate::config::McSettings;

fn check(mc: &McSettings) -> Result<()> {
    if mc.trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", reason: "must be at least 1" });
    }
    Ok(())
}

pub fn estimate_op(params: &SystemParams, scheme: Scheme, mc: &McSettings) -> Result<SimResult> {
    check(mc)?;
    let counts = (0..mc.workers.max(1))
        .into_par_iter()
        .map(|k| simulate_worker(params, scheme, mc.trials, mc.seed, mc.workers, k))
        .try_reduce(EventCounts::default, |mut a, b| {
            a.merge(&b);
            Ok(a)
        })?;
    Ok(SimResult::from_counts(counts, mc.seed))
}

pub fn estimate_term(params: &SystemParams, term: TermSelector, mc: &McSettings) -> Result<SimResult> {
    check(mc)?;
    let hits = (0..mc.workers.max(1))
        .into_par_iter()
        .map(|k| simulate_term_worker(params, term, mc.trials, mc.seed, mc.workers, k))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(SimResult::from_hits(mc.trials, hits, mc.seed))
}
