//! Seeded Monte Carlo estimator of the outage probability and of the
//! individual events behind each closed-form term.
//!
//! Trials are split into `workers` contiguous chunks (the first
//! `trials % workers` chunks get one extra trial). Chunk `k` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, so the output is a pure
//! function of `(seed, workers)`. Each trial draws `G_B` then `G_F`; two
//! schemes run with the same seed therefore see identical channels.

use core::fmt;
use core::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::channel::sample_gain;
use crate::math::sqrt;
use crate::scheme::{classify, ChannelDraw, Event, Scheme, ThresholdSet};
use crate::{Error, Result, SystemParams};

pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// Mutually exclusive outcome counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EventCounts {
    pub gb_blocked: u64,
    pub case1_outage: u64,
    pub case2_outage: u64,
    pub case3_outage: u64,
    pub no_outage: u64,
}

impl EventCounts {
    #[inline]
    pub fn record(&mut self, event: Event) {
        match event {
            Event::GbBlocked => self.gb_blocked += 1,
            Event::Case1Outage => self.case1_outage += 1,
            Event::Case2Outage => self.case2_outage += 1,
            Event::Case3Outage => self.case3_outage += 1,
            Event::NoOutage => self.no_outage += 1,
        }
    }

    pub fn merge(&mut self, other: &EventCounts) {
        self.gb_blocked += other.gb_blocked;
        self.case1_outage += other.case1_outage;
        self.case2_outage += other.case2_outage;
        self.case3_outage += other.case3_outage;
        self.no_outage += other.no_outage;
    }

    pub fn outages(&self) -> u64 {
        self.gb_blocked + self.case1_outage + self.case2_outage + self.case3_outage
    }

    pub fn total(&self) -> u64 {
        self.outages() + self.no_outage
    }
}

/// Estimate of one probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub trials: u64,
    pub outages: u64,
    pub op_hat: f64,
    /// `sqrt(p̂(1 − p̂)/n)`.
    pub std_err: f64,
    /// Outcome breakdown; only for whole-scheme estimates.
    pub events: Option<EventCounts>,
    pub seed: u64,
}

impl SimResult {
    pub fn from_hits(trials: u64, hits: u64, seed: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let std_err = if trials == 0 { 0.0 } else { sqrt(p * (1.0 - p) / trials as f64) };
        Self { trials, outages: hits, op_hat: p, std_err, events: None, seed }
    }

    pub fn from_counts(counts: EventCounts, seed: u64) -> Self {
        Self { events: Some(counts), ..Self::from_hits(counts.total(), counts.outages(), seed) }
    }

    /// `|op_hat − p| / std_err`. When every trial agreed (`op_hat` of 0 or
    /// 1) the estimated error is 0 and the binomial error at `p` is used.
    pub fn z_score(&self, p: f64) -> f64 {
        let sigma = if self.std_err > 0.0 {
            self.std_err
        } else {
            let q = p.clamp(0.0, 1.0);
            sqrt(q * (1.0 - q) / self.trials.max(1) as f64)
        };
        let diff = (self.op_hat - p).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / sigma
        }
    }
}

/// Event sets behind the individual closed-form terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermSelector {
    /// `G_B ≤ ε₁`.
    T0,
    /// Admitted, `G_F > G_B`, rate below target.
    T11,
    /// FPA: admitted, `G_F ≤ G_B`, rate below target.
    T12,
    /// DPA: admitted, `G_F < Θ_BG_B/(ρG_B + 1)`, rate below target.
    T2,
    /// DPA: admitted, decoded with `ω₂`, rate below target.
    T3,
    /// `ε₁ < G_B < ε₀`, `G_F < ε₂G_B/(G_B − ε₁)`.
    Chi1,
    /// `ε₁ < G_B < ε₀`, `G_F < G_B`.
    Chi2,
    /// `ε₁ < G_B < ε₅`, `G_F < G_B`.
    Chi3,
    /// `G_B > ε₅`, `G_F < ε₄G_B/(G_B − ε₃)`.
    Chi4,
    /// `ε₁ < G_B < ε₃`, `G_F < Θ_BG_B/(ρG_B + 1)`.
    Chi5,
    /// `G_B > ε₃` and the `T2` event.
    Chi6,
}

impl TermSelector {
    pub const ALL: [TermSelector; 11] = [
        TermSelector::T0,
        TermSelector::T11,
        TermSelector::T12,
        TermSelector::T2,
        TermSelector::T3,
        TermSelector::Chi1,
        TermSelector::Chi2,
        TermSelector::Chi3,
        TermSelector::Chi4,
        TermSelector::Chi5,
        TermSelector::Chi6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TermSelector::T0 => "T0",
            TermSelector::T11 => "T11",
            TermSelector::T12 => "T12",
            TermSelector::T2 => "T2",
            TermSelector::T3 => "T3",
            TermSelector::Chi1 => "chi1",
            TermSelector::Chi2 => "chi2",
            TermSelector::Chi3 => "chi3",
            TermSelector::Chi4 => "chi4",
            TermSelector::Chi5 => "chi5",
            TermSelector::Chi6 => "chi6",
        }
    }
}

impl fmt::Display for TermSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TermSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TermSelector::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidParameter { name: "term", reason: "unknown term selector" })
    }
}

/// Number of trials handled by worker `k` of `workers`.
pub fn worker_trials(trials: u64, workers: u32, k: u32) -> u64 {
    let w = u64::from(workers.max(1));
    let k = u64::from(k);
    trials / w + u64::from(k < trials % w)
}

/// The RNG stream of worker `k`.
pub fn worker_rng(seed: u64, k: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(k));
    rng
}

#[inline]
fn draw(t: &ThresholdSet, rng: &mut ChaCha8Rng) -> ChannelDraw {
    let g_b = sample_gain(t.lambda_b, t.m, rng);
    let g_f = sample_gain(t.lambda_f, t.m, rng);
    ChannelDraw { g_b, g_f }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", reason: "must be at least 1" });
    }
    Ok(())
}

/// Outcome counts of worker `k`.
pub fn simulate_worker(params: &SystemParams, scheme: Scheme, trials: u64, seed: u64, workers: u32, k: u32) -> Result<EventCounts> {
    let t = params.thresholds()?;
    let mut rng = worker_rng(seed, k);
    let mut counts = EventCounts::default();
    for _ in 0..worker_trials(trials, workers, k) {
        counts.record(classify(&draw(&t, &mut rng), scheme, &t));
    }
    Ok(counts)
}

/// Single-worker estimate.
pub fn estimate_op(params: &SystemParams, scheme: Scheme, trials: u64, seed: u64) -> Result<SimResult> {
    estimate_op_with_workers(params, scheme, trials, seed, 1)
}

/// Estimate with the trials split over `workers` streams, run in sequence.
pub fn estimate_op_with_workers(
    params: &SystemParams,
    scheme: Scheme,
    trials: u64,
    seed: u64,
    workers: u32,
) -> Result<SimResult> {
    check_trials(trials)?;
    let mut counts = EventCounts::default();
    for k in 0..workers.max(1) {
        counts.merge(&simulate_worker(params, scheme, trials, seed, workers, k)?);
    }
    Ok(SimResult::from_counts(counts, seed))
}

/// Indicator of the event behind `term` for one draw.
pub fn term_indicator(term: TermSelector, d: &ChannelDraw, t: &ThresholdSet) -> Result<bool> {
    let (g_b, g_f) = (d.g_b, d.g_f);
    let admitted = g_b > t.eps1;
    let h = t.theta_b() * g_b / (t.rho * g_b + 1.0);
    Ok(match term {
        TermSelector::T0 => !admitted,
        TermSelector::T11 => classify(d, Scheme::Fpa, t) == Event::Case1Outage,
        TermSelector::T12 => classify(d, Scheme::Fpa, t) == Event::Case2Outage,
        TermSelector::T2 => classify(d, Scheme::Dpa, t) == Event::Case2Outage,
        TermSelector::T3 => classify(d, Scheme::Dpa, t) == Event::Case3Outage,
        TermSelector::Chi1 => admitted && g_b < t.eps0 && g_f < t.eps2 * g_b / (g_b - t.eps1),
        TermSelector::Chi2 => admitted && g_b < t.eps0 && g_f < g_b,
        TermSelector::Chi3 => {
            let eps5 = ThresholdSet::require(t.eps5, "eps5")?;
            admitted && g_b < eps5 && g_f < g_b
        }
        TermSelector::Chi4 => {
            let eps3 = ThresholdSet::require(t.eps3, "eps3")?;
            let eps4 = ThresholdSet::require(t.eps4, "eps4")?;
            let eps5 = ThresholdSet::require(t.eps5, "eps5")?;
            g_b > eps5 && g_f < eps4 * g_b / (g_b - eps3)
        }
        TermSelector::Chi5 => {
            let eps3 = ThresholdSet::require(t.eps3, "eps3")?;
            admitted && g_b < eps3 && g_f < h
        }
        TermSelector::Chi6 => {
            let eps3 = ThresholdSet::require(t.eps3, "eps3")?;
            g_b > eps3 && classify(d, Scheme::Dpa, t) == Event::Case2Outage
        }
    })
}

/// Hit count of worker `k` for the event behind `term`.
pub fn simulate_term_worker(
    params: &SystemParams,
    term: TermSelector,
    trials: u64,
    seed: u64,
    workers: u32,
    k: u32,
) -> Result<u64> {
    let t = params.thresholds()?;
    // Surface undefined thresholds before drawing.
    term_indicator(term, &ChannelDraw { g_b: 0.0, g_f: 0.0 }, &t)?;
    let mut rng = worker_rng(seed, k);
    let mut hits = 0;
    for _ in 0..worker_trials(trials, workers, k) {
        if term_indicator(term, &draw(&t, &mut rng), &t)? {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Indicator Monte Carlo of the event set defining `term`.
pub fn estimate_term(params: &SystemParams, term: TermSelector, trials: u64, seed: u64) -> Result<SimResult> {
    check_trials(trials)?;
    let hits = simulate_term_worker(params, term, trials, seed, 1, 0)?;
    Ok(SimResult::from_hits(trials, hits, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gain_cdf;
    use crate::scheme::RateConfig;

    fn params(rb: f64, rf: f64, rho: f64) -> SystemParams {
        SystemParams::new(2.0, 2.0, 2, RateConfig::new(rb, rf).unwrap(), rho).unwrap()
    }

    #[test]
    fn worker_split_covers_all_trials() {
        for (trials, workers) in [(10u64, 3u32), (7, 7), (5, 8), (1_000_003, 16)] {
            let sum: u64 = (0..workers).map(|k| worker_trials(trials, workers, k)).sum();
            assert_eq!(sum, trials);
        }
    }

    #[test]
    fn counts_are_consistent() {
        let r = estimate_op(&params(0.2, 2.0, 10.0), Scheme::Dpa, 20_000, 3).unwrap();
        let e = r.events.unwrap();
        assert_eq!(e.total(), r.trials);
        assert_eq!(e.outages(), r.outages);
        assert_eq!(r.op_hat, r.outages as f64 / r.trials as f64);
        let fpa = estimate_op(&params(0.2, 2.0, 10.0), Scheme::Fpa, 20_000, 3).unwrap();
        assert_eq!(fpa.events.unwrap().case3_outage, 0);
    }

    #[test]
    fn deterministic_for_fixed_seed_and_workers() {
        let p = params(0.5, 2.5, 30.0);
        let a = estimate_op_with_workers(&p, Scheme::Fpa, 50_000, 11, 4).unwrap();
        let b = estimate_op_with_workers(&p, Scheme::Fpa, 50_000, 11, 4).unwrap();
        assert_eq!(a, b);
        let c = estimate_op_with_workers(&p, Scheme::Fpa, 50_000, 12, 4).unwrap();
        assert_ne!(a.outages, c.outages);
    }

    #[test]
    fn paired_seeds_give_nested_outages() {
        let p = params(0.5, 2.5, 30.0);
        let t = p.thresholds().unwrap();
        let mut rng = worker_rng(5, 0);
        for _ in 0..100_000 {
            let d = draw(&t, &mut rng);
            if classify(&d, Scheme::Dpa, &t).is_outage() {
                assert!(classify(&d, Scheme::Fpa, &t).is_outage());
            }
        }
    }

    #[test]
    fn vanishing_gf_target_leaves_only_t0() {
        let p = params(0.3, 1e-9, 5.0);
        let t = p.thresholds().unwrap();
        let r = estimate_op(&p, Scheme::Fpa, 200_000, 1).unwrap();
        let t0 = gain_cdf(t.eps1, 2.0, 2).unwrap();
        assert!((r.op_hat - t0).abs() < 3.0 * r.std_err.max(1e-9));
    }

    #[test]
    fn term_selectors() {
        let p = params(0.5, 2.5, 30.0);
        assert!(matches!(estimate_term(&p, TermSelector::Chi3, 10, 1), Err(Error::UndefinedThreshold(_))));
        let r = estimate_term(&p, TermSelector::T0, 10_000, 1).unwrap();
        assert!(r.events.is_none());
        assert_eq!("CHI4".parse::<TermSelector>().unwrap(), TermSelector::Chi4);
        assert!("T9".parse::<TermSelector>().is_err());
        assert!(estimate_op(&p, Scheme::Fpa, 0, 1).is_err());
    }

    #[test]
    fn fpa_terms_partition_the_outage_event() {
        let p = params(0.2, 2.0, 20.0);
        let n = 100_000;
        let total = estimate_op(&p, Scheme::Fpa, n, 9).unwrap().outages;
        let parts: u64 = [TermSelector::T0, TermSelector::T11, TermSelector::T12]
            .into_iter()
            .map(|s| estimate_term(&p, s, n, 9).unwrap().outages)
            .sum();
        assert_eq!(total, parts);
    }

    #[test]
    fn coverage_of_three_sigma_interval() {
        // Pr{G_B ≤ ε₁} has a closed form; 200 independent runs.
        let p = params(1.0, 1.5, 2.0);
        let t = p.thresholds().unwrap();
        let exact = gain_cdf(t.eps1, 2.0, 2).unwrap();
        let covered = (0..200u64)
            .filter(|&seed| {
                let r = estimate_term(&p, TermSelector::T0, 2_000, seed).unwrap();
                (r.op_hat - exact).abs() <= 3.0 * r.std_err
            })
            .count();
        assert!(covered >= 198, "covered {covered}");
    }

    #[test]
    fn std_err_scales_with_trials() {
        let p = params(0.5, 2.5, 30.0);
        let small = estimate_op(&p, Scheme::Fpa, 10_000, 4).unwrap();
        let large = estimate_op(&p, Scheme::Fpa, 1_000_000, 4).unwrap();
        let ratio = small.std_err / large.std_err;
        assert!((ratio / 10.0 - 1.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn z_score_handles_unanimous_estimates() {
        let all = SimResult::from_hits(1_000_000, 1_000_000, 1);
        assert_eq!(all.std_err, 0.0);
        assert_eq!(all.z_score(1.0), 0.0);
        assert!(all.z_score(1.0 - 1e-9) < 1.0);
        assert!(all.z_score(0.99) > 100.0);
        let half = SimResult::from_hits(100, 50, 1);
        assert!((half.z_score(0.55) - 1.0).abs() < 1e-12);
    }
}
