mod common;

use aerial_noma_core::channel::{gain_cdf, sample_gain};
use aerial_noma_core::montecarlo::{estimate_op, worker_rng, worker_trials};
use aerial_noma_core::scheme::Scheme;
use aerial_noma_core::analytic::{evaluate, Evaluator};
use aerial_noma_core::quadrature::QuadratureConfig;
use aerial_noma_core::channel::Environment;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

/// Kolmogorov critical value at 1% for large samples.
const KS_1PCT: f64 = 1.628;

fn ks_one_sample(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((((i + 1) as f64) / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[test]
fn gain_samples_pass_ks_against_the_gamma_law() {
    for (lambda, m) in [(30698.8, 2u32), (1.0, 1), (5.0, 4)] {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_gain(lambda, m, &mut rng)).collect();
        let d = ks_one_sample(xs, |x| gain_cdf(x, lambda, m).unwrap());
        assert!(d * (n as f64).sqrt() < KS_1PCT, "λ={lambda} m={m}: D={d}");
    }
}

#[test]
fn worker_streams_share_one_distribution() {
    let (lambda, m, n) = (2.0, 2, 50_000u64);
    let single: Vec<f64> = {
        let mut rng = worker_rng(7, 0);
        (0..n).map(|_| sample_gain(lambda, m, &mut rng)).collect()
    };
    let split: Vec<f64> = (0..4)
        .flat_map(|k| {
            let mut rng = worker_rng(8, k);
            (0..worker_trials(n, 4, k)).map(move |_| sample_gain(lambda, m, &mut rng)).collect::<Vec<_>>()
        })
        .collect();
    let d = ks_two_sample(single, split);
    // Two-sample critical value at 1%: 1.628·sqrt(2/n).
    assert!(d < KS_1PCT * (2.0 / n as f64).sqrt(), "D={d}");
}

#[test]
fn simulation_agrees_with_the_closed_form_at_mid_snr() {
    let p = common::fixture(Environment::Suburban, 0.2, 2.0, 50.0);
    let exact = evaluate(&p, Scheme::Fpa, Evaluator::Exact, &QuadratureConfig::default()).unwrap().total;
    let r = estimate_op(&p, Scheme::Fpa, 1_000_000, 2024).unwrap();
    assert!((r.op_hat - exact).abs() <= 3.0 * r.std_err, "{} ± {} vs {exact}", r.op_hat, r.std_err);
}
