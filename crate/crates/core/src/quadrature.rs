//! Quadrature rules used by the closed forms.
//!
//! * [`ChebyshevRule`]: `N`-node Gauss–Chebyshev on a finite interval,
//!   `∫_s^t f ≈ (π/N) Σ f(μ_n) √((μ_n − s)(t − μ_n))`. In the angle variable
//!   this is the midpoint rule, so its error is `O(N⁻²)` with a leading term
//!   that only depends on `f(s) + f(t)`; [`ChebyshevRule::integrate`] can
//!   subtract that term.
//! * [`LaguerreRule`]: `N`-node Gauss–Laguerre, nodes by Newton iteration,
//!   weights kept as logarithms because they underflow for large nodes.
//! * [`adaptive_gk15`] / [`adaptive_tail`]: globally adaptive
//!   Gauss–Kronrod 7/15 on finite intervals and on `[c, ∞)`.

use alloc::collections::BinaryHeap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::math::{exp, log, sqrt};
use crate::{Error, Result};

pub const DEFAULT_CHEBYSHEV_NODES: usize = 100;
pub const DEFAULT_LAGUERRE_NODES: usize = 64;

/// Gauss–Chebyshev abscissas `τ_n = cos((2n − 1)π/(2N))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevRule {
    nodes: Vec<f64>,
}

impl ChebyshevRule {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter { name: "n_chebyshev", reason: "must be positive" });
        }
        let nodes = (1..=n)
            .map(|k| libm::cos((2 * k - 1) as f64 * PI / (2 * n) as f64))
            .collect();
        Ok(Self { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Mapped abscissa `μ_n(s, t)`.
    #[inline]
    pub fn mapped(s: f64, t: f64, tau: f64) -> f64 {
        0.5 * (t + s) + 0.5 * (t - s) * tau
    }

    /// `∫_s^t f(y) dy`. With `endpoint_correction` the leading midpoint
    /// error `(π/N)²/24 · (t − s)/2 · (f(s) + f(t))` is subtracted, and `f`
    /// is also evaluated at both endpoints.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, s: f64, t: f64, endpoint_correction: bool, mut f: F) -> f64 {
        let n = self.nodes.len() as f64;
        let mut acc = 0.0;
        for &tau in &self.nodes {
            let mu = Self::mapped(s, t, tau);
            let w = sqrt(((mu - s) * (t - mu)).max(0.0));
            acc += f(mu) * w;
        }
        let h = PI / n;
        let mut value = h * acc;
        if endpoint_correction {
            value -= h * h / 24.0 * 0.5 * (t - s) * (f(s) + f(t));
        }
        value
    }
}

/// Gauss–Laguerre nodes `ι_n` and `ln w_n` for `∫_0^∞ e^{−x} f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerreRule {
    nodes: Vec<f64>,
    log_weights: Vec<f64>,
}

impl LaguerreRule {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter { name: "n_laguerre", reason: "must be positive" });
        }
        let mut nodes = Vec::with_capacity(n);
        let mut log_weights = Vec::with_capacity(n);
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n {
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
                }
            };
            let mut converged = false;
            for _ in 0..200 {
                let (p1, p2, _) = laguerre_pair(n, z);
                let pp = nf * (p1 - p2) / z;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-14 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged || !(z > 0.0) || (i > 0 && z <= nodes[i - 1]) {
                return Err(Error::InvalidParameter {
                    name: "n_laguerre",
                    reason: "Newton iteration for Laguerre nodes failed",
                });
            }
            let (p1, p2, ln_scale) = laguerre_pair(n, z);
            let pp = nf * (p1 - p2) / z;
            // w = −1/(n·L'_n(z)·L_{n−1}(z)); both factors carry the scale.
            let ln_w = -(log((pp * p2).abs()) + 2.0 * ln_scale + log(nf));
            nodes.push(z);
            log_weights.push(ln_w);
        }
        Ok(Self { nodes, log_weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// `w_n` (zero where it underflows).
    pub fn weight(&self, k: usize) -> f64 {
        exp(self.log_weights[k])
    }

    /// `Σ w_n f(ι_n)`, i.e. `∫_0^∞ e^{−x} f(x) dx`, where `f` is supplied
    /// as `(ln magnitude, sign-carrying factor)` so that `e^{ι_n}`-sized
    /// factors can be folded into the exponent.
    pub fn sum_log<F: FnMut(f64) -> (f64, f64)>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&x, &lw)| {
                let (ln_mag, factor) = f(x);
                if factor == 0.0 {
                    0.0
                } else {
                    factor * exp(lw + ln_mag)
                }
            })
            .sum()
    }
}

/// `(L_n(z), L_{n−1}(z), ln S)` with the true values equal to the returned
/// ones times `S`; rescaled to stay finite for large `n` and `z`.
fn laguerre_pair(n: usize, z: f64) -> (f64, f64, f64) {
    let mut p1 = 1.0f64;
    let mut p2 = 0.0f64;
    let mut ln_scale = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
        let big = p1.abs().max(p2.abs());
        if big > 1e150 {
            p1 /= big;
            p2 /= big;
            ln_scale += log(big);
        }
    }
    (p1, p2, ln_scale)
}

/// Which discretization the `g₁`/`g₂` evaluators use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QuadratureRule {
    /// Endpoint-corrected Gauss–Chebyshev and a shifted, scaled
    /// Gauss–Laguerre rule applied directly to `[c, ∞)`.
    #[default]
    Refined,
    /// Plain Gauss–Chebyshev and the "full Laguerre minus Chebyshev on
    /// `[0, c]`" decomposition.
    Plain,
}

impl QuadratureRule {
    pub fn name(self) -> &'static str {
        match self {
            QuadratureRule::Refined => "refined",
            QuadratureRule::Plain => "plain",
        }
    }
}

impl core::str::FromStr for QuadratureRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "refined" => Ok(QuadratureRule::Refined),
            "plain" | "chebyshev" => Ok(QuadratureRule::Plain),
            _ => Err(Error::InvalidParameter { name: "quad_rule", reason: "expected refined or plain" }),
        }
    }
}

/// Node counts, rule choice and shared node tables.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub rule: QuadratureRule,
    chebyshev: Arc<ChebyshevRule>,
    laguerre: Arc<LaguerreRule>,
    /// Relative tolerance of the adaptive tail integrator.
    pub adaptive_rel_tol: f64,
}

impl QuadratureConfig {
    pub fn new(n_chebyshev: usize, n_laguerre: usize, rule: QuadratureRule) -> Result<Self> {
        Ok(Self {
            rule,
            chebyshev: Arc::new(ChebyshevRule::new(n_chebyshev)?),
            laguerre: Arc::new(LaguerreRule::new(n_laguerre)?),
            adaptive_rel_tol: 1e-12,
        })
    }

    /// Copy with a different Chebyshev node count, sharing the Laguerre table.
    pub fn with_chebyshev(&self, n: usize) -> Result<Self> {
        Ok(Self { chebyshev: Arc::new(ChebyshevRule::new(n)?), ..self.clone() })
    }

    pub fn with_laguerre(&self, n: usize) -> Result<Self> {
        Ok(Self { laguerre: Arc::new(LaguerreRule::new(n)?), ..self.clone() })
    }

    pub fn n_chebyshev(&self) -> usize {
        self.chebyshev.len()
    }
    pub fn n_laguerre(&self) -> usize {
        self.laguerre.len()
    }
    pub fn chebyshev(&self) -> &ChebyshevRule {
        &self.chebyshev
    }
    pub fn laguerre(&self) -> &LaguerreRule {
        &self.laguerre
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::new(DEFAULT_CHEBYSHEV_NODES, DEFAULT_LAGUERRE_NODES, QuadratureRule::Refined)
            .expect("default node counts are valid")
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const MAX_SEGMENTS: usize = 4000;

/// Globally adaptive G7K15 on `[a, b]`, bisecting the worst segment until
/// the summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_gk15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Estimate> {
    if !(a < b) {
        return Err(Error::EmptyInterval { lower: a, upper: b });
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            // Accept if the remainder is at round-off level.
            if total_err <= 1e-8 * total.abs() {
                break;
            }
            return Err(Error::QuadratureNonConvergence { value: total, error: total_err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Estimate { value, error })
}

/// `∫_c^∞ f(y) dy` through `y = c + (1 − t)/(t·scale)`, `t ∈ (0, 1]`.
/// `scale` should be the decay rate of `f`.
pub fn adaptive_tail<F: FnMut(f64) -> f64>(mut f: F, c: f64, scale: f64, rel_tol: f64) -> Result<Estimate> {
    adaptive_gk15(
        |t| {
            if t <= 0.0 {
                return 0.0;
            }
            let u = (1.0 - t) / (t * scale);
            let v = f(c + u);
            if v == 0.0 {
                0.0
            } else {
                v / (t * t * scale)
            }
        },
        0.0,
        1.0,
        rel_tol,
        0.0,
    )
}
