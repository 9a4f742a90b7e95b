//! Adaptive Gauss-Kronrod integration and the special functions used by the
//! closed-form expressions.
//!
//! Nested integrals go through a [`Quadrature`] context: inner integrals are
//! plain `f64`-returning calls, the first failure is recorded, and the caller
//! turns the outermost value into a `Result` with [`Quadrature::finish`].

use std::cell::{Cell, RefCell};

use libm::erfc;
use thiserror::Error;

/// Tolerances and limits for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any subinterval.
    pub max_depth: u32,
    /// Weight left beyond the cutoff of an exponentially damped tail.
    pub truncation_epsilon: f64,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_depth: 40,
            truncation_epsilon: 1e-10,
        }
    }
}

impl IntegrationSpec {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(QuadError::InvalidSpec("tolerances must be positive".into()));
        }
        if self.max_depth < 1 {
            return Err(QuadError::InvalidSpec("max_depth must be at least 1".into()));
        }
        if !positive(self.truncation_epsilon) || self.truncation_epsilon >= 1.0 {
            return Err(QuadError::InvalidSpec(
                "truncation_epsilon must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Spec used one nesting level further in.
    fn nested(&self, level: u32) -> Self {
        let scale = 10f64.powi(level as i32);
        Self {
            rel_tol: (self.rel_tol / scale).max(1e-14),
            abs_tol: (self.abs_tol / scale).max(1e-300),
            ..*self
        }
    }

    /// Distance past `a` at which an `exp(-rate x)` envelope has shed all but
    /// `truncation_epsilon` of its mass.
    pub fn tail_cutoff(&self, rate: f64) -> f64 {
        (1.0 / self.truncation_epsilon).ln() / rate
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge (estimate {estimate:.6e}, error {error:.3e}, {intervals} intervals)")]
    NotConverged {
        estimate: f64,
        error: f64,
        intervals: usize,
    },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid integration spec: {0}")]
    InvalidSpec(String),
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

struct Outcome {
    value: f64,
    error: f64,
    intervals: usize,
    converged: bool,
    non_finite: Option<f64>,
}

const MAX_INTERVALS: usize = 4000;

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, bad: &mut Option<f64>) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut check = |x: f64, v: f64| {
        if !v.is_finite() {
            bad.get_or_insert(x);
            0.0
        } else {
            v
        }
    };
    let fc = check(center, f(center));
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let v1 = check(center - dx, f(center - dx));
        let v2 = check(center + dx, f(center + dx));
        f1[j] = v1;
        f2[j] = v2;
        res_k += WGK[j] * (v1 + v2);
        res_abs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (v1 + v2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let res_asc = res_asc * half.abs();
    let res_abs = res_abs * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (res_k * half, err)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, points: &[f64], spec: &IntegrationSpec) -> Outcome {
    let mut bad = None;
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = kronrod21(f, w[0], w[1], &mut bad);
            segments.push(Segment {
                a: w[0],
                b: w[1],
                value,
                error,
                depth: 0,
            });
        }
    }
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let tol = spec
            .abs_tol
            .max(spec.rel_tol * value.abs())
            .max(100.0 * f64::EPSILON * value.abs());
        if error <= tol || segments.is_empty() {
            return Outcome {
                value,
                error,
                intervals: segments.len(),
                converged: true,
                non_finite: bad,
            };
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("nonempty");
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        if seg.depth >= spec.max_depth
            || segments.len() >= MAX_INTERVALS
            || mid <= seg.a
            || mid >= seg.b
        {
            return Outcome {
                value,
                error,
                intervals: segments.len(),
                converged: false,
                non_finite: bad,
            };
        }
        let (v1, e1) = kronrod21(f, seg.a, mid, &mut bad);
        let (v2, e2) = kronrod21(f, mid, seg.b, &mut bad);
        segments[worst] = Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
            depth: seg.depth + 1,
        };
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
            depth: seg.depth + 1,
        });
    }
}

fn sorted_points(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = Vec::with_capacity(breaks.len() + 2);
    pts.push(a);
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Nested-integration context. Not `Sync`: create one per evaluation point.
#[derive(Debug)]
pub struct Quadrature {
    spec: IntegrationSpec,
    level: Cell<u32>,
    failure: RefCell<Option<QuadError>>,
}

impl Quadrature {
    pub fn new(spec: IntegrationSpec) -> Self {
        Self {
            spec,
            level: Cell::new(0),
            failure: RefCell::new(None),
        }
    }

    pub fn spec(&self) -> &IntegrationSpec {
        &self.spec
    }

    fn run<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> f64 {
        let level = self.level.get();
        let spec = self.spec.nested(level);
        self.level.set(level + 1);
        let out = adaptive(&f, points, &spec);
        self.level.set(level);
        let mut failure = self.failure.borrow_mut();
        if failure.is_none() {
            if let Some(x) = out.non_finite {
                *failure = Some(QuadError::NonFinite { x });
            } else if !out.converged {
                *failure = Some(QuadError::NotConverged {
                    estimate: out.value,
                    error: out.error,
                    intervals: out.intervals,
                });
            }
        }
        out.value
    }

    /// Integral over `[a, b]`; reversed limits flip the sign.
    pub fn finite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        self.finite_with_breaks(f, a, b, &[])
    }

    /// Integral over `[a, b]` with known kinks or discontinuities at `breaks`.
    pub fn finite_with_breaks<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, breaks: &[f64]) -> f64 {
        if a == b {
            return 0.0;
        }
        if b < a {
            return -self.finite_with_breaks(f, b, a, breaks);
        }
        let pts = sorted_points(a, b, breaks);
        self.run(f, &pts)
    }

    /// Integral over `[a, inf)` of an integrand dominated by `exp(-rate x)`.
    /// The range is cut where the envelope tail drops below the truncation
    /// epsilon and pre-split on the envelope's own length scale.
    pub fn exp_tail<F: Fn(f64) -> f64>(&self, f: F, a: f64, rate: f64, breaks: &[f64]) -> f64 {
        assert!(rate > 0.0, "envelope rate must be positive");
        let cut = a + self.spec.tail_cutoff(rate);
        let mut all: Vec<f64> = breaks.to_vec();
        let mut step = 0.25 / rate;
        while a + step < cut {
            all.push(a + step);
            step *= 2.0;
        }
        let pts = sorted_points(a, cut, &all);
        self.run(f, &pts)
    }

    /// Integral over `[a, inf)` via `x = a + (1 - t)/t`, for integrands with
    /// algebraic decay and no usable exponential envelope.
    pub fn to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> f64 {
        let g = |t: f64| {
            let x = a + (1.0 - t) / t;
            f(x) / (t * t)
        };
        self.run(g, &[0.0, 0.5, 1.0])
    }

    pub fn failure(&self) -> Option<QuadError> {
        self.failure.borrow().clone()
    }

    /// Turn an outermost value into a result, surfacing any inner failure.
    pub fn finish(&self, value: f64) -> Result<f64, QuadError> {
        match self.failure() {
            Some(QuadError::NotConverged { error, intervals, .. }) => Err(QuadError::NotConverged {
                estimate: value,
                error,
                intervals,
            }),
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

/// One-shot integral over `[a, b]`; `b` may be `f64::INFINITY`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &IntegrationSpec) -> Result<f64, QuadError> {
    spec.validate()?;
    let q = Quadrature::new(*spec);
    let v = if b.is_infinite() {
        q.to_infinity(f, a)
    } else {
        q.finite(f, a, b)
    };
    q.finish(v)
}

/// One-shot integral over `[a, inf)` with a known `exp(-rate x)` envelope.
pub fn integrate_exp_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    rate: f64,
    spec: &IntegrationSpec,
) -> Result<f64, QuadError> {
    spec.validate()?;
    let q = Quadrature::new(*spec);
    let v = q.exp_tail(f, a, rate, &[]);
    q.finish(v)
}

/// Gamma CCDF for integer shape: `F_n(x) = e^{-x} sum_{q<n} x^q / q!`.
pub fn gamma_ccdf(n: u32, x: f64) -> f64 {
    assert!(n >= 1, "gamma shape must be at least 1");
    if x <= 0.0 {
        return 1.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for q in 1..n {
        term *= x / q as f64;
        sum += term;
    }
    (sum * (-x).exp()).min(1.0)
}

/// One term `sign * binomial * exp(-n * eta * x)` of the Alzer bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlzerTerm {
    pub n: u32,
    pub sign: f64,
    pub binomial: f64,
    pub eta: f64,
}

impl AlzerTerm {
    pub fn weight(&self) -> f64 {
        self.sign * self.binomial
    }

    /// Exponential rate multiplying the normalized threshold.
    pub fn rate(&self) -> f64 {
        self.n as f64 * self.eta
    }
}

pub fn alzer_eta(n0: u32) -> f64 {
    let ln_fact: f64 = (2..=n0).map(|k| (k as f64).ln()).sum();
    n0 as f64 * (-ln_fact / n0 as f64).exp()
}

pub fn alzer_weights(n0: u32) -> Vec<AlzerTerm> {
    assert!(n0 >= 1, "Nakagami shape must be at least 1");
    let eta = alzer_eta(n0);
    let mut binomial = 1.0;
    (1..=n0)
        .map(|n| {
            binomial = binomial * (n0 - n + 1) as f64 / n as f64;
            AlzerTerm {
                n,
                sign: if n % 2 == 1 { 1.0 } else { -1.0 },
                binomial,
                eta,
            }
        })
        .collect()
}

/// Alzer upper bound on `P(X > x)` for `X ~ Gamma(n0, 1/n0)`.
pub fn alzer_tail(n0: u32, x: f64) -> f64 {
    alzer_weights(n0)
        .iter()
        .map(|t| t.weight() * (-t.rate() * x).exp())
        .sum()
}

/// Scaled complementary error function `exp(z^2) erfc(z)`.
pub fn erfcx(z: f64) -> f64 {
    if z < 25.0 {
        (z * z).exp() * erfc(z)
    } else {
        let z2 = z * z;
        let series = 1.0 - 0.5 / z2 + 0.75 / (z2 * z2) - 1.875 / (z2 * z2 * z2)
            + 6.5625 / (z2 * z2 * z2 * z2);
        series / (z * std::f64::consts::PI.sqrt())
    }
}

/// `(1 - e^{-t}) / t`, continuous at `t = 0` and valid for negative `t`.
pub fn phi1(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - 0.5 * t + t * t / 6.0
    } else {
        -(-t).exp_m1() / t
    }
}
