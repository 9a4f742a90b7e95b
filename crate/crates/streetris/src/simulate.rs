//! Monte Carlo simulator of a single street (plus one adjacent street when
//! intersection RISs are deployed). It draws the point processes directly
//! and uses none of the analytical formulas.
//!
//! Every trial seeds its own `ChaCha8Rng` stream from `(seed, trial index)`,
//! so results do not depend on how trials are split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Poisson};

use crate::exec::Exec;
use crate::interference::{InterferenceContext, Regime};
use crate::model::{Deployment, ModelError, NetworkParams, Placement};

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    /// Half-length of the simulated street around the user, in metres.
    pub window_half_length: f64,
    pub seed: u64,
    /// Number of contiguous trial ranges handed to the executor.
    pub parallel_chunks: usize,
}

impl SimConfig {
    /// Defaults for `p`: window `60 / lambda_b`, 64 chunks.
    pub fn new(p: &NetworkParams, trials: u64, seed: u64) -> Self {
        Self {
            trials,
            window_half_length: 60.0 / p.lambda_b,
            seed,
            parallel_chunks: 64,
        }
    }

    pub fn validate(&self, p: &NetworkParams) -> Result<(), ModelError> {
        if self.trials == 0 {
            return Err(ModelError::InvalidParameter {
                name: "trials",
                value: 0.0,
                reason: "must be positive",
            });
        }
        if !(self.window_half_length >= 50.0 / p.lambda_b) || !self.window_half_length.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "window_half_length",
                value: self.window_half_length,
                reason: "must be finite and at least 50 / lambda_b",
            });
        }
        if self.parallel_chunks == 0 {
            return Err(ModelError::InvalidParameter {
                name: "parallel_chunks",
                value: 0.0,
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

/// A proportion estimate with its normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub estimate: f64,
    pub half_width_95: f64,
    pub trials_used: u64,
}

impl SimReport {
    pub fn from_counts(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            estimate: p,
            half_width_95: 1.96 * (p * (1.0 - p) / n as f64).sqrt(),
            trials_used: n,
        }
    }

    fn from_moments(sum: f64, sum_sq: f64, n: u64) -> Self {
        let m = sum / n as f64;
        let var = (sum_sq / n as f64 - m * m).max(0.0);
        Self {
            estimate: m,
            half_width_95: 1.96 * (var / n as f64).sqrt(),
            trials_used: n,
        }
    }

    /// Whether `x` lies within `k` half-widths (plus `slack`) of the estimate.
    pub fn agrees_with(&self, x: f64, k: f64, slack: f64) -> bool {
        (x - self.estimate).abs() <= k * self.half_width_95 + slack
    }
}

/// Street crossing the user's street.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacentStreet {
    /// Signed position of the intersection relative to the user.
    pub offset: f64,
    /// Signed BS positions along the adjacent street, relative to the intersection.
    pub bs: Vec<f64>,
}

/// One draw of the street, with positions signed relative to the user.
#[derive(Debug, Clone, PartialEq)]
pub struct StreetRealization {
    pub bs: Vec<f64>,
    pub blockages: Vec<f64>,
    pub adjacent: Option<AdjacentStreet>,
}

impl StreetRealization {
    /// Distance to the nearest blockage on the side of sign `side`.
    pub fn nearest_blockage(&self, side: f64) -> f64 {
        self.blockages
            .iter()
            .filter(|&&b| b * side > 0.0)
            .fold(f64::INFINITY, |m, &b| m.min(b.abs()))
    }

    /// Index and position of the BS nearest the user.
    pub fn nearest_bs(&self) -> Option<(usize, f64)> {
        self.bs
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    }
}

/// Whether a transmitter at signed offset `tx` and height `height` has LOS to
/// the user: no blockage strictly between the user and the transmitter's
/// shadow end `|tx| h_v / height`.
pub fn is_los(tx: f64, height: f64, real: &StreetRealization, p: &NetworkParams) -> bool {
    let shadow = tx.abs() * p.h_v / height;
    !real
        .blockages
        .iter()
        .any(|&b| b * tx > 0.0 && b.abs() < shadow)
}

fn ppp<R: Rng + ?Sized>(rate: f64, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let mean = rate * (hi - lo);
    if !(mean > 0.0) {
        return Vec::new();
    }
    let n = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Draw BSs and blockages on `[-L, L]`. With `with_intersection`, also draw
/// the nearest intersection on the side opposite the nearest BS, at an
/// `Exp(2 lambda_r)` distance, and the BSs on the crossing street.
pub fn sample_street<R: Rng + ?Sized>(
    p: &NetworkParams,
    with_intersection: bool,
    cfg: &SimConfig,
    rng: &mut R,
) -> StreetRealization {
    let l = cfg.window_half_length;
    let bs = ppp(p.lambda_b, -l, l, rng);
    let blockages = ppp(p.lambda_v, -l, l, rng);
    let mut real = StreetRealization {
        bs,
        blockages,
        adjacent: None,
    };
    if with_intersection {
        if let Some((_, x)) = real.nearest_bs() {
            let u: f64 = Exp::new(2.0 * p.lambda_r).expect("positive rate").sample(rng);
            if u < l {
                real.adjacent = Some(AdjacentStreet {
                    offset: -x.signum() * u,
                    bs: ppp(p.lambda_b, -l, l, rng),
                });
            }
        }
    }
    real
}

#[derive(Debug, Clone, Copy)]
struct AdjacentLink {
    r_ux: f64,
    y0: usize,
    r_xb: f64,
}

/// How the user is served in one realization.
#[derive(Debug, Clone, Copy)]
struct Serving {
    regime: Regime,
    bs: Option<usize>,
    side: f64,
    r_ub: f64,
    /// RIS distance from the serving BS.
    rho: f64,
    /// User main-lobe direction.
    pointing: f64,
    path_gain: f64,
    adjacent: Option<AdjacentLink>,
}

fn serve(real: &StreetRealization, p: &NetworkParams, dep: &Deployment, cfg: &SimConfig) -> (Option<Serving>, bool) {
    let Some((idx, x)) = real.nearest_bs() else {
        return (None, true);
    };
    let pl = p.path_loss();
    let side = if x >= 0.0 { 1.0 } else { -1.0 };
    let r = x.abs();
    let rho = match dep.placement {
        Placement::FixedDistance { r_s } => r_s,
        Placement::CellFraction { f } => {
            let nn = real
                .bs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != idx)
                .fold(f64::INFINITY, |m, (_, &b)| m.min((b - x).abs()));
            0.5 * f * nn.min(2.0 * cfg.window_half_length)
        }
    };
    let base = Serving {
        regime: Regime::Direct,
        bs: Some(idx),
        side,
        r_ub: r,
        rho,
        pointing: side,
        path_gain: pl.ell_ub(r),
        adjacent: None,
    };
    if is_los(x, p.h_b, real, p) {
        return (Some(base), false);
    }
    let ris = side * (r - rho);
    if is_los(ris, p.h_s, real, p) {
        let pointing = if ris != 0.0 { ris.signum() } else { side };
        return (
            Some(Serving {
                regime: Regime::ViaRis,
                pointing,
                path_gain: crate::model::ell_r(r, rho, &pl, p.n_elements),
                ..base
            }),
            false,
        );
    }
    let Some(adj) = &real.adjacent else {
        return (None, true);
    };
    if !dep.with_intersection_ris || !is_los(adj.offset, p.h_s, real, p) {
        return (None, true);
    }
    let Some((y0, r_xb)) = adj
        .bs
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, y)| (i, y.abs()))
    else {
        return (None, true);
    };
    let r_ux = adj.offset.abs();
    let regime = if r > rho {
        Regime::IntersectionBeyondRis
    } else {
        Regime::IntersectionBeforeRis
    };
    (
        Some(Serving {
            regime,
            pointing: adj.offset.signum(),
            path_gain: pl.cascade(r_ux, r_xb, p.n_elements),
            adjacent: Some(AdjacentLink { r_ux, y0, r_xb }),
            ..base
        }),
        true,
    )
}

struct Fading {
    gamma: Gamma<f64>,
}

impl Fading {
    fn new(p: &NetworkParams) -> Self {
        let n = p.n0 as f64;
        Self {
            gamma: Gamma::new(n, 1.0 / n).expect("valid shape"),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng)
    }
}

fn bs_gain<R: Rng + ?Sized>(p: &NetworkParams, rng: &mut R) -> f64 {
    if rng.random_bool(0.5) {
        p.u_m
    } else {
        p.u_s
    }
}

/// Aggregate interference power (normalized by the transmit power).
fn interference<R: Rng + ?Sized>(
    real: &StreetRealization,
    sv: &Serving,
    p: &NetworkParams,
    fading: &Fading,
    reflected: bool,
    rng: &mut R,
) -> f64 {
    let pl = p.path_loss();
    let mut total = 0.0;
    let near = [real.nearest_blockage(1.0), real.nearest_blockage(-1.0)];
    for (i, &x) in real.bs.iter().enumerate() {
        if Some(i) == sv.bs {
            continue;
        }
        let side = if x >= 0.0 { 1.0 } else { -1.0 };
        let d = if side > 0.0 { near[0] } else { near[1] };
        if x.abs() * p.h_v / p.h_b >= d {
            continue;
        }
        let v = if side == sv.pointing { p.v_m } else { p.v_s };
        total += fading.sample(rng) * bs_gain(p, rng) * v * pl.ell_ub(x.abs());
    }
    if !reflected {
        return total;
    }
    match sv.regime {
        Regime::Direct => {}
        Regime::ViaRis => {
            let ris = sv.side * (sv.r_ub - sv.rho);
            let reach = p.interference_reach(sv.rho);
            for (i, &x) in real.bs.iter().enumerate() {
                if Some(i) == sv.bs || x * sv.side <= 0.0 {
                    continue;
                }
                if x.abs() > sv.r_ub && x.abs() < sv.r_ub + reach {
                    let g = pl.cascade((sv.r_ub - sv.rho).abs(), (x - ris).abs(), p.n_elements);
                    total += fading.sample(rng) * bs_gain(p, rng) * p.v_m * g;
                }
            }
        }
        Regime::IntersectionBeyondRis | Regime::IntersectionBeforeRis => {
            let (Some(link), Some(adj)) = (sv.adjacent, &real.adjacent) else {
                return total;
            };
            let side = adj.bs[link.y0].signum();
            let reach = p.interference_reach(link.r_xb);
            for (j, &y) in adj.bs.iter().enumerate() {
                if j == link.y0 || y * side <= 0.0 {
                    continue;
                }
                if y.abs() > link.r_xb && y.abs() < link.r_xb + reach {
                    let g = pl.cascade(link.r_ux, y.abs(), p.n_elements);
                    total += fading.sample(rng) * bs_gain(p, rng) * p.v_m * g;
                }
            }
        }
    }
    total
}

/// Result of one trial. `snr` and `sinr` are zero when the user is not served.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub regime: Option<Regime>,
    pub snr: f64,
    pub sinr: f64,
    /// BS and associated RIS both blocked.
    pub joint_blocked: bool,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Run trial number `trial` of the experiment seeded by `cfg.seed`.
pub fn run_trial(p: &NetworkParams, dep: &Deployment, cfg: &SimConfig, trial: u64) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let real = sample_street(p, dep.with_intersection_ris, cfg, &mut rng);
    let fading = Fading::new(p);
    let (sv, joint_blocked) = serve(&real, p, dep, cfg);
    let Some(sv) = sv else {
        return TrialOutcome {
            regime: None,
            snr: 0.0,
            sinr: 0.0,
            joint_blocked,
        };
    };
    let signal = fading.sample(&mut rng) * p.main_gain() * sv.path_gain;
    let i = interference(&real, &sv, p, &fading, true, &mut rng);
    let sigma2 = p.sigma2();
    TrialOutcome {
        regime: Some(sv.regime),
        snr: signal / sigma2,
        sinr: signal / (i + sigma2),
        joint_blocked,
    }
}

/// Monte Carlo estimates over a threshold grid (linear thresholds).
#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub gammas: Vec<f64>,
    pub snr: Vec<SimReport>,
    pub sinr: Vec<SimReport>,
    pub joint_blockage: SimReport,
    pub direct: SimReport,
    pub via_ris: SimReport,
    pub intersection: SimReport,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    n: u64,
    snr: Vec<u64>,
    sinr: Vec<u64>,
    joint: u64,
    direct: u64,
    via_ris: u64,
    intersection: u64,
}

impl Tally {
    fn new(k: usize) -> Self {
        Self {
            snr: vec![0; k],
            sinr: vec![0; k],
            ..Self::default()
        }
    }

    fn merge(mut self, other: &Tally) -> Self {
        self.n += other.n;
        for (a, b) in self.snr.iter_mut().zip(&other.snr) {
            *a += b;
        }
        for (a, b) in self.sinr.iter_mut().zip(&other.sinr) {
            *a += b;
        }
        self.joint += other.joint;
        self.direct += other.direct;
        self.via_ris += other.via_ris;
        self.intersection += other.intersection;
        self
    }
}

fn chunks(cfg: &SimConfig) -> Vec<(u64, u64)> {
    let k = (cfg.parallel_chunks as u64).min(cfg.trials).max(1);
    (0..k)
        .map(|c| (c * cfg.trials / k, (c + 1) * cfg.trials / k))
        .collect()
}

/// Estimate SNR/SINR coverage, association and joint-blockage
/// probabilities. Deterministic for a given config, whatever `exec` is.
pub fn simulate(
    p: &NetworkParams,
    dep: &Deployment,
    gammas: &[f64],
    cfg: &SimConfig,
    exec: Exec,
) -> Result<SimSummary, ModelError> {
    p.validate()?;
    dep.validate()?;
    cfg.validate(p)?;
    let k = gammas.len();
    let parts = exec.map(&chunks(cfg), |&(a, b)| {
        let mut t = Tally::new(k);
        for trial in a..b {
            let o = run_trial(p, dep, cfg, trial);
            t.n += 1;
            t.joint += o.joint_blocked as u64;
            match o.regime {
                Some(Regime::Direct) => t.direct += 1,
                Some(Regime::ViaRis) => t.via_ris += 1,
                Some(_) => t.intersection += 1,
                None => {}
            }
            for (j, &g) in gammas.iter().enumerate() {
                t.snr[j] += (o.snr > g) as u64;
                t.sinr[j] += (o.sinr > g) as u64;
            }
        }
        t
    });
    let total = parts.iter().fold(Tally::new(k), |acc, t| acc.merge(t));
    let n = total.n;
    let rep = |h: u64| SimReport::from_counts(h, n);
    Ok(SimSummary {
        gammas: gammas.to_vec(),
        snr: total.snr.iter().map(|&h| rep(h)).collect(),
        sinr: total.sinr.iter().map(|&h| rep(h)).collect(),
        joint_blockage: rep(total.joint),
        direct: rep(total.direct),
        via_ris: rep(total.via_ris),
        intersection: rep(total.intersection),
    })
}

/// SNR of a user standing at an intersection of two streets, with BSs and
/// blockages on all four rays and an overhead RIS as last resort.
pub fn intersection_user_snr(p: &NetworkParams, r_s: f64, cfg: &SimConfig, trial: u64) -> f64 {
    let mut rng = trial_rng(cfg.seed, trial);
    let l = cfg.window_half_length;
    let mut nearest = (usize::MAX, f64::INFINITY);
    let mut blocks = [f64::INFINITY; 4];
    for k in 0..4 {
        for b in ppp(p.lambda_b, 0.0, l, &mut rng) {
            if b < nearest.1 {
                nearest = (k, b);
            }
        }
        blocks[k] = ppp(p.lambda_v, 0.0, l, &mut rng)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
    }
    let (k, r) = nearest;
    if k == usize::MAX {
        return 0.0;
    }
    let pl = p.path_loss();
    let opposite = k ^ 1;
    let gain = if r * p.h_v / p.h_b < blocks[k] {
        pl.ell_ub(r)
    } else if (r >= r_s && (r - r_s) * p.h_v / p.h_s < blocks[k])
        || (r < r_s && (r_s - r) * p.h_v / p.h_s < blocks[opposite])
    {
        crate::model::ell_r(r, r_s, &pl, p.n_elements)
    } else {
        pl.cascade(0.0, r, p.n_elements)
    };
    Fading::new(p).sample(&mut rng) * p.main_gain() * gain / p.sigma2()
}

/// SNR coverage of the intersection user over a threshold grid.
pub fn simulate_intersection_user(
    p: &NetworkParams,
    r_s: f64,
    gammas: &[f64],
    cfg: &SimConfig,
    exec: Exec,
) -> Result<Vec<SimReport>, ModelError> {
    p.validate()?;
    cfg.validate(p)?;
    let parts = exec.map(&chunks(cfg), |&(a, b)| {
        let mut hits = vec![0u64; gammas.len()];
        for trial in a..b {
            let snr = intersection_user_snr(p, r_s, cfg, trial);
            for (h, &g) in hits.iter_mut().zip(gammas) {
                *h += (snr > g) as u64;
            }
        }
        hits
    });
    let mut hits = vec![0u64; gammas.len()];
    for part in &parts {
        for (h, x) in hits.iter_mut().zip(part) {
            *h += x;
        }
    }
    Ok(hits.into_iter().map(|h| SimReport::from_counts(h, cfg.trials)).collect())
}

/// Outage with and without an intersection RIS, for a BS at distance
/// `d_bi` from an intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageComparison {
    pub with_intersection: SimReport,
    pub baseline: SimReport,
}

/// Outage of a user placed uniformly between a BS and the midpoint to its
/// nearest neighbour, on the side facing an intersection at `d_bi`. The user
/// takes the strongest LOS link among the direct path, the BS's RIS at `r_s`
/// and (unless excluded) the intersection RIS.
pub fn outage_comparison(
    p: &NetworkParams,
    r_s: f64,
    d_bi: f64,
    gamma: f64,
    cfg: &SimConfig,
    exec: Exec,
) -> Result<OutageComparison, ModelError> {
    p.validate()?;
    cfg.validate(p)?;
    if !(d_bi >= 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "d_bi",
            value: d_bi,
            reason: "must be non-negative",
        });
    }
    let parts = exec.map(&chunks(cfg), |&(a, b)| {
        let mut with = 0u64;
        let mut base = 0u64;
        for trial in a..b {
            let (w, o) = outage_trial(p, r_s, d_bi, gamma, cfg, trial);
            with += w as u64;
            base += o as u64;
        }
        (with, base)
    });
    let (w, o) = parts.iter().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    Ok(OutageComparison {
        with_intersection: SimReport::from_counts(w, cfg.trials),
        baseline: SimReport::from_counts(o, cfg.trials),
    })
}

fn outage_trial(p: &NetworkParams, r_s: f64, d_bi: f64, gamma: f64, cfg: &SimConfig, trial: u64) -> (bool, bool) {
    let mut rng = trial_rng(cfg.seed, trial);
    let l = cfg.window_half_length;
    let pl = p.path_loss();
    let fading = Fading::new(p);
    // Street coordinates with the serving BS at the origin.
    let others = ppp(p.lambda_b, -l, l, &mut rng);
    let r_bn = others.iter().fold(f64::INFINITY, |m, &b| m.min(b.abs())).min(l);
    let t = rng.random_range(0.0..=0.5 * r_bn);
    let real = StreetRealization {
        bs: vec![-t],
        blockages: ppp(p.lambda_v, -l, l, &mut rng),
        adjacent: None,
    };
    let adjacent = ppp(p.lambda_b, -l, l, &mut rng);
    let r_xb = adjacent.iter().fold(f64::INFINITY, |m, &y| m.min(y.abs()));

    let mut best = 0.0f64;
    if is_los(-t, p.h_b, &real, p) {
        best = best.max(fading.sample(&mut rng) * pl.ell_ub(t));
    }
    if is_los(r_s - t, p.h_s, &real, p) {
        best = best.max(fading.sample(&mut rng) * crate::model::ell_r(t, r_s, &pl, p.n_elements));
    }
    let baseline = best;
    if r_xb.is_finite() && is_los(d_bi - t, p.h_s, &real, p) {
        best = best.max(fading.sample(&mut rng) * pl.cascade((d_bi - t).abs(), r_xb, p.n_elements));
    }
    let snr = |g: f64| g * p.main_gain() / p.sigma2();
    (snr(best) <= gamma, snr(baseline) <= gamma)
}

/// Monte Carlo estimate of `E[exp(-s I)]` given the geometry in `ctx`, with
/// the other BSs drawn from their conditional law. `f` is the cell fraction
/// when `ctx.r_bn` is set.
pub fn empirical_laplace(
    s: f64,
    ctx: &InterferenceContext,
    f: Option<f64>,
    p: &NetworkParams,
    cfg: &SimConfig,
) -> SimReport {
    let fading = Fading::new(p);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial);
        let (real, sv) = conditioned_street(ctx, f, p, cfg, &mut rng);
        let i = interference(&real, &sv, p, &fading, true, &mut rng);
        let e = (-s * i).exp();
        sum += e;
        sum_sq += e * e;
    }
    SimReport::from_moments(sum, sum_sq, cfg.trials)
}

fn conditioned_street<R: Rng + ?Sized>(
    ctx: &InterferenceContext,
    f: Option<f64>,
    p: &NetworkParams,
    cfg: &SimConfig,
    rng: &mut R,
) -> (StreetRealization, Serving) {
    let l = cfg.window_half_length;
    let r = ctx.r_ub;
    let mut bs = vec![r];
    let (right_from, left_from) = match ctx.r_bn {
        Some(y) => {
            let right = y < 2.0 * r || rng.random_bool(0.5);
            if right {
                bs.push(r + y);
            } else {
                bs.push(-(y - r));
            }
            (r + y, r.max(y - r))
        }
        None => (r, r),
    };
    bs.extend(ppp(p.lambda_b, right_from, l, rng));
    bs.extend(ppp(p.lambda_b, -l, -left_from, rng));
    let blockages = [ctx.d_1, -ctx.d_2]
        .into_iter()
        .filter(|b| b.is_finite())
        .collect();
    let rho = match (ctx.r_bn, f) {
        (Some(y), Some(f)) => 0.5 * f * y,
        _ => ctx.r_s,
    };
    let mut sv = Serving {
        regime: ctx.regime,
        bs: Some(0),
        side: 1.0,
        r_ub: r,
        rho,
        pointing: 1.0,
        path_gain: 0.0,
        adjacent: None,
    };
    let mut adjacent = None;
    match ctx.regime {
        Regime::Direct => {}
        Regime::ViaRis => {
            sv.pointing = if r < rho { -1.0 } else { 1.0 };
        }
        Regime::IntersectionBeyondRis | Regime::IntersectionBeforeRis => {
            let r_ux = ctx.r_ux.expect("intersection context needs r_ux");
            let r_xb = ctx.r_xb.expect("intersection context needs r_xb");
            let mut ys = vec![r_xb];
            ys.extend(ppp(p.lambda_b, r_xb, l, rng));
            ys.extend(ppp(p.lambda_b, -l, -r_xb, rng));
            adjacent = Some(AdjacentStreet { offset: -r_ux, bs: ys });
            sv.pointing = -1.0;
            sv.adjacent = Some(AdjacentLink { r_ux, y0: 0, r_xb });
        }
    }
    (
        StreetRealization {
            bs,
            blockages,
            adjacent,
        },
        sv,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Deployment;

    fn small(p: &NetworkParams, trials: u64) -> SimConfig {
        SimConfig::new(p, trials, 7)
    }

    #[test]
    fn los_rule() {
        let p = NetworkParams::default();
        let real = StreetRealization {
            bs: vec![],
            blockages: vec![1e-12],
            adjacent: None,
        };
        assert!(!is_los(20.0, p.h_b, &real, &p));
        assert!(is_los(-20.0, p.h_b, &real, &p));
        let empty = StreetRealization {
            bs: vec![],
            blockages: vec![],
            adjacent: None,
        };
        assert!(is_los(500.0, p.h_b, &empty, &p));
        let far = StreetRealization {
            bs: vec![],
            blockages: vec![6.1],
            adjacent: None,
        };
        // Shadow of a BS at 20 m is 6 m.
        assert!(is_los(20.0, p.h_b, &far, &p));
        assert!(!is_los(21.0, p.h_b, &far, &p));
    }

    #[test]
    fn config_validation() {
        let p = NetworkParams::default();
        assert!(small(&p, 10).validate(&p).is_ok());
        let short = SimConfig {
            window_half_length: 100.0,
            ..small(&p, 10)
        };
        assert!(short.validate(&p).is_err());
        assert!(SimConfig { trials: 0, ..small(&p, 10) }.validate(&p).is_err());
    }

    #[test]
    fn deterministic_across_executors() {
        let p = NetworkParams::default();
        let dep = Deployment::fixed(20.0);
        let cfg = SimConfig {
            parallel_chunks: 7,
            ..small(&p, 3000)
        };
        let g = [1e-6, 1.0, 100.0];
        let a = simulate(&p, &dep, &g, &cfg, Exec::Sequential).unwrap();
        let b = simulate(&p, &dep, &g, &cfg, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        let c = simulate(&p, &dep, &g, &SimConfig { parallel_chunks: 1, ..cfg }, Exec::Parallel).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn trial_outcome_consistency() {
        let p = NetworkParams::default();
        let dep = Deployment::fixed(20.0).with_intersection();
        let cfg = small(&p, 1);
        for t in 0..2000 {
            let o = run_trial(&p, &dep, &cfg, t);
            assert!(o.sinr <= o.snr);
            match o.regime {
                None => assert!(o.joint_blocked && o.snr == 0.0),
                Some(Regime::Direct) | Some(Regime::ViaRis) => assert!(!o.joint_blocked),
                Some(_) => assert!(o.joint_blocked),
            }
        }
    }

    #[test]
    fn sample_street_counts_are_poisson() {
        let p = NetworkParams::default();
        let cfg = small(&p, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 2000;
        let mut sum = 0usize;
        for _ in 0..n {
            sum += sample_street(&p, false, &cfg, &mut rng).bs.len();
        }
        let mean = sum as f64 / n as f64;
        let expect = 2.0 * p.lambda_b * cfg.window_half_length;
        // Standard error sqrt(120 / 2000) ~ 0.25.
        assert!((mean - expect).abs() < 1.0, "{mean}");
    }

    #[test]
    fn report_half_width() {
        let r = SimReport::from_counts(50, 100);
        assert!((r.half_width_95 - 0.098).abs() < 1e-12);
        assert!(r.agrees_with(0.55, 1.0, 0.0));
        assert!(!r.agrees_with(0.7, 1.0, 0.0));
    }
}
