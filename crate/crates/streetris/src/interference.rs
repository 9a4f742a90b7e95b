//! Laplace transforms of the aggregate interference and SINR coverage.
//!
//! Interference comes from LOS BSs on the user's street (gain `U V` with `U`
//! uniform over the two BS beam levels and `V` set by the user's pointing
//! direction), and from BSs reflected by the serving RIS or by an
//! intersection RIS within its beam reach.

use std::f64::consts::PI;

use crate::blockage::{nn_dist_pdf, p_block_direct, p_block_ris};
use crate::model::NetworkParams;
use crate::quadrature::{alzer_weights, IntegrationSpec, QuadError, Quadrature};

/// Association regime of a typical user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Served over the direct LOS link.
    Direct,
    /// Served through the RIS associated with its BS.
    ViaRis,
    /// Served through an intersection RIS; the user is beyond its BS's RIS.
    IntersectionBeyondRis,
    /// Served through an intersection RIS; the user lies between its BS and that BS's RIS.
    IntersectionBeforeRis,
}

/// What the SINR computation treats as interference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceModel {
    #[default]
    Full,
    /// Drop interference reflected by RISs.
    NoViaRis,
    /// Noise only; the SINR reduces to the SNR.
    NoneAtAll,
}

impl InterferenceModel {
    fn direct(self) -> bool {
        self != InterferenceModel::NoneAtAll
    }
    fn reflected(self) -> bool {
        self == InterferenceModel::Full
    }
}

/// Geometry conditioning a Laplace transform. Distances are horizontal, in
/// metres. `d_1` is the nearest blockage on the serving BS's side and `d_2`
/// the nearest on the other side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceContext {
    pub regime: Regime,
    pub r_ub: f64,
    pub d_1: f64,
    pub d_2: f64,
    /// RIS distance from the serving BS.
    pub r_s: f64,
    /// Serving-BS nearest-neighbour distance (cell-fraction placement only).
    pub r_bn: Option<f64>,
    /// User to intersection distance (intersection regimes only).
    pub r_ux: Option<f64>,
    /// Intersection to serving BS on the adjacent street.
    pub r_xb: Option<f64>,
}

impl InterferenceContext {
    pub fn direct(r_ub: f64, d_1: f64, d_2: f64) -> Self {
        Self {
            regime: Regime::Direct,
            r_ub,
            d_1,
            d_2,
            r_s: f64::NAN,
            r_bn: None,
            r_ux: None,
            r_xb: None,
        }
    }

    pub fn via_ris(r_ub: f64, r_s: f64, d_1: f64, d_2: f64) -> Self {
        Self {
            regime: Regime::ViaRis,
            r_s,
            ..Self::direct(r_ub, d_1, d_2)
        }
    }

    /// Via-RIS user whose RIS sits at `f r_bn / 2` from the BS.
    pub fn cell(r_ub: f64, r_bn: f64, f: f64, d_1: f64, d_2: f64) -> Self {
        Self {
            regime: Regime::ViaRis,
            r_s: 0.5 * f * r_bn,
            r_bn: Some(r_bn),
            ..Self::direct(r_ub, d_1, d_2)
        }
    }

    pub fn intersection(r_ub: f64, r_s: f64, d_1: f64, d_2: f64, r_ux: f64, r_xb: f64) -> Self {
        let regime = if r_ub > r_s {
            Regime::IntersectionBeyondRis
        } else {
            Regime::IntersectionBeforeRis
        };
        Self {
            regime,
            r_ub,
            d_1,
            d_2,
            r_s,
            r_bn: None,
            r_ux: Some(r_ux),
            r_xb: Some(r_xb),
        }
    }
}

/// Regime implied by the blockage geometry, or `None` on connection failure
/// (and no usable intersection RIS). `r_ux` enables the intersection fallback.
pub fn classify(r_ub: f64, r_s: f64, d_1: f64, d_2: f64, r_ux: Option<f64>, p: &NetworkParams) -> Option<Regime> {
    let shadow = |x: f64, h: f64| x * p.h_v / h;
    if d_1 > shadow(r_ub, p.h_b) {
        return Some(Regime::Direct);
    }
    let ris_los = if r_ub > r_s {
        d_1 > shadow(r_ub - r_s, p.h_s)
    } else {
        d_2 > shadow(r_s - r_ub, p.h_s)
    };
    if ris_los {
        return Some(Regime::ViaRis);
    }
    let u = r_ux?;
    if d_2 > shadow(u, p.h_s) {
        Some(if r_ub > r_s {
            Regime::IntersectionBeyondRis
        } else {
            Regime::IntersectionBeforeRis
        })
    } else {
        None
    }
}

// 1 - E[(1 + a U / n0)^{-n0}] for U uniform on {u_m, u_s}, without
// cancellation for small `a`.
fn kernel(a: f64, p: &NetworkParams) -> f64 {
    let n = p.n0 as f64;
    let one = |x: f64| -(-n * (x / n).ln_1p()).exp_m1();
    0.5 * (one(a * p.u_m) + one(a * p.u_s))
}

// E[(1 + a U / n0)^{-n0}] for a single interferer.
fn single(a: f64, p: &NetworkParams) -> f64 {
    1.0 - kernel(a, p)
}

/// Nested-quadrature context that may replace the innermost kernel integral
/// by its closed form (Rayleigh fading, `alpha = 2`).
struct Nest<'a> {
    q: &'a Quadrature,
    closed: bool,
}

impl std::ops::Deref for Nest<'_> {
    type Target = Quadrature;
    fn deref(&self) -> &Quadrature {
        self.q
    }
}

impl<'a> Nest<'a> {
    fn numeric(q: &'a Quadrature) -> Self {
        Self { q, closed: false }
    }

    fn fastest(q: &'a Quadrature, p: &NetworkParams) -> Self {
        Self {
            q,
            closed: p.n0 == 1 && p.alpha == 2.0,
        }
    }

    /// `int_lo^hi kernel(b K ((x - shift)^2 + h^2)^{-alpha/2}) dx`; `hi` may be infinite.
    fn kernel_integral(&self, b: f64, h: f64, shift: f64, lo: f64, hi: f64, p: &NetworkParams) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let k = p.path_loss().k;
        if self.closed {
            // int a / ((x - shift)^2 + w^2) dx = a / w * atan((x - shift) / w),  w^2 = h^2 + a
            let piece = |u: f64| {
                let a = b * k * u;
                if a == 0.0 {
                    return 0.0;
                }
                let w = (h * h + a).sqrt();
                a / w * (((hi - shift) / w).atan() - ((lo - shift) / w).atan())
            };
            return 0.5 * (piece(p.u_m) + piece(p.u_s));
        }
        let half = -0.5 * p.alpha;
        let g = |x: f64| {
            let d2 = (x - shift) * (x - shift) + h * h;
            let ell = if p.alpha == 2.0 { k / d2 } else { k * d2.powf(half) };
            kernel(b * ell, p)
        };
        if hi.is_infinite() {
            self.q.to_infinity(g, lo)
        } else {
            self.q.finite(g, lo, hi)
        }
    }
}

/// `exp(-lambda_b * int_lo^hi g)` for street BSs with user gain `v`.
fn street_factor(q: &Nest, s: f64, lo: f64, hi: f64, v: f64, p: &NetworkParams) -> f64 {
    if !(hi > lo) {
        return 1.0;
    }
    (-p.lambda_b * q.kernel_integral(s * v, p.h_b, 0.0, lo, hi, p)).exp()
}

/// Reflected interference through a RIS at signed offset `ris` (positive on
/// the serving side) from the user; interferers occupy `(lo, hi)` on the
/// serving side.
fn reflected_factor(q: &Nest, s: f64, lo: f64, hi: f64, ris: f64, p: &NetworkParams) -> f64 {
    if !(hi > lo) {
        return 1.0;
    }
    let us = p.path_loss().ell_us(ris.abs());
    let c = PI * ((p.n_elements - 1) as f64).powi(2) * us * p.v_m;
    (-p.lambda_b * q.kernel_integral(s * c, p.h_s - p.h_b, ris, lo, hi, p)).exp()
}

/// Laplace transform of street interference for a user served directly.
pub fn laplace_direct(s: f64, ctx: &InterferenceContext, p: &NetworkParams, spec: &IntegrationSpec) -> Result<f64, QuadError> {
    let q = Quadrature::new(*spec);
    let v = direct_in(&Nest::numeric(&q), s, ctx, p);
    q.finish(v)
}

fn direct_in(q: &Nest, s: f64, ctx: &InterferenceContext, p: &NetworkParams) -> f64 {
    let k = p.h_b / p.h_v;
    let r = ctx.r_ub;
    street_factor(q, s, r, ctx.d_1 * k, p.v_m, p) * street_factor(q, s, r, ctx.d_2 * k, p.v_s, p)
}

/// Closed form of [`laplace_direct`] for Rayleigh fading, `alpha = 2` and
/// unblocked sides, used as a cross-check.
pub fn laplace_direct_rayleigh(s: f64, r_ub: f64, p: &NetworkParams) -> f64 {
    assert!(p.n0 == 1 && p.alpha == 2.0, "closed form needs n0 = 1 and alpha = 2");
    let k = p.path_loss().k;
    let h2 = p.h_b * p.h_b;
    // int_r^inf a / (x^2 + w^2) dx = a / w * (pi/2 - atan(r / w)),  w^2 = h^2 + a
    let piece = |gain: f64| {
        let a = s * k * gain;
        let w = (h2 + a).sqrt();
        a / w * (0.5 * PI - (r_ub / w).atan())
    };
    let side = |v: f64| 0.5 * (piece(p.u_m * v) + piece(p.u_s * v));
    (-p.lambda_b * (side(p.v_m) + side(p.v_s))).exp()
}

/// Laplace transform for a user served through its associated RIS at fixed
/// distance `r_s` from the BS.
pub fn laplace_via_ris(s: f64, ctx: &InterferenceContext, p: &NetworkParams, spec: &IntegrationSpec) -> Result<f64, QuadError> {
    let q = Quadrature::new(*spec);
    let v = via_ris_in(&Nest::numeric(&q), s, ctx, p, InterferenceModel::Full);
    q.finish(v)
}

fn via_ris_in(q: &Nest, s: f64, ctx: &InterferenceContext, p: &NetworkParams, model: InterferenceModel) -> f64 {
    let r = ctx.r_ub;
    let before = r < ctx.r_s;
    let v = if before { p.v_m } else { p.v_s };
    let street = if model.direct() {
        street_factor(q, s, r, ctx.d_2 * p.h_b / p.h_v, v, p)
    } else {
        1.0
    };
    let reflected = if model.reflected() {
        reflected_factor(q, s, r, r + p.interference_reach(ctx.r_s), r - ctx.r_s, p)
    } else {
        1.0
    };
    street * reflected
}

/// Laplace transform for a via-RIS user when the RIS sits at `f r_bn / 2`.
///
/// Conditioning on `r_bn` fixes the neighbour BS: it is on the serving side
/// at `r + r_bn` when `r_bn < 2 r`, and otherwise on either side with equal
/// probability. The remaining BSs form a PPP outside the interval the
/// neighbour bounds.
pub fn laplace_cell(
    s: f64,
    ctx: &InterferenceContext,
    f: f64,
    p: &NetworkParams,
    spec: &IntegrationSpec,
) -> Result<f64, QuadError> {
    let q = Quadrature::new(*spec);
    let y = ctx.r_bn.expect("cell context needs r_bn");
    let v = cell_in(&Nest::numeric(&q), s, ctx.r_ub, y, f, ctx.d_2 * p.h_b / p.h_v, p, InterferenceModel::Full);
    q.finish(v)
}

#[allow(clippy::too_many_arguments)]
fn cell_in(
    q: &Nest,
    s: f64,
    r: f64,
    y: f64,
    f: f64,
    big_d2: f64,
    p: &NetworkParams,
    model: InterferenceModel,
) -> f64 {
    let rho = 0.5 * f * y;
    let v = if r < rho { p.v_m } else { p.v_s };
    let ris = r - rho;
    let z = p.interference_reach(rho);
    let (street, left) = if model.direct() {
        let lo = r.max(y - r);
        let street = street_factor(q, s, lo, big_d2, v, p);
        let left = if y - r < big_d2 {
            single(s * p.path_loss().ell_ub(y - r) * v, p)
        } else {
            1.0
        };
        (street, left)
    } else {
        (1.0, 1.0)
    };
    let (reflected, neighbour_ris) = if model.reflected() {
        let pl = p.path_loss();
        let reflected = reflected_factor(q, s, r + y, r + z, ris, p);
        let neighbour = if z >= y {
            let c = PI * ((p.n_elements - 1) as f64).powi(2) * pl.ell_us(ris.abs()) * p.v_m;
            single(s * c * pl.ell_sb(y + rho), p)
        } else {
            1.0
        };
        (reflected, neighbour)
    } else {
        (1.0, 1.0)
    };
    let neighbour = if y < 2.0 * r {
        neighbour_ris
    } else {
        0.5 * neighbour_ris + 0.5 * left
    };
    street * reflected * neighbour
}

/// Laplace transform for a user served through an intersection RIS.
pub fn laplace_intersection(
    s: f64,
    ctx: &InterferenceContext,
    p: &NetworkParams,
    spec: &IntegrationSpec,
) -> Result<f64, QuadError> {
    let q = Quadrature::new(*spec);
    let u = ctx.r_ux.expect("intersection context needs r_ux");
    let x = ctx.r_xb.expect("intersection context needs r_xb");
    let v = intersection_in(&Nest::numeric(&q), s, ctx.r_ub, ctx.d_2 * p.h_b / p.h_v, u, x, p, InterferenceModel::Full);
    q.finish(v)
}

#[allow(clippy::too_many_arguments)]
fn intersection_in(
    q: &Nest,
    s: f64,
    r: f64,
    big_d2: f64,
    u: f64,
    x: f64,
    p: &NetworkParams,
    model: InterferenceModel,
) -> f64 {
    let street = if model.direct() {
        street_factor(q, s, r, big_d2, p.v_m, p)
    } else {
        1.0
    };
    street * adjacent_factor(q, s, u, x, p, model)
}

fn adjacent_factor(q: &Nest, s: f64, u: f64, x: f64, p: &NetworkParams, model: InterferenceModel) -> f64 {
    if !model.reflected() {
        return 1.0;
    }
    let c = PI * ((p.n_elements - 1) as f64).powi(2) * p.path_loss().ell_us(u) * p.v_m;
    let z = p.interference_reach(x);
    if z <= 0.0 {
        return 1.0;
    }
    (-p.lambda_b * q.kernel_integral(s * c, p.h_s - p.h_b, 0.0, x, x + z, p)).exp()
}

// Below this the noise factor zeroes the integrand.
const NEGLIGIBLE: f64 = 1e-300;

fn serving_density(r: f64, p: &NetworkParams) -> f64 {
    2.0 * p.lambda_b * (-2.0 * p.lambda_b * r).exp()
}

/// `E[1{D > lo, D < hi} exp(-lambda_b int_r^{max(r, D)} g)]` for
/// `D ~ Exp(mu)`, with the street window ending at `D`.
fn shadow_expectation(q: &Nest, mu: f64, lo: f64, hi: f64, r: f64, s: f64, v: f64, p: &NetworkParams) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    if mu == 0.0 {
        // Blockage at infinity.
        return if hi.is_infinite() {
            street_factor(q, s, r, f64::INFINITY, v, p)
        } else {
            0.0
        };
    }
    let cdf = |t: f64| if t.is_infinite() { 1.0 } else { -(-mu * t).exp_m1() };
    let below = if lo < r {
        (cdf(r.min(hi)) - cdf(lo)).max(0.0)
    } else {
        0.0
    };
    let start = lo.max(r);
    if !(hi > start) {
        return below;
    }
    let inner = |d: f64| mu * (-mu * d).exp() * (-p.lambda_b * q.kernel_integral(s * v, p.h_b, 0.0, r, d, p)).exp();
    let above = if hi.is_infinite() {
        q.exp_tail(inner, start, mu, &[])
    } else {
        q.finite(inner, start, hi)
    };
    below + above
}

/// SINR coverage with every RIS at fixed distance `r_s`, using the Alzer
/// bound on the desired-signal fading.
pub fn sinr_coverage_fixed(
    gamma: f64,
    r_s: f64,
    p: &NetworkParams,
    spec: &IntegrationSpec,
    model: InterferenceModel,
) -> Result<f64, QuadError> {
    let quad = Quadrature::new(*spec);
    let q = Nest::fastest(&quad, p);
    let v = direct_sinr_in(&q, gamma, p, model) + via_ris_sinr_in(&q, gamma, r_s, p, model);
    quad.finish(v)
}

fn direct_sinr_in(q: &Nest, gamma: f64, p: &NetworkParams, model: InterferenceModel) -> f64 {
    let pl = p.path_loss();
    let sigma2 = p.sigma2();
    let g = p.main_gain();
    let mu_b = p.mu_b();
    let mut total = 0.0;
    for term in alzer_weights(p.n0) {
        let integrand = |r: f64| {
            let s = term.rate() * gamma / (pl.ell_ub(r) * g);
            let noise = (-s * sigma2).exp();
            if noise < NEGLIGIBLE {
                return 0.0;
            }
            let (e1, e2) = if model.direct() {
                let e1 = shadow_expectation(q, mu_b, r, f64::INFINITY, r, s, p.v_m, p);
                let e2 = p_block_direct(r, p) + shadow_expectation(q, mu_b, r, f64::INFINITY, r, s, p.v_s, p);
                (e1, e2)
            } else {
                ((-mu_b * r).exp(), 1.0)
            };
            serving_density(r, p) * noise * e1 * e2
        };
        total += term.weight() * q.exp_tail(integrand, 0.0, 2.0 * p.lambda_b, &[]);
    }
    total
}

fn via_ris_sinr_in(q: &Nest, gamma: f64, r_s: f64, p: &NetworkParams, model: InterferenceModel) -> f64 {
    let pl = p.path_loss();
    let sigma2 = p.sigma2();
    let g = p.main_gain();
    let (mu_b, mu_s) = (p.mu_b(), p.mu_s());
    let kb = p.h_b / p.h_s;
    let mut total = 0.0;
    for term in alzer_weights(p.n0) {
        let integrand = |r: f64| {
            let s = term.rate() * gamma / (crate::model::ell_r(r, r_s, &pl, p.n_elements) * g);
            let noise = (-s * sigma2).exp();
            if noise < NEGLIGIBLE {
                return 0.0;
            }
            let (weight, lo, v) = if r < r_s {
                (p_block_direct(r, p), (r_s - r) * kb, p.v_m)
            } else {
                (((-mu_s * (r - r_s)).exp() - (-mu_b * r).exp()).max(0.0), 0.0, p.v_s)
            };
            if weight == 0.0 {
                return 0.0;
            }
            let street = if model.direct() {
                shadow_expectation(q, mu_b, lo, f64::INFINITY, r, s, v, p)
            } else if r < r_s {
                (-mu_b * lo).exp()
            } else {
                1.0
            };
            let reflected = if model.reflected() {
                reflected_factor(q, s, r, r + p.interference_reach(r_s), r - r_s, p)
            } else {
                1.0
            };
            serving_density(r, p) * noise * weight * street * reflected
        };
        total += term.weight() * q.exp_tail(integrand, 0.0, 2.0 * p.lambda_b, &[r_s]);
    }
    total
}

/// SINR coverage with RISs at fraction `f` of the cell radius.
pub fn sinr_coverage_cell(
    gamma: f64,
    f: f64,
    p: &NetworkParams,
    spec: &IntegrationSpec,
    model: InterferenceModel,
) -> Result<f64, QuadError> {
    let quad = Quadrature::new(*spec);
    let q = Nest::fastest(&quad, p);
    let pl = p.path_loss();
    let sigma2 = p.sigma2();
    let g = p.main_gain();
    let (mu_b, mu_s) = (p.mu_b(), p.mu_s());
    let kb = p.h_b / p.h_s;
    let mut via = 0.0;
    for term in alzer_weights(p.n0) {
        let outer = |r: f64| {
            let pd = p_block_direct(r, p);
            let inner = |y: f64| {
                let rho = 0.5 * f * y;
                let s = term.rate() * gamma / (crate::model::ell_r(r, rho, &pl, p.n_elements) * g);
                let noise = (-s * sigma2).exp();
                if noise < NEGLIGIBLE {
                    return 0.0;
                }
                let (weight, lo) = if r < rho {
                    (pd, (rho - r) * kb)
                } else {
                    (((-mu_s * (r - rho)).exp() - (-mu_b * r).exp()).max(0.0), 0.0)
                };
                if weight == 0.0 {
                    return 0.0;
                }
                let given_d2 = |d: f64| cell_in(&q, s, r, y, f, d, p, model);
                let e = expect_over_d2(&q, mu_b, lo, r, y, given_d2);
                nn_dist_pdf(y, r, p) * noise * weight * e
            };
            if pd == 0.0 {
                return 0.0;
            }
            serving_density(r, p) * q.exp_tail(inner, 0.0, p.lambda_b, &[2.0 * r, 2.0 * r / f])
        };
        via += term.weight() * q.exp_tail(outer, 0.0, 2.0 * p.lambda_b, &[]);
    }
    let v = direct_sinr_in(&q, gamma, p, model) + via;
    quad.finish(v)
}

// E[1{D > lo} h(D)] for D ~ Exp(mu), where h is constant for D below
// max(r, y - r).
fn expect_over_d2<H: Fn(f64) -> f64>(q: &Quadrature, mu: f64, lo: f64, r: f64, y: f64, h: H) -> f64 {
    if mu == 0.0 {
        return h(f64::INFINITY);
    }
    let flat = r.max(y - r).max(lo);
    let cdf = |t: f64| -(-mu * t).exp_m1();
    let constant = (cdf(flat) - cdf(lo)).max(0.0) * if flat > lo { h(0.5 * (lo + flat)) } else { 0.0 };
    constant + q.exp_tail(|d| mu * (-mu * d).exp() * h(d), flat, mu, &[])
}

/// SINR coverage of a general user with the intersection-RIS fallback.
pub fn sinr_coverage_intersection(
    gamma: f64,
    r_s: f64,
    p: &NetworkParams,
    spec: &IntegrationSpec,
    model: InterferenceModel,
) -> Result<f64, QuadError> {
    let quad = Quadrature::new(*spec);
    let q = Nest::fastest(&quad, p);
    let base = direct_sinr_in(&q, gamma, p, model) + via_ris_sinr_in(&q, gamma, r_s, p, model);
    let extra = intersection_sinr_in(&q, gamma, r_s, p, model);
    quad.finish(base + extra)
}

fn intersection_sinr_in(q: &Nest, gamma: f64, r_s: f64, p: &NetworkParams, model: InterferenceModel) -> f64 {
    if p.lambda_v == 0.0 {
        return 0.0;
    }
    let pl = p.path_loss();
    let sigma2 = p.sigma2();
    let g = p.main_gain();
    let mu_b = p.mu_b();
    let kb = p.h_b / p.h_s;
    let lb = p.lambda_b;
    let lr = p.lambda_r;
    let mut total = 0.0;
    for term in alzer_weights(p.n0) {
        let over_u = |u: f64| {
            let over_x = |x: f64| {
                let s = term.rate() * gamma / (pl.cascade(u, x, p.n_elements) * g);
                let noise = (-s * sigma2).exp();
                if noise < NEGLIGIBLE {
                    return 0.0;
                }
                let adjacent = adjacent_factor(q, s, u, x, p, model);
                let lo = u * kb;
                let over_r = |r: f64| {
                    let street = |hi: f64| {
                        if model.direct() {
                            shadow_expectation(q, mu_b, lo, hi, r, s, p.v_m, p)
                        } else {
                            let cdf = |t: f64| if t.is_infinite() { 1.0 } else { -(-mu_b * t).exp_m1() };
                            (cdf(hi) - cdf(lo)).max(0.0)
                        }
                    };
                    let part = if r > r_s {
                        p_block_ris(r - r_s, p) * street(f64::INFINITY)
                    } else {
                        p_block_direct(r, p) * street((r_s - r) * kb)
                    };
                    serving_density(r, p) * part
                };
                let a = q.exp_tail(over_r, 0.0, 2.0 * lb, &[r_s]);
                serving_density(x, p) * noise * adjacent * a
            };
            2.0 * lr * (-2.0 * lr * u).exp() * q.exp_tail(over_x, 0.0, 2.0 * lb, &[])
        };
        total += term.weight() * q.exp_tail(over_u, 0.0, 2.0 * lr, &[]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NetworkParams;

    fn spec() -> IntegrationSpec {
        IntegrationSpec::with_tolerances(1e-9, 1e-12)
    }

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    // Signal-normalized Laplace argument at a given threshold and link gain.
    fn s_for(gamma: f64, ell: f64, p: &NetworkParams) -> f64 {
        gamma / (ell * p.main_gain())
    }

    #[test]
    fn direct_matches_rayleigh_closed_form() {
        let p = NetworkParams::default();
        let r = 12.0;
        let s = s_for(db(0.0), p.path_loss().ell_ub(r), &p);
        let ctx = InterferenceContext::direct(r, f64::INFINITY, f64::INFINITY);
        let num = laplace_direct(s, &ctx, &p, &spec()).unwrap();
        let closed = laplace_direct_rayleigh(s, r, &p);
        assert!((num - closed).abs() < 1e-9, "{num} vs {closed}");
        assert!(closed > 0.0 && closed < 1.0);
    }

    #[test]
    fn closed_kernel_integral_matches_quadrature() {
        let p = NetworkParams::default();
        let q = Quadrature::new(spec());
        let (num, closed) = (Nest::numeric(&q), Nest::fastest(&q, &p));
        assert!(closed.closed);
        for (b, h, shift, lo, hi) in [
            (1e8, 10.0, 0.0, 5.0, 80.0),
            (3e9, 10.0, 0.0, 0.0, f64::INFINITY),
            (2e12, 40.0, -7.0, 12.0, 15.5),
            (2e12, 40.0, 9.0, 3.0, 30.0),
        ] {
            let a = num.kernel_integral(b, h, shift, lo, hi, &p);
            let c = closed.kernel_integral(b, h, shift, lo, hi, &p);
            assert!((a - c).abs() < 1e-10 * a.max(1e-300), "{a} vs {c}");
        }
        assert!(q.failure().is_none());
    }

    #[test]
    fn laplace_limits() {
        let p = NetworkParams::default();
        let ctx = InterferenceContext::direct(10.0, 5.0, 7.0);
        assert_eq!(laplace_direct(0.0, &ctx, &p, &spec()).unwrap(), 1.0);
        // Blockages closer than the shadow of any farther BS.
        let tight = InterferenceContext::direct(10.0, 2.0, 2.0);
        assert_eq!(laplace_direct(1e12, &tight, &p, &spec()).unwrap(), 1.0);
        // Zero BS density.
        let empty = NetworkParams { lambda_b: 1e-300, ..p };
        let v = laplace_direct(1e12, &ctx, &empty, &spec()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn laplace_monotone_in_s() {
        let p = NetworkParams::default();
        let ctx = InterferenceContext::via_ris(15.0, 20.0, 3.0, 40.0);
        let mut prev = 1.0;
        for k in 0..8 {
            let s = 1e6 * 10f64.powi(k);
            let v = laplace_via_ris(s, &ctx, &p, &spec()).unwrap();
            assert!(v <= prev + 1e-12 && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn zero_beam_width_removes_reflection() {
        let p = NetworkParams { theta_s: 0.0, ..NetworkParams::default() };
        let ctx = InterferenceContext::via_ris(30.0, 20.0, 3.0, 1.0);
        // d_2 shadow ends before r: nothing on the street either.
        let v = laplace_via_ris(1e12, &ctx, &p, &spec()).unwrap();
        assert_eq!(v, 1.0);
        let ix = InterferenceContext::intersection(5.0, 20.0, 0.5, 1.0, 4.0, 30.0);
        assert_eq!(laplace_intersection(1e12, &ix, &p, &spec()).unwrap(), 1.0);
    }

    #[test]
    fn cell_mixture_reduces_when_neighbour_is_close() {
        let p = NetworkParams::default();
        // y < 2r: neighbour on the serving side, street window starts at r.
        let ctx = InterferenceContext::cell(20.0, 30.0, 0.5, 2.0, 100.0);
        let s = 1e9;
        let v = laplace_cell(s, &ctx, 0.5, &p, &spec()).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn classify_partitions_geometry() {
        let p = NetworkParams::default();
        let c = |r, rs, d1, d2, u| classify(r, rs, d1, d2, u, &p);
        assert_eq!(c(10.0, 20.0, 3.1, 0.0, None), Some(Regime::Direct));
        assert_eq!(c(10.0, 20.0, 2.9, 0.7, None), Some(Regime::ViaRis));
        assert_eq!(c(10.0, 20.0, 2.9, 0.5, None), None);
        assert_eq!(c(10.0, 20.0, 2.9, 0.5, Some(5.0)), Some(Regime::IntersectionBeforeRis));
        assert_eq!(c(30.0, 20.0, 0.5, 9.0, Some(5.0)), Some(Regime::IntersectionBeyondRis));
        assert_eq!(c(30.0, 20.0, 0.7, 9.0, Some(5.0)), Some(Regime::ViaRis));
    }

    #[test]
    fn no_interference_sinr_equals_snr() {
        let p = NetworkParams::default();
        let coarse = IntegrationSpec::with_tolerances(1e-7, 1e-10);
        for gdb in [-20.0, 0.0, 10.0] {
            let g = db(gdb);
            let sinr = sinr_coverage_fixed(g, 20.0, &p, &coarse, InterferenceModel::NoneAtAll).unwrap();
            let snr = crate::coverage::snr_coverage_fixed(g, 20.0, &p, crate::model::TailMode::Alzer, &coarse).unwrap();
            assert!((sinr - snr).abs() < 1e-7, "{sinr} vs {snr}");
        }
    }

    #[test]
    fn sinr_below_snr_and_monotone() {
        let p = NetworkParams::default();
        let coarse = IntegrationSpec::with_tolerances(1e-5, 1e-7);
        let mut prev = 1.0;
        for gdb in [-10.0, 0.0, 10.0, 20.0] {
            let g = db(gdb);
            let full = sinr_coverage_fixed(g, 20.0, &p, &coarse, InterferenceModel::Full).unwrap();
            let partial = sinr_coverage_fixed(g, 20.0, &p, &coarse, InterferenceModel::NoViaRis).unwrap();
            let snr = sinr_coverage_fixed(g, 20.0, &p, &coarse, InterferenceModel::NoneAtAll).unwrap();
            assert!(full <= partial + 1e-6 && partial <= snr + 1e-6);
            assert!(full <= prev + 1e-6);
            prev = full;
        }
    }

    #[test]
    fn cell_sinr_without_interference_matches_snr() {
        let p = NetworkParams::default();
        let coarse = IntegrationSpec::with_tolerances(1e-7, 1e-10);
        let g = db(0.0);
        let sinr = sinr_coverage_cell(g, 0.8, &p, &coarse, InterferenceModel::NoneAtAll).unwrap();
        let snr = crate::coverage::snr_coverage_cell(g, 0.8, &p, crate::model::TailMode::Alzer, &coarse).unwrap();
        assert!((sinr - snr).abs() < 1e-6, "{sinr} vs {snr}");
    }

    #[test]
    fn intersection_sinr_without_interference_matches_snr() {
        let p = NetworkParams::default();
        let coarse = IntegrationSpec::with_tolerances(1e-5, 1e-8);
        let g = db(-60.0);
        let sinr = sinr_coverage_intersection(g, 20.0, &p, &coarse, InterferenceModel::NoneAtAll).unwrap();
        let snr =
            crate::coverage::snr_coverage_intersection(g, 20.0, &p, crate::model::TailMode::Alzer, &coarse).unwrap();
        assert!((sinr - snr).abs() < 1e-5, "{sinr} vs {snr}");
    }
}
