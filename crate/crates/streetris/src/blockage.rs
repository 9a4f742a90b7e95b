//! Blockage, association and RIS placement formulas.

use thiserror::Error;

use crate::model::{NetworkParams, Placement};
use crate::quadrature::phi1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockageError {
    #[error("no blockages (lambda_v = 0): every RIS distance is optimal")]
    NoBlockage,
    #[error("rho_s = {rho_s} makes the optimality condition vacuous (rho_s = 2)")]
    DegenerateRatio { rho_s: f64 },
    #[error("no sign change on [{lo:e}, {hi:e}]: g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
}

/// Probability that the link to a BS at horizontal distance `r_ub` is blocked.
pub fn p_block_direct(r_ub: f64, p: &NetworkParams) -> f64 {
    -(-p.mu_b() * r_ub).exp_m1()
}

/// Probability that the link to a RIS at horizontal distance `r_us` is blocked.
pub fn p_block_ris(r_us: f64, p: &NetworkParams) -> f64 {
    -(-p.mu_s() * r_us).exp_m1()
}

/// Probability that both the BS at `r_ub` and its RIS at `r_s` from the BS
/// are blocked. For `r_ub <= r_s` the RIS sits on the far side of the user
/// and the two shadows involve independent blockage sides.
pub fn p_joint_block_given_rub(r_ub: f64, r_s: f64, p: &NetworkParams) -> f64 {
    if r_ub <= r_s {
        p_block_direct(r_ub, p) * p_block_ris(r_s - r_ub, p)
    } else {
        p_block_ris(r_ub - r_s, p)
    }
}

// (e^{-b x} - e^{-a x}) / (a - b), evaluated without cancellation or poles.
fn exp_diff(x: f64, a: f64, b: f64) -> f64 {
    (-a.min(b) * x).exp() * x * phi1((a - b).abs() * x)
}

/// Connection failure (joint blockage) probability for a RIS at fixed
/// distance `r_s` from every BS, averaged over the nearest-BS distance.
///
/// Written with `E(x; a, b) = (e^{-bx} - e^{-ax})/(a - b)` so that the
/// parameter slices `rho_s = 2` and `rho_s = rho_b + 2` need no special case.
pub fn connection_failure_fixed(r_s: f64, p: &NetworkParams) -> f64 {
    let rt = p.ratios();
    let (rb, rs) = (rt.rho_b, rt.rho_s);
    let f = p.lambda_b * r_s;
    let near = f * phi1(2.0 * f) - f * phi1((2.0 + rb) * f) - exp_diff(f, 2.0, rs)
        + exp_diff(f, 2.0 + rb, rs);
    let far = (-2.0 * f).exp() * rs / (2.0 + rs);
    (2.0 * near + far).clamp(0.0, 1.0)
}

/// Lower and upper bounds on [`connection_failure_fixed`]. The lower bound
/// is the exact contribution of users beyond the RIS (`r_ub > r_s`); the
/// upper bound adds the probability of the complementary event.
pub fn connection_failure_bounds(r_s: f64, p: &NetworkParams) -> (f64, f64) {
    let rs = p.ratios().rho_s;
    let f = p.lambda_b * r_s;
    let lower = (-2.0 * f).exp() * rs / (2.0 + rs);
    let upper = -(-2.0 * f).exp_m1() + lower;
    (lower, upper.min(1.0))
}

/// Optimal RIS distance from the first-order condition on the failure
/// probability, plus the closed-form approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementSolution {
    pub r_s_opt: f64,
    /// Root of `x^a = a x + c` in (0, 1); `x = exp(-lambda_b rho_b r_s)`.
    pub x_root: f64,
    pub r_s_approx: f64,
    pub a: f64,
    pub c: f64,
    pub residual: f64,
    pub iterations: u32,
}

fn lambert_residual(x: f64, a: f64, c: f64) -> f64 {
    x.powf(a) - a * x - c
}

pub fn optimal_rs(p: &NetworkParams) -> Result<PlacementSolution, BlockageError> {
    if p.lambda_v <= 0.0 {
        return Err(BlockageError::NoBlockage);
    }
    let rt = p.ratios();
    let (rb, rs) = (rt.rho_b, rt.rho_s);
    if (rs - 2.0).abs() < 1e-12 {
        return Err(BlockageError::DegenerateRatio { rho_s: rs });
    }
    let a = (rs - 2.0) / rb;
    let c = 4.0 * (1.0 - a) / (rs + 2.0);
    let (mut lo, mut hi) = (1e-15, 1.0 - 1e-15);
    let g_lo = lambert_residual(lo, a, c);
    let g_hi = lambert_residual(hi, a, c);
    if g_lo.signum() == g_hi.signum() {
        return Err(BlockageError::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let lo_positive = g_lo > 0.0;
    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        iterations += 1;
        mid = 0.5 * (lo + hi);
        let g = lambert_residual(mid, a, c);
        if g == 0.0 {
            break;
        }
        if (g > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * mid {
            break;
        }
    }
    let x = mid;
    Ok(PlacementSolution {
        r_s_opt: (1.0 / x).ln() / (p.lambda_b * rb),
        x_root: x,
        r_s_approx: (2.0 / (rb * (rs + 2.0))).sqrt() / p.lambda_b,
        a,
        c,
        residual: lambert_residual(x, a, c),
        iterations,
    })
}

/// Length scale of the optimal distance when blockages dominate:
/// `|ln(a)| / ((1 - a) lambda_b rho_b)` with `a = h_b / h_s`. Tends to zero
/// as `lambda_v` grows.
pub fn asymptotic_rs_scale(p: &NetworkParams) -> f64 {
    let a = p.h_b / p.h_s;
    a.ln().abs() / ((1.0 - a) * p.lambda_b * p.ratios().rho_b)
}

/// Probabilities of direct service, service via the associated RIS, and
/// connection failure. They sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationProbs {
    pub direct: f64,
    pub via_ris: f64,
    pub failure: f64,
}

pub fn association_probs(placement: Placement, p: &NetworkParams) -> AssociationProbs {
    let direct = 2.0 * p.lambda_b / (2.0 * p.lambda_b + p.mu_b());
    let failure = match placement {
        Placement::FixedDistance { r_s } => connection_failure_fixed(r_s, p),
        Placement::CellFraction { f } => connection_failure_cell(f, p),
    };
    AssociationProbs {
        direct,
        via_ris: 1.0 - direct - failure,
        failure,
    }
}

/// Density of the serving BS's nearest-neighbour distance `y` given the
/// user-BS distance `r_ub`.
pub fn nn_dist_pdf(y: f64, r_ub: f64, p: &NetworkParams) -> f64 {
    let l = p.lambda_b;
    if y < 0.0 {
        0.0
    } else if y < 2.0 * r_ub {
        l * (-l * y).exp()
    } else {
        2.0 * l * (-2.0 * l * (y - r_ub)).exp()
    }
}

/// Joint blockage given `r_ub` and `r_bn` when the RIS sits at `f r_bn / 2`.
pub fn p_joint_block_cell(r_ub: f64, r_bn: f64, f: f64, p: &NetworkParams) -> f64 {
    p_joint_block_given_rub(r_ub, 0.5 * f * r_bn, p)
}

/// Connection failure for RISs at fraction `f` of the cell radius.
pub fn connection_failure_cell(f: f64, p: &NetworkParams) -> f64 {
    let rt = p.ratios();
    let (rb, rs) = (rt.rho_b, rt.rho_s);
    if rs == 0.0 {
        return 0.0;
    }
    // Same expression multiplied through by rho_s so lambda_v = 0 is finite.
    let t1 = (f - 1.0) * (f - 2.0) * rs / (2.0 * (4.0 + (1.0 - f) * rs));
    let t2 = f.powi(3) * rb * rs / (2.0 * (4.0 + f * rb) * (4.0 + f * rs));
    let t3 = 2.0 * rs / ((4.0 + (1.0 - f) * rs) * (2.0 + rs));
    t1 + t2 + t3
}

/// Probability that the user is served through the nearest intersection RIS
/// at `r_ux` on the side opposite its BS: BS and associated RIS blocked,
/// intersection RIS in LOS.
///
/// For `r_ub < r_s` the associated RIS and the intersection are on the same
/// side, so both conditions fall on the same nearest blockage.
pub fn intersection_assoc_prob(r_ub: f64, r_ux: f64, r_s: f64, p: &NetworkParams) -> f64 {
    let mu_s = p.mu_s();
    let los_x = (-mu_s * r_ux).exp();
    if r_ub < r_s {
        let window = (los_x - (-mu_s * (r_s - r_ub)).exp()).max(0.0);
        window * p_block_direct(r_ub, p)
    } else {
        los_x * p_block_ris(r_ub - r_s, p)
    }
}
