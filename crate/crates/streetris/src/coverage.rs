//! Noise-limited (SNR) coverage for the fixed-distance, cell-fraction and
//! intersection-RIS deployments.

use std::f64::consts::PI;

use thiserror::Error;

use crate::blockage::{intersection_assoc_prob, p_block_direct, p_joint_block_cell, p_joint_block_given_rub};
use crate::exec::Exec;
use crate::model::{ell_r, NetworkParams, TailMode};
use crate::quadrature::{alzer_weights, alzer_tail, erfcx, gamma_ccdf, IntegrationSpec, QuadError, Quadrature};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverageError {
    #[error("closed form requires alpha = 2 (got {0})")]
    UnsupportedAlpha(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Coverage probabilities on a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    /// Linear SNR/SINR thresholds.
    pub gammas: Vec<f64>,
    pub values: Vec<f64>,
    /// Free-form description of the deployment and parameters.
    pub meta: String,
}

impl CoverageCurve {
    /// Evaluate `f` at each threshold, in parallel if requested.
    pub fn evaluate<F>(gammas: &[f64], meta: impl Into<String>, exec: Exec, f: F) -> Result<Self, QuadError>
    where
        F: Fn(f64) -> Result<f64, QuadError> + Sync + Send,
    {
        let values = exec
            .map(gammas, |&g| f(g))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            gammas: gammas.to_vec(),
            values,
            meta: meta.into(),
        })
    }
}

/// Probability that a unit-mean Nakagami link with path gain `ell` clears a
/// threshold, under the exact CCDF or the Alzer bound.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LinkTail {
    mode: TailMode,
    n0: u32,
    /// `gamma sigma^2 / (u_m v_m)`.
    scale: f64,
}

impl LinkTail {
    pub(crate) fn new(gamma: f64, p: &NetworkParams, mode: TailMode) -> Self {
        Self {
            mode,
            n0: p.n0,
            scale: gamma * p.sigma2() / p.main_gain(),
        }
    }

    pub(crate) fn at(&self, ell: f64) -> f64 {
        let x = self.scale / ell;
        match self.mode {
            TailMode::Exact => gamma_ccdf(self.n0, self.n0 as f64 * x),
            TailMode::Alzer => alzer_tail(self.n0, x),
        }
    }
}

fn serving_density(r: f64, p: &NetworkParams) -> f64 {
    2.0 * p.lambda_b * (-2.0 * p.lambda_b * r).exp()
}

/// SNR coverage with every BS's RIS at distance `r_s`.
pub fn snr_coverage_fixed(
    gamma: f64,
    r_s: f64,
    p: &NetworkParams,
    mode: TailMode,
    spec: &IntegrationSpec,
) -> Result<f64, QuadError> {
    let q = Quadrature::new(*spec);
    let v = fixed_in(&q, gamma, r_s, p, mode);
    q.finish(v)
}

pub(crate) fn fixed_in(q: &Quadrature, gamma: f64, r_s: f64, p: &NetworkParams, mode: TailMode) -> f64 {
    let pl = p.path_loss();
    let tail = LinkTail::new(gamma, p, mode);
    let integrand = |r: f64| {
        let pd = p_block_direct(r, p);
        let pj = p_joint_block_given_rub(r, r_s, p);
        let direct = (1.0 - pd) * tail.at(pl.ell_ub(r));
        let via = (pd - pj).max(0.0) * tail.at(ell_r(r, r_s, &pl, p.n_elements));
        serving_density(r, p) * (direct + via)
    };
    q.exp_tail(integrand, 0.0, 2.0 * p.lambda_b, &[r_s])
}

/// Expected direct-link term `E[(1 - p_block) exp(-t ell_ub(r)^-1)]` for
/// `alpha = 2`, in closed form. `t` is the normalized threshold rate.
fn direct_term_alpha2(t_over_k: f64, p: &NetworkParams, rho_b: f64) -> f64 {
    let lb = p.lambda_b;
    let root = t_over_k.sqrt();
    lb * PI.sqrt() / root * (-t_over_k * p.h_b * p.h_b).exp() * erfcx(lb * (1.0 + 0.5 * rho_b) / root)
}

/// SNR coverage for `alpha = 2` and the Alzer tail: direct-link term in
/// closed form via erfc, via-RIS term by quadrature.
pub fn snr_coverage_fixed_closed_alpha2(
    gamma: f64,
    r_s: f64,
    p: &NetworkParams,
    spec: &IntegrationSpec,
) -> Result<f64, CoverageError> {
    if p.alpha != 2.0 {
        return Err(CoverageError::UnsupportedAlpha(p.alpha));
    }
    let pl = p.path_loss();
    let rho_b = p.ratios().rho_b;
    let base = gamma * p.sigma2() / p.main_gain();
    let q = Quadrature::new(*spec);
    let mut total = 0.0;
    for term in alzer_weights(p.n0) {
        let t = term.rate() * base;
        let direct = direct_term_alpha2(t / pl.k, p, rho_b);
        let via = q.exp_tail(
            |r: f64| {
                let pd = p_block_direct(r, p);
                let pj = p_joint_block_given_rub(r, r_s, p);
                let ell = ell_r(r, r_s, &pl, p.n_elements);
                serving_density(r, p) * (-t / ell).exp() * (pd - pj).max(0.0)
            },
            0.0,
            2.0 * p.lambda_b,
            &[r_s],
        );
        total += term.weight() * (direct + via);
    }
    Ok(q.finish(total)?)
}

/// SNR coverage without blockages for `alpha = 2` (Alzer tail), fully closed form.
pub fn snr_coverage_no_blockage_alpha2(gamma: f64, p: &NetworkParams) -> Result<f64, CoverageError> {
    if p.alpha != 2.0 {
        return Err(CoverageError::UnsupportedAlpha(p.alpha));
    }
    let k = p.path_loss().k;
    let base = gamma * p.sigma2() / p.main_gain();
    Ok(alzer_weights(p.n0)
        .iter()
        .map(|term| term.weight() * direct_term_alpha2(term.rate() * base / k, p, 0.0))
        .sum())
}

/// SNR coverage with RISs at fraction `f` of the cell radius.
pub fn snr_coverage_cell(
    gamma: f64,
    f: f64,
    p: &NetworkParams,
    mode: TailMode,
    spec: &IntegrationSpec,
) -> Result<f64, QuadError> {
    let q = Quadrature::new(*spec);
    let pl = p.path_loss();
    let tail = LinkTail::new(gamma, p, mode);
    let lb = p.lambda_b;
    let outer = |r: f64| {
        let pd = p_block_direct(r, p);
        let direct = (1.0 - pd) * tail.at(pl.ell_ub(r));
        let via = if pd > 0.0 {
            q.exp_tail(
                |y: f64| {
                    let rho = 0.5 * f * y;
                    let pj = p_joint_block_cell(r, y, f, p);
                    crate::blockage::nn_dist_pdf(y, r, p)
                        * (pd - pj).max(0.0)
                        * tail.at(ell_r(r, rho, &pl, p.n_elements))
                },
                0.0,
                lb,
                &[2.0 * r, 2.0 * r / f],
            )
        } else {
            0.0
        };
        serving_density(r, p) * (direct + via)
    };
    let v = q.exp_tail(outer, 0.0, 2.0 * lb, &[]);
    q.finish(v)
}

/// SNR coverage of a general user that falls back to the nearest
/// intersection RIS (on the side opposite its BS) under joint blockage.
pub fn snr_coverage_intersection(
    gamma: f64,
    r_s: f64,
    p: &NetworkParams,
    mode: TailMode,
    spec: &IntegrationSpec,
) -> Result<f64, QuadError> {
    let q = Quadrature::new(*spec);
    let base = fixed_in(&q, gamma, r_s, p, mode);
    let extra = intersection_extra(&q, gamma, r_s, p, mode);
    q.finish(base + extra)
}

fn intersection_extra(q: &Quadrature, gamma: f64, r_s: f64, p: &NetworkParams, mode: TailMode) -> f64 {
    if p.lambda_v == 0.0 {
        return 0.0;
    }
    let pl = p.path_loss();
    let tail = LinkTail::new(gamma, p, mode);
    let lb = p.lambda_b;
    let lr = p.lambda_r;
    // P(A_x | r_ux) averaged over r_ub, and the link tail averaged over r_xb;
    // the three distances are independent.
    let outer = |u: f64| {
        let assoc = q.exp_tail(
            |r: f64| serving_density(r, p) * intersection_assoc_prob(r, u, r_s, p),
            0.0,
            2.0 * lb,
            &[r_s],
        );
        if assoc <= 0.0 {
            return 0.0;
        }
        let link = q.exp_tail(
            |x: f64| serving_density(x, p) * tail.at(pl.cascade(u, x, p.n_elements)),
            0.0,
            2.0 * lb,
            &[],
        );
        2.0 * lr * (-2.0 * lr * u).exp() * assoc * link
    };
    q.exp_tail(outer, 0.0, 2.0 * lr, &[])
}

/// SNR coverage of a user standing at an intersection, with the overhead
/// intersection RIS as last resort.
pub fn snr_coverage_intersection_user(
    gamma: f64,
    r_s: f64,
    p: &NetworkParams,
    mode: TailMode,
    spec: &IntegrationSpec,
) -> Result<f64, QuadError> {
    let q = Quadrature::new(*spec);
    let pl = p.path_loss();
    let tail = LinkTail::new(gamma, p, mode);
    let lb = p.lambda_b;
    let integrand = |r: f64| {
        let pd = p_block_direct(r, p);
        let pj = p_joint_block_given_rub(r, r_s, p);
        let direct = (1.0 - pd) * tail.at(pl.ell_ub(r));
        let via = (pd - pj).max(0.0) * tail.at(ell_r(r, r_s, &pl, p.n_elements));
        let overhead = pj * tail.at(pl.cascade(0.0, r, p.n_elements));
        4.0 * lb * (-4.0 * lb * r).exp() * (direct + via + overhead)
    };
    let v = q.exp_tail(integrand, 0.0, 4.0 * lb, &[r_s]);
    q.finish(v)
}
