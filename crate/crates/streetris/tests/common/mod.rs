#![allow(dead_code)]

use streetris::model::NetworkParams;

/// Adaptive Simpson, kept separate from the crate's Gauss-Kronrod code.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || (depth < 44 && delta.abs() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integral over consecutive pieces `[cuts[i], cuts[i+1]]`.
pub fn piecewise<F: Fn(f64) -> f64>(f: &F, cuts: &[f64], tol: f64) -> f64 {
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| simpson(f, w[0], w[1], tol))
        .sum()
}

/// Both the BS and its RIS are blocked, written from the shadow geometry:
/// the user sees a blockage at distance d on each side; a transmitter at
/// horizontal distance r and height h is blocked by one closer than r h_v / h.
pub fn joint_block_oracle(r: f64, r_s: f64, p: &NetworkParams) -> f64 {
    let bs_shadow = r * p.h_v / p.h_b;
    let clear = |len: f64| (-p.lambda_v * len).exp();
    if r > r_s {
        // Same side: one nearest blockage decides both.
        let ris_shadow = (r - r_s) * p.h_v / p.h_s;
        1.0 - clear(bs_shadow.min(ris_shadow))
    } else {
        let ris_shadow = (r_s - r) * p.h_v / p.h_s;
        (1.0 - clear(bs_shadow)) * (1.0 - clear(ris_shadow))
    }
}

pub fn nearest_bs_pdf(r: f64, p: &NetworkParams) -> f64 {
    2.0 * p.lambda_b * (-2.0 * p.lambda_b * r).exp()
}

/// Failure probability by direct integration, truncated where the density
/// is below 1e-18.
pub fn failure_oracle(r_s: f64, p: &NetworkParams) -> f64 {
    let top = 45.0 / p.lambda_b;
    let f = |r: f64| nearest_bs_pdf(r, p) * joint_block_oracle(r, r_s, p);
    piecewise(&f, &[0.0, r_s.min(top), top], 1e-14)
}

/// Parameter sets spanning light to heavy blockage and several heights.
pub fn param_sets() -> Vec<NetworkParams> {
    let base = NetworkParams::default();
    vec![
        base,
        NetworkParams { lambda_v: 0.5, ..base },
        NetworkParams { lambda_b: 0.01, lambda_v: 0.02, ..base },
        NetworkParams { lambda_b: 0.2, lambda_v: 1.0, h_s: 20.0, ..base },
        NetworkParams { lambda_v: 0.05, h_v: 1.5, h_b: 6.0, h_s: 30.0, ..base },
    ]
}

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}
