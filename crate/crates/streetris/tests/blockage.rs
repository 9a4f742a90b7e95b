mod common;

use common::{failure_oracle, nearest_bs_pdf, param_sets, piecewise};
use proptest::prelude::*;
use streetris::blockage::{
    association_probs, connection_failure_bounds, connection_failure_cell, connection_failure_fixed, optimal_rs,
    BlockageError,
};
use streetris::model::{NetworkParams, Placement};

#[test]
fn fixed_failure_matches_direct_integration() {
    for p in param_sets() {
        for i in 0..20 {
            let r_s = 0.1 * (i as f64 + 0.5) / p.lambda_b;
            let a = connection_failure_fixed(r_s, &p);
            let o = failure_oracle(r_s, &p);
            assert!((a - o).abs() <= 1e-8, "r_s={r_s} closed={a} oracle={o} p={p:?}");
        }
    }
}

#[test]
fn cell_failure_matches_double_integration() {
    // Nearest neighbour of the serving BS: on the far side beyond r with
    // rate lambda_b, on the near side only beyond 2r, so y has density
    // lambda_b e^{-lambda_b y} below 2r and twice that rate above.
    for p in param_sets().into_iter().take(3) {
        let lb = p.lambda_b;
        for f in [0.05, 0.2, 0.5, 0.9, 1.0] {
            let outer = |r: f64| {
                let joint = |y: f64| common::joint_block_oracle(r, 0.5 * f * y, &p);
                let near = |y: f64| lb * (-lb * y).exp() * joint(y);
                let far = |y: f64| 2.0 * lb * (-2.0 * lb * (y - r)).exp() * joint(y);
                let kink = 2.0 * r / f;
                let top = kink + 45.0 / lb;
                let inner = piecewise(&near, &[0.0, 2.0 * r], 1e-11) + piecewise(&far, &[2.0 * r, kink, top], 1e-11);
                nearest_bs_pdf(r, &p) * inner
            };
            let o = piecewise(&outer, &[0.0, 1.0 / lb, 5.0 / lb, 30.0 / lb], 1e-12);
            let a = connection_failure_cell(f, &p);
            assert!((a - o).abs() < 1e-10, "f={f} closed={a} oracle={o}");
        }
    }
}

#[test]
fn bounds_sandwich_and_tighten_near_zero() {
    for p in param_sets() {
        for i in 0..20 {
            let r_s = 0.1 * (i as f64 + 0.5) / p.lambda_b;
            let v = connection_failure_fixed(r_s, &p);
            let (lo, hi) = connection_failure_bounds(r_s, &p);
            assert!(lo <= v + 1e-15 && v <= hi + 1e-15, "{lo} {v} {hi}");
        }
        let r_s = 0.05 / p.lambda_b;
        let (lo, _) = connection_failure_bounds(r_s, &p);
        assert!(connection_failure_fixed(r_s, &p) - lo < 0.02);
    }
}

#[test]
fn limits_at_zero_distance() {
    for p in param_sets() {
        let big_r_s = p.lambda_b * p.h_s / (p.lambda_v * p.h_v);
        let target = 1.0 / (2.0 * big_r_s + 1.0);
        assert!((connection_failure_fixed(1e-12, &p) - target).abs() < 1e-6);
        assert!((connection_failure_cell(1e-9, &p) - target).abs() < 1e-6);
    }
}

#[test]
fn root_matches_grid_argmin() {
    let base = NetworkParams::default();
    for lv in [0.05, 0.1, 0.5, 1.0] {
        let p = NetworkParams { lambda_v: lv, ..base };
        let sol = optimal_rs(&p).unwrap();
        let (lo, hi) = (0.01f64, 200.0f64);
        let n = 2000;
        let grid: Vec<f64> = (0..n)
            .map(|i| (lo.ln() + i as f64 / (n - 1) as f64 * (hi / lo).ln()).exp())
            .collect();
        let k = (0..n)
            .min_by(|&a, &b| connection_failure_fixed(grid[a], &p).total_cmp(&connection_failure_fixed(grid[b], &p)))
            .unwrap();
        let step = grid[k.min(n - 2) + 1] - grid[k.min(n - 2)];
        assert!((sol.r_s_opt - grid[k]).abs() <= step, "lv={lv} root={} grid={}", sol.r_s_opt, grid[k]);
    }
}

#[test]
fn optimum_shrinks_as_blockage_grows() {
    let base = NetworkParams::default();
    let r: Vec<f64> = [0.05, 0.1, 0.5, 1.0]
        .iter()
        .map(|&lv| optimal_rs(&NetworkParams { lambda_v: lv, ..base }).unwrap().r_s_opt)
        .collect();
    assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
    let p = NetworkParams { lambda_v: 0.0, ..base };
    assert_eq!(optimal_rs(&p).unwrap_err(), BlockageError::NoBlockage);
    assert_eq!(connection_failure_fixed(10.0, &p), 0.0);
}

#[test]
fn association_matches_oracle_integral() {
    let p = NetworkParams::default();
    let top = 45.0 / p.lambda_b;
    let direct = piecewise(&|r: f64| nearest_bs_pdf(r, &p) * (-p.lambda_v * r * p.h_v / p.h_b).exp(), &[0.0, top], 1e-13);
    let a = association_probs(Placement::FixedDistance { r_s: 20.0 }, &p);
    assert!((a.direct - direct).abs() < 1e-10);
    assert!((a.direct + a.via_ris + a.failure - 1.0).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn failure_is_a_probability_inside_its_bounds(
        lb in 0.005f64..0.5, lv in 0.0f64..2.0, h_s in 11.0f64..150.0, x in 0.0f64..5.0,
    ) {
        let p = NetworkParams { lambda_b: lb, lambda_v: lv, h_s, ..NetworkParams::default() };
        let r_s = x / lb;
        let v = connection_failure_fixed(r_s, &p);
        let (lo, hi) = connection_failure_bounds(r_s, &p);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(lo <= v + 1e-12 && v <= hi + 1e-12);
        let c = connection_failure_cell((x / 5.0).max(1e-3), &p);
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn taller_ris_never_fails_more(lv in 0.01f64..2.0, x in 0.0f64..100.0, h in 11.0f64..100.0) {
        let base = NetworkParams { lambda_v: lv, ..NetworkParams::default() };
        let low = connection_failure_fixed(x, &NetworkParams { h_s: h, ..base });
        let high = connection_failure_fixed(x, &NetworkParams { h_s: h + 10.0, ..base });
        prop_assert!(high <= low + 1e-12);
    }
}
