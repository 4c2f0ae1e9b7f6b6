mod common;

use std::f64::consts::{PI, TAU};

use cgtomo::gaussian::*;
use proptest::prelude::*;

fn single() -> impl Strategy<Value = SingleModeParams> {
    (0.0..5.0f64, 0.0..3.0f64, 0.0..PI)
        .prop_map(|(n, r, p)| SingleModeParams::new(n, r, p).unwrap())
}

fn two() -> impl Strategy<Value = TwoModeParams> {
    (0.0..5.0f64, 0.0..5.0f64, 0.0..3.0f64, 0.0..TAU)
        .prop_map(|(a, b, r, p)| TwoModeParams::new(a, b, r, p).unwrap())
}

fn angle_err(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn single_roundtrip(p in single()) {
        let q = params_from_cov1(&cov_from_params1(&p)).unwrap().params;
        prop_assert!((p.nbar - q.nbar).abs() < 1e-10);
        prop_assert!((p.r - q.r).abs() < 1e-10);
        // The axis is only defined to ~eps / r.
        if p.r > 1e-4 {
            prop_assert!(angle_err(p.phi, q.phi, PI) < 1e-10 + 1e-15 / p.r);
        }
    }

    #[test]
    fn two_mode_roundtrip(p in two()) {
        let q = params_from_cov2(&cov_from_params2(&p)).unwrap().params;
        let scale = 1.0 + p.nbar1.max(p.nbar2);
        prop_assert!((p.nbar1 - q.nbar1).abs() < 1e-10 * scale);
        prop_assert!((p.nbar2 - q.nbar2).abs() < 1e-10 * scale);
        prop_assert!((p.r - q.r).abs() < 1e-10);
        if p.r > 1e-4 {
            prop_assert!(angle_err(p.phi, q.phi, TAU) < 1e-10 + 1e-15 / p.r);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn single_cov_matches_squeezer_oracle(p in single()) {
        let g = cov_from_params1(&p);
        let o = common::single_cov(p.nbar, p.r, p.phi);
        let scale = o.amax();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((g.get(i, j) - o[(i, j)]).abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn two_mode_cov_matches_squeezer_oracle(p in two()) {
        let g = cov_from_params2(&p);
        let o = common::two_cov(p.nbar1, p.nbar2, p.r, p.phi);
        prop_assert!((g.matrix() - &o).amax() < 1e-11 * o.amax());
    }

    #[test]
    fn outputs_are_physical(p in single(), q in two()) {
        prop_assert!(is_physical(&cov_from_params1(&p)).physical);
        prop_assert!(is_physical(&cov_from_params2(&q)).physical);
    }

    #[test]
    fn single_determinant(p in single()) {
        let det = cov_from_params1(&p).determinant();
        let want = (p.nbar + 0.5).powi(2);
        prop_assert!((det - want).abs() < 1e-10 * (1.0 + (2.0 * p.r).cosh().powi(2)));
    }

    #[test]
    fn marginal_variance_is_pi_periodic_and_minimal_on_axis(p in single(), t in 0.0..PI) {
        let v = |a: f64| homodyne_marginal1(&p, a).variance;
        prop_assert!((v(t) - v(t + PI)).abs() < 1e-12 * v(t).max(1.0));
        prop_assert!(v(p.phi) <= v(t) + 1e-12 * v(t).max(1.0));
        // Independent form: var X = u^T G u / 2 with u = (cos, sin).
        let o = common::single_cov(p.nbar, p.r, p.phi);
        let (s, c) = t.sin_cos();
        let want = 0.5 * (c * c * o[(0, 0)] + 2.0 * s * c * o[(0, 1)] + s * s * o[(1, 1)]);
        prop_assert!((v(t) - want).abs() < 1e-12 * want.max(1.0));
    }

    #[test]
    fn tmst_g_is_independent_of_r(n in 0.0..3.0f64, r1 in 0.0..2.5f64, r2 in 0.0..2.5f64, phi in 0.0..TAU) {
        let g = |r: f64| {
            let (a, b, cr, ci) = TwoModeParams::new(n, n, r, phi).unwrap().abc();
            a * b - cr * cr - ci * ci
        };
        let scale = (5.0 * r1.max(r2)).cosh() * (n + 1.0).powi(2);
        prop_assert!((g(r1) - g(r2)).abs() < 1e-12 * scale);
        prop_assert!((g(r1) - (n + 0.5).powi(2)).abs() < 1e-12 * scale);
    }

    #[test]
    fn joint_marginal_covariance(p in two(), t1 in 0.0..PI, t2 in 0.0..PI) {
        let m = homodyne_joint2(&p, t1, t2);
        let o = common::two_cov(p.nbar1, p.nbar2, p.r, p.phi);
        let u = [t1.cos(), t1.sin()];
        let w = [t2.cos(), t2.sin()];
        let mut c = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                c += 0.5 * u[i] * o[(i, 2 + j)] * w[j];
            }
        }
        prop_assert!((m.cov12 - c).abs() < 1e-11 * o.amax());
    }
}

#[test]
fn isotropic_state_flags_degenerate_angle() {
    let inv = params_from_cov1(&CovMatrix::single(1.5, 1.5, 0.0)).unwrap();
    assert!(inv.degenerate_angle);
    assert_eq!(inv.params.phi, 0.0);
    assert!((inv.params.nbar - 1.0).abs() < 1e-15);
}

#[test]
fn vacuum_quadrature_variance_is_a_quarter() {
    for t in [0.0, 0.4, 1.9] {
        assert!((homodyne_marginal1(&SingleModeParams::vacuum(), t).variance - 0.25).abs() < 1e-15);
    }
}

#[test]
fn unphysical_and_malformed_inputs() {
    assert!(SingleModeParams::new(-0.1, 0.0, 0.0).is_err());
    assert!(SingleModeParams::new(0.0, f64::NAN, 0.0).is_err());
    assert!(params_from_cov1(&CovMatrix::single(0.1, 0.1, 0.0)).is_err());
    let mut g = cov_from_params2(&TwoModeParams::new(0.0, 0.0, 1.0, 0.0).unwrap())
        .matrix()
        .clone();
    g[(0, 1)] = 0.2;
    g[(1, 0)] = 0.2;
    assert!(matches!(
        params_from_cov2(&CovMatrix::new(g).unwrap()),
        Err(cgtomo::error::Error::NotTmstForm { .. })
    ));
}
