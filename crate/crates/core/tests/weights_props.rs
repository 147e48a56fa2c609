use gensob::weights::{
    check_or_window, dyadic_integral_test, eta_construct, eta_identity_error, interp_param, OrGrid, Verdict,
    DEFAULT_K_MAX,
};
use gensob::WeightExpr;
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = WeightExpr> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(WeightExpr::power),
        (1u32..3, -2.0..2.0f64).prop_map(|(d, k)| WeightExpr::iter_log_power(d, k).unwrap()),
        (-2.0..2.0f64).prop_map(|k| WeightExpr::one_plus_log_power(k).unwrap()),
        (-1.0..1.0f64, 0.01..0.5f64, 0.1..1.0f64).prop_map(|(t, d, l)| WeightExpr::osc_power(t, d, l).unwrap()),
        (0.1..10.0f64).prop_map(|c| WeightExpr::scale(c).unwrap()),
    ]
}

fn tree() -> impl Strategy<Value = WeightExpr> {
    leaf().prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(WeightExpr::product),
            (inner.clone(), 0.2..3.0f64).prop_map(|(w, th)| WeightExpr::power_compose(w, th).unwrap()),
            (inner.clone(), -2.0..2.0f64).prop_map(|(w, e)| WeightExpr::pow(w, e).unwrap()),
            (inner.clone(), inner).prop_map(|(a, b)| WeightExpr::glue(10.0, a, b).unwrap()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(w in tree()) {
        let back = WeightExpr::from_json(&w.to_json()).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn trees_are_positive_and_finite(w in tree(), u in 0.0..40.0f64) {
        prop_assert!(w.ln_eval(u).is_finite());
    }

    #[test]
    fn or_window_bounds_power_log(r in -2.0..2.0f64, k in -1.0..1.0f64, b in 1.5..8.0f64) {
        let w = WeightExpr::product(vec![WeightExpr::power(r), WeightExpr::iter_log_power(1, k).unwrap()]);
        let res = check_or_window(&w, b, OrGrid::default()).unwrap();
        prop_assert!(res.pass);
        // lambda^r (1 + log lambda / log t)^k with log t >= 1 below the glue
        let bound = b.powf(r.abs()) * (1.0 + b.ln()).powf(k.abs());
        prop_assert!(res.c_est <= bound * (1.0 + 1e-9), "{} > {}", res.c_est, bound);
    }

    #[test]
    fn interp_param_reproduces_alpha(r in -2.0..2.0f64, k in -1.0..1.0f64, lo in 0.1..2.0f64, hi in 0.1..2.0f64, u in 0.0..30.0f64) {
        let alpha = WeightExpr::product(vec![WeightExpr::power(r), WeightExpr::one_plus_log_power(k).unwrap()]);
        let (r0, r1) = (r - lo, r + hi);
        let psi = interp_param(&alpha, r0, r1).unwrap();
        let lhs = r0 * u + psi.ln_eval((r1 - r0) * u);
        prop_assert!((lhs - alpha.ln_eval(u)).abs() <= 1e-12 * (1.0 + u.abs() * r.abs()));
    }

    #[test]
    fn eta_identity_interpolated_branch(r in -0.4..2.0f64, k in -1.0..1.0f64, gap0 in 0.1..1.0f64, gap1 in 0.1..1.0f64, t in 0.0..1.0f64, q in 0u32..3) {
        let phi = WeightExpr::product(vec![WeightExpr::power(r), WeightExpr::iter_log_power(1, k).unwrap()]);
        let (s0, s1) = (r - gap0, r + gap1);
        let lambda = (-0.49f64).max(s0) + t * (s1 - (-0.49f64).max(s0));
        prop_assume!(lambda > -0.5 && lambda <= s1);
        let c = eta_construct(&phi, s0, s1, lambda).unwrap();
        prop_assert!(c.theta.is_some());
        let err = eta_identity_error(&phi, s0, s1, lambda, 2.0 * q as f64, 1e8, 200).unwrap();
        prop_assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn p_series_classification(p in 1.5..4.0f64) {
        let w = WeightExpr::iter_log_power(1, -p).unwrap();
        prop_assert_eq!(dyadic_integral_test(&w, DEFAULT_K_MAX).verdict, Verdict::Converges);
        let w = WeightExpr::iter_log_power(1, 2.0 - p).unwrap();
        prop_assume!(2.0 - p <= -0.0 && 2.0 - p >= -1.0);
        prop_assert_eq!(dyadic_integral_test(&w, DEFAULT_K_MAX).verdict, Verdict::Diverges);
    }
}
