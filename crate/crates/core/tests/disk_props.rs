use gensob::disk::{harmonic_residual, snorm, solve_dirichlet, SourceTerm};
use gensob::noise::sample_white_noise;
use gensob::spectra::SpectralField;
use gensob::WeightExpr;
use num_complex::Complex64;
use proptest::prelude::*;

fn sources() -> impl Strategy<Value = Vec<SourceTerm>> {
    prop::collection::btree_map(-8i64..=8, (-2.0..2.0f64, -2.0..2.0f64), 0..4)
        .prop_map(|m| m.into_iter().map(|(k, (a, b))| SourceTerm::new(k, Complex64::new(a, b))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_is_boundary_data(f in sources(), seed in 0u64..1000) {
        let g = sample_white_noise(1, 32, seed).unwrap().field;
        let u = solve_dirichlet(&f, &g).unwrap();
        prop_assert_eq!(u.trace(32).unwrap(), g);
        // on r = 1 the evaluated solution matches the boundary series
        let th = 0.37;
        let want: Complex64 = (0..32)
            .map(|p| {
                let k = gensob::spectra::frequency(p, 32) as f64;
                u.trace(32).unwrap().coeffs()[p] * Complex64::from_polar(1.0, k * th)
            })
            .sum();
        prop_assert!((u.eval(1.0, th) - want).norm() <= 1e-11);
    }

    #[test]
    fn linear_in_data(f in sources(), s1 in 0u64..1000, s2 in 0u64..1000, r in 0.0..1.0f64, th in 0.0..6.3f64) {
        let g1 = sample_white_noise(1, 32, s1).unwrap().field;
        let g2 = sample_white_noise(1, 32, s2 + 1000).unwrap().field;
        let sum: Vec<Complex64> = g1.coeffs().iter().zip(g2.coeffs()).map(|(a, b)| a + b).collect();
        let g = SpectralField::from_coeffs(1, 32, sum).unwrap();
        let whole = solve_dirichlet(&f, &g).unwrap().eval(r, th);
        let parts = solve_dirichlet(&f, &g1).unwrap().eval(r, th) + solve_dirichlet(&[], &g2).unwrap().eval(r, th);
        prop_assert!((whole - parts).norm() <= 1e-12);
    }

    #[test]
    fn harmonic_part_is_harmonic(seed in 0u64..1000) {
        // h = 3e-3 balances stencil truncation against cancellation in the differences
        let g = sample_white_noise(1, 32, seed).unwrap().field;
        let u = solve_dirichlet(&[SourceTerm::constant(1.0)], &g).unwrap();
        prop_assert!(harmonic_residual(&u, 0.95, 8, 12, 3e-3) <= 1e-8);
    }

    #[test]
    fn snorm_within_weight_envelope(seed in 0u64..1000, r in -1.0..1.5f64, k in -1.0..1.0f64) {
        // alpha' = alpha (log t)^k shares the indices (r, r); on |k| <= N/2 the
        // pointwise ratio is (log <k>)^k glued to 1, which bounds the norm ratio
        let n = 64;
        let g = sample_white_noise(1, n, seed).unwrap().field;
        let u = solve_dirichlet(&[], &g).unwrap();
        let a = WeightExpr::power(r);
        let b = WeightExpr::product(vec![a.clone(), WeightExpr::iter_log_power(1, k).unwrap()]);
        let ratio = snorm(&u, &b, 0.0).snorm_alpha / snorm(&u, &a, 0.0).snorm_alpha;
        let top = (0.5 * (1.0 + (n * n / 4) as f64).ln()).ln().max(0.0);
        let (lo, hi) = if k >= 0.0 { (1.0, (k * top).exp()) } else { ((k * top).exp(), 1.0) };
        prop_assert!(ratio >= lo * (1.0 - 1e-12) && ratio <= hi * (1.0 + 1e-12), "{ratio} not in [{lo}, {hi}]");
    }
}
