use gensob::spectra::{halpha_norm, interp_norm, nikolskii_norm, SpectralField};
use gensob::weights::interp_param;
use gensob::WeightExpr;
use num_complex::Complex64;
use proptest::prelude::*;

fn field(dim: usize, n: usize, vals: &[f64]) -> SpectralField {
    SpectralField::from_real_samples(dim, n, &vals[..n.pow(dim as u32)]).unwrap()
}

fn samples(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, len)
}

fn power_log() -> impl Strategy<Value = WeightExpr> {
    (-2.0..2.0f64, -1.0..1.0f64, 1u32..3).prop_map(|(r, k, d)| {
        WeightExpr::product(vec![WeightExpr::power(r), WeightExpr::iter_log_power(d, k).unwrap()])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_and_round_trip(vals in samples(64)) {
        let f = field(1, 64, &vals);
        let back = f.to_samples();
        let sum_sq: f64 = vals.iter().map(|v| v * v).sum::<f64>() / 64.0;
        prop_assert!((f.energy() - sum_sq).abs() <= 1e-12 * sum_sq.max(1.0));
        for (a, b) in back.iter().zip(&vals) {
            prop_assert!((a.re - b).abs() <= 1e-12 * 10.0 && a.im.abs() <= 1e-12 * 10.0);
        }
        prop_assert!(f.is_hermitian());
    }

    #[test]
    fn parseval_2d(vals in samples(256)) {
        let f = field(2, 16, &vals);
        let sum_sq: f64 = vals.iter().map(|v| v * v).sum::<f64>() / 256.0;
        prop_assert!((f.energy() - sum_sq).abs() <= 1e-12 * sum_sq.max(1.0));
    }

    #[test]
    fn binary_round_trip_is_exact(vals in samples(256), dim in 1usize..3) {
        let f = field(dim, 16, &vals);
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        let g = SpectralField::read_from(std::io::Cursor::new(buf)).unwrap();
        prop_assert_eq!(f, g);
    }

    #[test]
    fn norms_are_seminorms(a in samples(64), b in samples(64), c in -5.0..5.0f64, alpha in power_log(), s in -1.0..1.0f64) {
        let f = field(1, 64, &a);
        let g = field(1, 64, &b);
        let scaled: Vec<Complex64> = f.coeffs().iter().map(|z| z * c).collect();
        let fc = SpectralField::from_coeffs(1, 64, scaled).unwrap();
        let sum: Vec<Complex64> = f.coeffs().iter().zip(g.coeffs()).map(|(x, y)| x + y).collect();
        let fg = SpectralField::from_coeffs(1, 64, sum).unwrap();
        for norm in [&(|w: &SpectralField| halpha_norm(w, &alpha)) as &dyn Fn(&SpectralField) -> f64, &|w| nikolskii_norm(w, s)] {
            let (nf, ng) = (norm(&f), norm(&g));
            prop_assert!((norm(&fc) - c.abs() * nf).abs() <= 1e-12 * (1.0 + c.abs() * nf));
            prop_assert!(norm(&fg) <= (nf + ng) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn interpolation_norm_equals_target_norm(vals in samples(256), alpha in power_log(), dim in 1usize..3) {
        let ix = alpha.symbolic_indices().unwrap();
        let (r0, r1) = (ix.lower - 0.7, ix.upper + 1.3);
        let psi = interp_param(&alpha, r0, r1).unwrap();
        let f = field(dim, 16, &vals);
        let h = halpha_norm(&f, &alpha);
        prop_assert!((interp_norm(&f, r0, r1, &psi).unwrap() - h).abs() <= 1e-10 * h);
    }
}
