use ncdomain::berezin::{berezin_kernel, compare_forms};
use ncdomain::cp_maps::membership;
use ncdomain::linalg::{identity, max_abs_diff, min_eigenvalue, Mat};
use ncdomain::rigidity::{check_linear_biholomorphism, LinearMapCandidate};
use ncdomain::sampling::{random_matrix, random_member, random_nilpotent_member, random_polynomial, random_symbol, random_tuple, seeded};
use ncdomain::{build_model, weights_direct, weights_oracle, OperatorTuple, PositiveRegularFunction};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn weight_tables_agree(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3, depth in 0usize..=4) {
        let mut rng = seeded(seed);
        let f = random_symbol(&mut rng, n, 3);
        let a = weights_direct(&f, m, depth).unwrap();
        let b = weights_oracle(&f, m, depth).unwrap();
        prop_assert!(a.max_rel_diff(&b) <= 1e-12);
        prop_assert!(a.chain_violation() <= 1e-10);
    }

    #[test]
    fn model_generators_are_members(seed in any::<u64>(), n in 1usize..=2, m in 1usize..=3, depth in 1usize..=3) {
        let mut rng = seeded(seed);
        let f = random_symbol(&mut rng, n, 2);
        let v = build_model(&f, m, depth).unwrap().generators();
        prop_assert!(membership(&f, m, &v, 1e-9).unwrap().member);
    }

    #[test]
    fn berezin_preserves_positivity(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = seeded(seed);
        let f = random_symbol(&mut rng, 2, 2);
        let t = random_member(&mut rng, &f, m, 2, 1e-9).unwrap();
        let k = berezin_kernel(&f, m, &t, 3, 1e-9).unwrap();
        let a = random_matrix(&mut rng, k.fock_dim(), k.fock_dim());
        prop_assert!(min_eigenvalue(&k.transform(&(&a * a.adjoint())).unwrap()) >= -1e-10);
        // truncated Gram is a contraction
        prop_assert!(min_eigenvalue(&(identity(2) - k.gram())) >= -1e-10);
    }

    #[test]
    fn nilpotent_kernels_are_isometric(seed in any::<u64>(), m in 1usize..=3) {
        let mut rng = seeded(seed);
        let f = random_symbol(&mut rng, 2, 2);
        let t = random_nilpotent_member(&mut rng, &f, m, 3, 1e-9).unwrap();
        let k = berezin_kernel(&f, m, &t, 3, 1e-9).unwrap();
        prop_assert!(max_abs_diff(&k.gram(), &identity(3)) <= 1e-10);
        let g = random_matrix(&mut rng, k.fock_dim(), k.fock_dim());
        let (_, _, cmp) = compare_forms(&f, m, &t, &g, 3, 1e-9).unwrap();
        prop_assert!(cmp.max_abs_difference <= 1e-8);
    }

    #[test]
    fn rescaling_round_trip(seed in any::<u64>(), e1 in -3i32..=3, e2 in -3i32..=3) {
        let mut rng = seeded(seed);
        let f = random_symbol(&mut rng, 2, 3);
        let c = [2f64.powi(e1), 2f64.powi(e2)];
        let back = f.rescale(&c).unwrap().rescale(&[1.0 / c[0], 1.0 / c[1]]).unwrap();
        prop_assert_eq!(&back, &f);
        let g = f.rescale(&c).unwrap();
        let there = check_linear_biholomorphism(&f, 1, &g, 1, &LinearMapCandidate::diagonal(&c).unwrap(), 3, 1e-9).unwrap();
        let back = check_linear_biholomorphism(&g, 1, &f, 1, &LinearMapCandidate::diagonal(&[1.0 / c[0], 1.0 / c[1]]).unwrap(), 3, 1e-9).unwrap();
        prop_assert!(there.passes() && back.passes());
    }

    #[test]
    fn linear_domains_are_starlike(seed in any::<u64>(), m in 1usize..=3, r in 0.0f64..=1.0) {
        let mut rng = seeded(seed);
        let f = PositiveRegularFunction::from_terms(2, &[("1", 0.5), ("2", 1.5)]).unwrap();
        let x = random_member(&mut rng, &f, m, 3, 1e-9).unwrap();
        prop_assert!(membership(&f, m, &x.scaled(r), 1e-9).unwrap().member);
    }

    #[test]
    fn composition_evaluates_as_nesting(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = seeded(seed);
        let outer = random_polynomial(&mut rng, n, 2, 4, true);
        let inner: Vec<_> = (0..n).map(|_| random_polynomial(&mut rng, n, 2, 4, false)).collect();
        let x = random_tuple(&mut rng, n, 2).scaled(0.5);
        let direct = outer.compose(&inner).unwrap().evaluate(&x).unwrap();
        let images: Vec<Mat> = inner.iter().map(|p| p.evaluate(&x).unwrap()).collect();
        let nested = outer.evaluate(&OperatorTuple::new(images).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&direct, &nested) <= 1e-10 * (1.0 + ncdomain::linalg::max_abs(&nested)));
    }
}
