use proptest::prelude::*;
use qtrace_core::algebra::{apply_g, apply_rho, check_relations_preserved, StructureMap};
use qtrace_core::trace::random_element;
use qtrace_core::{AlgebraElement, AlgebraParams, Complex64, LaurentPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn flagship(k: i64) -> AlgebraParams {
    let s = 1.2 + 1.0 / 1.2;
    AlgebraParams::new(0.5, LaurentPoly::from_real(-1, &[1.0, -s, 1.0]), k).unwrap()
}

/// A self-conjugate `P` with complex coefficients.
fn twisted_p(k: i64) -> AlgebraParams {
    let p = LaurentPoly::self_conjugate(1.0, &[Complex64::new(0.9, 0.7), Complex64::new(-1.3, 0.2)]);
    AlgebraParams::new(0.6, p, k).unwrap()
}

fn rel_diff(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    a.max_abs_diff(b) / a.max_norm().max(b.max_norm()).max(1.0)
}

fn triple(seed: u64) -> (AlgebraElement, AlgebraElement, AlgebraElement) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (
        random_element(&mut rng, 2, 3),
        random_element(&mut rng, 2, 3),
        random_element(&mut rng, 2, 3),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn multiplication_is_associative(seed in any::<u64>(), k in -2i64..=2) {
        for params in [flagship(k), twisted_p(k)] {
            let (a, b, c) = triple(seed);
            let left = a.multiply(&b, &params).multiply(&c, &params);
            let right = a.multiply(&b.multiply(&c, &params), &params);
            prop_assert!(rel_diff(&left, &right) < 1e-10);
        }
    }

    #[test]
    fn twist_is_multiplicative(seed in any::<u64>(), k in -2i64..=2, l in -3i64..=3) {
        let params = AlgebraParams::with_twist(0.5, flagship(0).p().clone(), k, l).unwrap();
        let (a, b, _) = triple(seed);
        let lhs = apply_g(&a.multiply(&b, &params), &params);
        let rhs = apply_g(&a, &params).multiply(&apply_g(&b, &params), &params);
        prop_assert!(rel_diff(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn conjugation_is_multiplicative(seed in any::<u64>(), k in -2i64..=2) {
        for params in [flagship(k), twisted_p(k)] {
            let (a, b, _) = triple(seed);
            let lhs = apply_rho(&a.multiply(&b, &params), &params).unwrap();
            let rhs = apply_rho(&a, &params)
                .unwrap()
                .multiply(&apply_rho(&b, &params).unwrap(), &params);
            prop_assert!(rel_diff(&lhs, &rhs) < 1e-10);
        }
    }

    #[test]
    fn conjugation_squares_to_twist(seed in any::<u64>(), k in -2i64..=2) {
        for params in [flagship(k), twisted_p(k)] {
            prop_assert_eq!(params.l(), 2 * k);
            let (a, _, _) = triple(seed);
            let twice = apply_rho(&apply_rho(&a, &params).unwrap(), &params).unwrap();
            prop_assert!(rel_diff(&twice, &apply_g(&a, &params)) < 1e-10);
        }
    }

    #[test]
    fn conjugation_is_antilinear(seed in any::<u64>(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let params = twisted_p(1);
        let (a, _, _) = triple(seed);
        let s = Complex64::new(re, im);
        let lhs = apply_rho(&a.scale(s), &params).unwrap();
        let rhs = apply_rho(&a, &params).unwrap().scale(s.conj());
        prop_assert!(rel_diff(&lhs, &rhs) < 1e-12);
    }
}

#[test]
fn relations_survive_both_structure_maps() {
    for k in -2..=2 {
        for params in [flagship(k), twisted_p(k)] {
            assert!(check_relations_preserved(StructureMap::G, &params).max_residual < 1e-12);
            assert!(check_relations_preserved(StructureMap::Rho, &params).max_residual < 1e-12);
        }
    }
    let odd = AlgebraParams::with_twist(0.4, LaurentPoly::from_real(0, &[-2.0, 1.0]), 1, 5).unwrap();
    assert!(check_relations_preserved(StructureMap::G, &odd).max_residual < 1e-12);
}

#[test]
fn algebra_element_json_round_trip() {
    let params = flagship(1);
    let a = AlgebraElement::u().multiply(&AlgebraElement::v(), &params).add(&AlgebraElement::u());
    let s = serde_json::to_string(&a).unwrap();
    assert!(s.starts_with(r#"{"terms":{"#));
    let back: AlgebraElement = serde_json::from_str(&s).unwrap();
    assert_eq!(back, a);
}
