use proptest::prelude::*;
use qtrace_core::laurent::{
    division_residual, kernel_basis, left_inverse, right_inverse, solve_division,
};
use qtrace_core::{BilateralSeries, Complex64, ConstantTerm, LaurentPoly, Window};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

fn poly(lo: i64, hi: i64) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(coeff(), (hi - lo + 1) as usize)
        .prop_map(move |v| LaurentPoly::from_pairs((lo..=hi).zip(v)))
}

fn series(w: i64) -> impl Strategy<Value = BilateralSeries> {
    prop::collection::vec(coeff(), (2 * w + 1) as usize)
        .prop_map(move |v| BilateralSeries::new(Window::symmetric(w), v, "random"))
}

/// Roots with modulus in `[1/rmax, 0.8] or [1.25, rmax]` and pairwise
/// distance > 0.2.
fn roots_within(n: usize, rmax: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..1.0f64, 0.0..std::f64::consts::TAU, any::<bool>()), n)
        .prop_map(move |v| {
            v.into_iter()
                .map(|(t, a, inside)| {
                    let r = if inside {
                        1.0 / rmax + (0.8 - 1.0 / rmax) * t
                    } else {
                        1.25 + (rmax - 1.25) * t
                    };
                    Complex64::from_polar(r, a)
                })
                .collect::<Vec<_>>()
        })
        .prop_filter("roots too close", |r| {
            r.iter()
                .enumerate()
                .all(|(i, a)| r[..i].iter().all(|b| (a - b).norm() > 0.2))
        })
}

fn distinct_roots(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    roots_within(n, 3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ct_is_invariant_under_argument_scaling(s in series(8), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let k = c(re, im);
        prop_assume!(k.norm() > 1e-3);
        prop_assert_eq!(s.scale_arg(k).unwrap().ct(), s.ct());
        prop_assert_eq!(s.scale_arg(c(0.7, 0.0)).unwrap().ct(), s.ct());
    }

    #[test]
    fn poly_ct_is_invariant_under_argument_scaling(p in poly(-4, 4), re in 0.1..3.0f64) {
        prop_assert_eq!(p.scale_arg(c(re, 0.0)).unwrap().ct(), p.ct());
    }

    #[test]
    fn conj_invol_is_an_involution(p in poly(-5, 5)) {
        prop_assert_eq!(p.conj_invol().conj_invol(), p.clone());
        for (e, a) in p.conj_invol().iter() {
            prop_assert_eq!(a, p.coeff(-e).conj());
        }
    }

    #[test]
    fn roots_reconstruct_the_polynomial(r in distinct_roots(3), lead in coeff(), lo in -3i64..3) {
        prop_assume!(lead.norm() > 0.1);
        let p = LaurentPoly::from_roots(lead, lo, &r);
        let rd = p.roots(None).unwrap();
        prop_assert_eq!(rd.n(), 3);
        prop_assert!(rd.reconstruction_error(&p, 16) < 1e-8);
    }

    #[test]
    fn kernel_elements_are_annihilated(r in distinct_roots(4), n in 1usize..=4) {
        let p = LaurentPoly::from_roots(c(1.0, 0.0), -1, &r[..n]);
        let rd = p.roots(None).unwrap();
        let w = Window::symmetric(64);
        let basis = kernel_basis(&rd, w).unwrap();
        prop_assert_eq!(basis.len(), n);
        let inner = w.interior_for(&p).unwrap();
        for f in &basis {
            // normalized on the interior where the coefficients stay finite
            let scale = f.max_norm_on(inner);
            let pf = f.mul_poly(&p);
            prop_assert!(pf.max_norm_on(inner) <= 1e-10 * scale);
        }
    }

    // one of the two inverses grows like max(|r|, 1/|r|)^16 across the
    // window, and the residual is rounding on that scale; |r| <= 2 keeps it
    // below 1e-9 of the target
    #[test]
    fn division_is_consistent(t in series(16), r in roots_within(2, 2.0)) {
        let p = LaurentPoly::from_roots(c(1.0, 0.0), 0, &r);
        let s = solve_division(&t, &p).unwrap();
        prop_assert!(division_residual(&s, &p, &t) <= 1e-9 * t.max_norm().max(1.0));
    }

    #[test]
    fn right_inverse_of_cubic(r in distinct_roots(3)) {
        let p = LaurentPoly::from_roots(c(1.0, 0.0), 0, &r);
        let w = Window::new(0, 48);
        let inv = right_inverse(&p, w).unwrap();
        let prod = inv.mul_poly(&p);
        prop_assert!((prod.ct() - c(1.0, 0.0)).norm() < 1e-12);
        let inner = w.interior_for(&p).unwrap();
        let scale = inv.max_norm().max(1.0);
        for i in inner.iter().filter(|&i| i != 0) {
            prop_assert!(prod.coeff(i).norm() < 1e-12 * scale, "i = {}", i);
        }
    }
}

#[test]
fn geometric_inverses_of_z_minus_two() {
    let p = LaurentPoly::from_real(0, &[-2.0, 1.0]);
    let r = right_inverse(&p, Window::new(0, 32)).unwrap();
    for i in 0..=32 {
        assert!((r.coeff(i) - c(-0.5 * 0.5f64.powi(i as i32), 0.0)).norm() < 1e-15);
    }
    assert!((r.mul_poly(&p).ct() - c(1.0, 0.0)).norm() < 1e-10);
    let l = left_inverse(&p, Window::new(-32, 0)).unwrap();
    assert_eq!(l.coeff(0), c(0.0, 0.0));
    for i in 1..=32 {
        assert!((l.coeff(-i) - c(2f64.powi(i as i32 - 1), 0.0)).norm() < 1e-9);
    }
}

#[test]
fn kernel_of_two_root_product() {
    // (z - 2)(z - 3)/z
    let p = LaurentPoly::from_roots(c(1.0, 0.0), -1, &[c(2.0, 0.0), c(3.0, 0.0)]);
    let w = Window::symmetric(64);
    let basis = kernel_basis(&p.roots(None).unwrap(), w).unwrap();
    assert_eq!(basis.len(), 2);
    let inner = w.interior_for(&p).unwrap();
    for f in &basis {
        assert!(f.mul_poly(&p).max_norm_on(inner) <= 1e-10 * f.max_norm_on(inner));
    }
}

#[test]
fn division_of_p_by_itself() {
    let p = LaurentPoly::from_real(-1, &[1.0, -2.5, 1.0]);
    let t = BilateralSeries::from_poly(&p, Window::symmetric(16));
    let s = solve_division(&t, &p).unwrap();
    assert!(division_residual(&s, &p, &t) < 1e-10);
    let zero = BilateralSeries::zeros(Window::symmetric(16));
    let s0 = solve_division(&zero, &p).unwrap();
    assert_eq!(s0.max_norm(), 0.0);
}
