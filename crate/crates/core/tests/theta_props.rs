use proptest::prelude::*;
use qtrace_core::theta::multiplier;
use qtrace_core::{Complex64, ThetaParams};

fn annulus_point() -> impl Strategy<Value = Complex64> {
    (0.5f64.ln()..2f64.ln(), 0.0..std::f64::consts::TAU)
        .prop_map(|(lr, a)| Complex64::from_polar(lr.exp(), a))
}

fn point_set(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (0.6f64..3.0, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a)),
        0..=max,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quasi_periodicity(z in annulus_point(), qi in 0usize..3) {
        let q = [0.3, 0.5, 0.7][qi];
        let t = ThetaParams::new(q).unwrap();
        let th = t.theta_hat(z).unwrap();
        let shifted = t.theta_hat(z * q * q).unwrap();
        prop_assert!((shifted + th / z).norm() <= 1e-12 * (1.0 + th.norm()));
    }

    #[test]
    fn no_zeros_on_the_q_circle(a in 0.0..std::f64::consts::TAU, qi in 0usize..3) {
        let q = [0.3, 0.5, 0.7][qi];
        let t = ThetaParams::new(q).unwrap();
        prop_assert!(t.theta_hat(Complex64::from_polar(q, a)).unwrap().norm() > 0.01);
    }

    #[test]
    fn conjugate_symmetry(z in annulus_point()) {
        let t = ThetaParams::new(0.5).unwrap();
        let a = t.theta_hat(z.conj()).unwrap();
        let b = t.theta_hat(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multiplier_consistency(
        zeros in point_set(4),
        poles in point_set(4),
        l in -3i64..=3,
        zs in prop::collection::vec(annulus_point(), 64),
    ) {
        let q = 0.5;
        let t = ThetaParams::new(q).unwrap();
        let m = multiplier(q, &zeros, &poles, l);
        let one = Complex64::new(1.0, 0.0);
        for z in zs {
            let (Ok(w0), Ok(w1)) = (
                t.theta_quotient(z, &zeros, &poles, l, one),
                t.theta_quotient(z * q * q, &zeros, &poles, l, one),
            ) else {
                continue;
            };
            let rhs = m.constant * z.powi(m.zpow as i32) * w0;
            let scale = w1.norm().max(rhs.norm());
            prop_assert!((w1 - rhs).norm() <= 1e-10 * scale);
        }
    }
}

#[test]
fn zeros_of_theta() {
    for q in [0.3, 0.5, 0.7] {
        let t = ThetaParams::new(q).unwrap();
        assert!(t.theta_hat(Complex64::new(1.0, 0.0)).unwrap().norm() <= 1e-14);
        assert!(t.theta_hat(Complex64::new(q * q, 0.0)).unwrap().norm() <= 1e-14);
        assert!(t.theta_hat(Complex64::new(0.0, 0.0)).is_err());
        assert!(q.powi(2 * t.trunc_terms as i32) < 1e-16);
    }
}

#[test]
fn quotient_edge_cases() {
    let t = ThetaParams::new(0.5).unwrap();
    let z = Complex64::new(0.3, 0.8);
    let three = Complex64::new(3.0, 0.0);
    assert_eq!(t.theta_quotient(z, &[], &[], 0, three).unwrap(), three);
    let a = Complex64::new(1.7, -0.2);
    let v = t.theta_quotient(z, &[a], &[a], 2, three).unwrap();
    assert!((v - three * z * z).norm() < 1e-12);
    assert!(t.theta_quotient(a * 0.25, &[], &[a], 0, three).is_err());
    assert!(ThetaParams::new(1.5).is_err());
    assert!(ThetaParams::new(0.95).is_err());
}
