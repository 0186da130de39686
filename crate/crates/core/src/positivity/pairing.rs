use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraParams;
use crate::error::{Error, Result};
use crate::trace::{circle_points, ConstraintSolution, TraceAnsatz};

/// Relative mismatch allowed between `|prod alpha|` of the paired zeros and
/// `|product_target|`.
pub const PAIR_MODULUS_TOL: f64 = 1e-8;
const SCALE_SAMPLES: usize = 4096;

/// A paired ansatz and whether it needed the self-paired zero of odd `N`.
#[derive(Clone, Debug)]
pub struct PairedAnsatz {
    pub ansatz: TraceAnsatz,
    pub self_paired: bool,
}

/// Partner of `alpha` under `z -> q^-2 / conj(z)`.
pub fn partner(q: f64, alpha: Complex64) -> Complex64 {
    q.powi(-2) / alpha.conj()
}

/// Seeded free zeros for `N`: `N / 2` points with `|alpha|` uniform in
/// `[q^-0.25, q^-0.75]` (log scale) and uniform argument.
pub fn default_free_zeros(q: f64, n: i64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..(n.max(0) / 2))
        .map(|_| {
            let t = 0.25 + 0.5 * rng.random::<f64>();
            let arg = std::f64::consts::TAU * rng.random::<f64>();
            Complex64::from_polar(q.powf(-t), arg)
        })
        .collect()
}

/// Zeros in pairs `(alpha, q^-2 / conj(alpha))`, plus one zero on
/// `|z| = 1/q` when `N` is odd; a common rotation of all zeros then meets
/// the product target. The scale `c` makes `c_0 = 1`.
pub fn build_paired_ansatz(
    params: &AlgebraParams,
    poles: &[Complex64],
    solution: &ConstraintSolution,
    free: &[Complex64],
) -> Result<PairedAnsatz> {
    let n = solution.n();
    if n < 0 {
        return Err(Error::Infeasible(format!("N = {n} < 0")));
    }
    if !solution.feasible() {
        return Err(Error::Infeasible(format!(
            "N = 0 needs prod alpha = 1, but the poles require {}",
            solution.product_target()
        )));
    }
    let q = params.q();
    let pairs = (n / 2) as usize;
    if free.len() != pairs {
        return Err(Error::InvalidAnsatz(format!(
            "N = {n} needs {pairs} free zeros, got {}",
            free.len()
        )));
    }
    if free.iter().any(|a| a.norm() == 0.0) {
        return Err(Error::InvalidAnsatz("free zero at the origin".into()));
    }
    let self_paired = n % 2 == 1;
    let mut zeros: Vec<Complex64> = free.iter().flat_map(|&a| [a, partner(q, a)]).collect();
    if self_paired {
        zeros.push(Complex64::new(1.0 / q, 0.0));
    }
    let target = solution.product_target();
    let current: Complex64 = zeros.iter().product();
    if (current.norm() - target.norm()).abs() > PAIR_MODULUS_TOL * target.norm() {
        return Err(Error::InvalidAnsatz(format!(
            "paired zeros have |prod| = {}, target needs {}",
            current.norm(),
            target.norm()
        )));
    }
    if n > 0 {
        let psi = (target / current).arg() / n as f64;
        let rot = Complex64::from_polar(1.0, psi);
        for z in zeros.iter_mut() {
            *z *= rot;
        }
    }
    let unit = TraceAnsatz::new(params.clone(), Complex64::new(1.0, 0.0), zeros, poles.to_vec())?;
    let theta = unit.theta()?;
    let pts = circle_points(SCALE_SAMPLES);
    let mut c0 = Complex64::default();
    for z in pts {
        c0 += unit.eval(&theta, z)?;
    }
    c0 /= SCALE_SAMPLES as f64;
    if c0.norm() == 0.0 {
        return Err(Error::InvalidAnsatz("ansatz has zero mean on |z| = 1".into()));
    }
    Ok(PairedAnsatz {
        ansatz: unit.with_c(c0.inv()),
        self_paired,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;
    use crate::trace::{solve_constraints, Orientation};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn partner_of_real_zero() {
        // (1.3, q^-2 / 1.3) at q = 0.5
        assert!((partner(0.5, c(1.3, 0.0)) - c(4.0 / 1.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_target_is_met() {
        let s = 1.2 + 1.0 / 1.2;
        let params =
            AlgebraParams::new(0.5, LaurentPoly::from_real(-1, &[1.0, -s, 1.0]), 1).unwrap();
        let poles = vec![c(2.4, 0.0), c(1.0 / 0.6, 0.0)];
        let sol = solve_constraints(&params, &poles, Orientation::Mirrored);
        assert_eq!(sol.n(), 4);
        let free = [c(1.3, 0.2), c(-0.4, 1.1)];
        let pa = build_paired_ansatz(&params, &poles, &sol, &free).unwrap();
        let prod: Complex64 = pa.ansatz.zeros.iter().product();
        assert!((prod - sol.product_target()).norm() < 1e-10 * prod.norm());
        assert_eq!(pa.ansatz.multiplier_mismatch(Orientation::Mirrored).0, 0);
        assert!(pa.ansatz.multiplier_mismatch(Orientation::Mirrored).1 < 1e-10);
        assert!(!pa.self_paired);
    }

    #[test]
    fn no_zeros_when_n_is_zero() {
        let s = 1.2 + 1.0 / 1.2;
        let params =
            AlgebraParams::new(0.5, LaurentPoly::from_real(-1, &[1.0, -s, 1.0]), -1).unwrap();
        let poles = vec![c(2.4, 0.0), c(1.0 / 0.6, 0.0)];
        let sol = solve_constraints(&params, &poles, Orientation::Mirrored);
        let pa = build_paired_ansatz(&params, &poles, &sol, &[]).unwrap();
        assert!(pa.ansatz.zeros.is_empty());
        assert!(pa.ansatz.c.re > 0.0);
        assert!(pa.ansatz.c.im.abs() < 1e-12);
    }

    #[test]
    fn wrong_free_count_and_negative_n() {
        let params = AlgebraParams::new(0.5, LaurentPoly::one(), 1).unwrap();
        let sol = solve_constraints(&params, &[], Orientation::Mirrored);
        assert!(build_paired_ansatz(&params, &[], &sol, &[]).is_err());
        let sol = solve_constraints(&params, &[], Orientation::Published);
        assert!(matches!(
            build_paired_ansatz(&params, &[], &sol, &[]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn seeded_free_zeros() {
        let a = default_free_zeros(0.5, 5, 3);
        assert_eq!(a.len(), 2);
        assert_eq!(a, default_free_zeros(0.5, 5, 3));
        for z in a {
            assert!(z.norm() >= 0.5f64.powf(-0.25) - 1e-12 && z.norm() <= 0.5f64.powf(-0.75));
        }
    }
}
