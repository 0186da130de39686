use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ansatz::{Orientation, TraceAnsatz};
use super::moments::MomentTable;
use crate::algebra::{apply_g, AlgebraElement, AlgebraParams};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::theta::POLE_PROXIMITY;

/// `T(a)`: pair the degree-zero part of `a` with the moments.
pub fn trace_of(a: &AlgebraElement, mt: &MomentTable) -> Result<Complex64> {
    pair(&a.degree_zero_part(), mt)
}

/// `sum_i r_i c_i`, summed in ascending exponent order.
pub fn pair(r: &LaurentPoly, mt: &MomentTable) -> Result<Complex64> {
    let need = r.max_abs_exp();
    if need > mt.window() {
        return Err(Error::WindowTooSmall {
            have: mt.window(),
            need,
        });
    }
    Ok(r.iter().map(|(i, ri)| ri * mt.get(i)).sum())
}

/// Uniform sample from the closed unit disk.
pub fn unit_disk<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    let t = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, t)
}

/// Random element `sum_{|m| <= ladder} L(m) R_m(Z)` with every `R_m`
/// supported on `[-zdeg, zdeg]`; coefficients uniform on the unit disk.
pub fn random_element<R: Rng>(rng: &mut R, ladder: i64, zdeg: i64) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for m in -ladder..=ladder {
        let r = LaurentPoly::from_pairs((-zdeg..=zdeg).map(|e| (e, unit_disk(rng))));
        out = out.add(&AlgebraElement::ladder(m, r));
    }
    out
}

/// Max and mean of a residual sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub mean_residual: f64,
    pub samples: usize,
    pub seed: u64,
}

impl ResidualReport {
    fn from_values(values: &[f64], seed: u64) -> Self {
        let max_residual = values.iter().copied().fold(0.0, f64::max);
        let mean_residual = if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        };
        Self {
            max_residual,
            mean_residual,
            samples: values.len(),
            seed,
        }
    }
}

/// `|T(ab) - T(b g(a))| / max(|T(ab)|, 1)` for `trials` seeded random pairs
/// of ladder degree <= 2 and `Z`-degree <= 3.
pub fn verify_twisted_trace(
    mt: &MomentTable,
    params: &AlgebraParams,
    trials: usize,
    seed: u64,
) -> Result<ResidualReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(AlgebraElement, AlgebraElement)> = (0..trials)
        .map(|_| (random_element(&mut rng, 2, 3), random_element(&mut rng, 2, 3)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|(a, b)| twisted_residual(a, b, mt, params))
        .collect::<Result<_>>()?;
    Ok(ResidualReport::from_values(&values, seed))
}

/// Relative residual of `T(ab) = T(b g(a))` for one pair.
pub fn twisted_residual(
    a: &AlgebraElement,
    b: &AlgebraElement,
    mt: &MomentTable,
    params: &AlgebraParams,
) -> Result<f64> {
    let lhs = trace_of(&a.multiply(b, params), mt)?;
    let rhs = trace_of(&b.multiply(&apply_g(a, params), params), mt)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

/// Residuals of the functional equation of `w` on the circles
/// `|z| = 1, q^{1/2}, q^{-1/2}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiperiodicityReport {
    pub orientation: Orientation,
    /// `w(z/q) = z^{+-l} w(qz)` in the given orientation.
    pub max_residual: f64,
    /// The same equation multiplied through by `P(z)`.
    pub with_p_residual: f64,
    /// `w(z/q) = q^l z^l w(qz)`, the form with the extra `q^l`; a by-product,
    /// not a gate.
    pub q_power_form_residual: f64,
    pub samples: usize,
    /// Points skipped for lying on a pole orbit.
    pub skipped: usize,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Sample `samples` points on each of the three circles.
pub fn verify_quasiperiodicity(
    ansatz: &TraceAnsatz,
    orientation: Orientation,
    samples: usize,
) -> Result<QuasiperiodicityReport> {
    let theta = ansatz.theta()?;
    let q = ansatz.params.q();
    let l = ansatz.params.l();
    let ol = orientation.sign() * l;
    let p = ansatz.params.p();
    let pts: Vec<Complex64> = [1.0, q.sqrt(), 1.0 / q.sqrt()]
        .iter()
        .flat_map(|&r| {
            (0..samples).map(move |s| {
                Complex64::from_polar(r, 0.1234 + std::f64::consts::TAU * s as f64 / samples as f64)
            })
        })
        .collect();
    let rows: Vec<Option<(f64, f64, f64)>> = pts
        .par_iter()
        .map(|&z| {
            let (a, b) = match (ansatz.eval(&theta, z / q), ansatz.eval(&theta, z * q)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return None,
            };
            let zl = z.powi(ol as i32);
            let pz = p.eval(z);
            let main = rel(a, zl * b);
            let with_p = rel(pz * a, pz * zl * b);
            let qform = rel(a, q.powi(l as i32) * z.powi(l as i32) * b);
            Some((main, with_p, qform))
        })
        .collect();
    let kept: Vec<(f64, f64, f64)> = rows.iter().flatten().copied().collect();
    let fold = |f: fn(&(f64, f64, f64)) -> f64| kept.iter().map(f).fold(0.0, f64::max);
    Ok(QuasiperiodicityReport {
        orientation,
        max_residual: fold(|x| x.0),
        with_p_residual: fold(|x| x.1),
        q_power_form_residual: fold(|x| x.2),
        samples: kept.len(),
        skipped: rows.len() - kept.len(),
    })
}

/// Whether `z` is within the evaluation guard of a pole orbit.
pub fn near_pole_orbit(ansatz: &TraceAnsatz, z: Complex64) -> Result<bool> {
    let theta = ansatz.theta()?;
    Ok(ansatz
        .poles
        .iter()
        .any(|&b| theta.orbit_distance(z, b) <= POLE_PROXIMITY * z.norm().max(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trace_of_basics() {
        let s = 1.2 + 1.0 / 1.2;
        let params =
            AlgebraParams::new(0.5, LaurentPoly::from_real(-1, &[1.0, -s, 1.0]), 1).unwrap();
        let mt = MomentTable::from_fn(4, |i| c(0.5f64.powi(i.abs() as i32), 0.1 * i as f64));
        assert_eq!(trace_of(&AlgebraElement::one(), &mt).unwrap(), mt.get(0));
        let ur = AlgebraElement::ladder(1, LaurentPoly::from_real(-2, &[1.0, 2.0, 3.0]));
        assert_eq!(trace_of(&ur, &mt).unwrap(), c(0.0, 0.0));
        let uv = AlgebraElement::u().multiply(&AlgebraElement::v(), &params);
        let pq = params.p_scaled(-1);
        let expect: Complex64 = pq.iter().map(|(i, p)| p * mt.get(i)).sum();
        assert!((trace_of(&uv, &mt).unwrap() - expect).norm() < 1e-15);
        let far = AlgebraElement::z_pow(9);
        assert!(matches!(trace_of(&far, &mt), Err(Error::WindowTooSmall { need: 9, .. })));
    }

    #[test]
    fn laurent_pairs_commute_under_any_moments() {
        let params = AlgebraParams::new(0.5, LaurentPoly::from_real(-1, &[1.0, -2.9, 1.0]), 1)
            .unwrap();
        let mt = MomentTable::from_fn(16, |i| c(0.3 * i as f64, 0.7));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let a = random_element(&mut rng, 0, 3);
            let b = random_element(&mut rng, 0, 3);
            assert!(twisted_residual(&a, &b, &mt, &params).unwrap() < 1e-12);
        }
    }

    #[test]
    fn random_elements_are_seeded() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(random_element(&mut r1, 2, 3), random_element(&mut r2, 2, 3));
        let z = unit_disk(&mut r1);
        assert!(z.norm() <= 1.0);
    }
}
