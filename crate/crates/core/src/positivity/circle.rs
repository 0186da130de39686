use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{check_poles_off_circle, TraceAnsatz, POLE_ROOT_TOL};

/// Functions whose nonnegativity on `|z| = 1` is equivalent to positivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircleFunction {
    /// `w(z)`.
    #[serde(rename = "w")]
    W,
    /// `z^k P(z) w(qz)`.
    #[serde(rename = "wP")]
    WP,
}

impl std::str::FromStr for CircleFunction {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "w" => Ok(CircleFunction::W),
            "wP" => Ok(CircleFunction::WP),
            _ => Err(format!("unknown function {s:?}; expected w or wP")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CirclePositivityReport {
    pub function: CircleFunction,
    pub min_value: f64,
    pub max_imag: f64,
    pub max_abs: f64,
    pub samples: usize,
    /// Relative to `max_abs`.
    pub tolerance: f64,
    pub positive: bool,
}

/// Evaluator for `w` and for `z^k P(z) w(qz)`.
///
/// In the second function each pole `beta` of `w(qz)` sits on the orbit of
/// a root `r = q beta` of `P`; the factor `z - r` of `P` is cancelled
/// against `th(q^2 z/r) = -(z - r) cofactor(z/r) / z` before evaluating, so roots
/// of `P` on the unit circle cause no trouble.
pub struct CircleEvaluator<'a> {
    ansatz: &'a TraceAnsatz,
    theta: crate::theta::ThetaParams,
    lead: Complex64,
    lead_exp: i64,
    free_roots: Vec<Complex64>,
    matched: Vec<Complex64>,
}

impl<'a> CircleEvaluator<'a> {
    pub fn new(ansatz: &'a TraceAnsatz) -> Result<Self> {
        let theta = ansatz.theta()?;
        let q = ansatz.params.q();
        let rd = ansatz.params.p().roots(None)?;
        let mut free_roots = rd.expanded();
        let mut matched = Vec::with_capacity(ansatz.poles.len());
        for b in &ansatz.poles {
            let target = b * q;
            let (idx, d) = free_roots
                .iter()
                .enumerate()
                .map(|(i, r)| (i, (r - target).norm()))
                .fold((usize::MAX, f64::INFINITY), |a, x| if x.1 < a.1 { x } else { a });
            if idx == usize::MAX || d > POLE_ROOT_TOL * target.norm().max(1.0) {
                return Err(Error::InvalidAnsatz(format!(
                    "pole {b} does not match a root of P"
                )));
            }
            matched.push(free_roots.swap_remove(idx));
        }
        Ok(Self {
            ansatz,
            theta,
            lead: rd.leading_coeff,
            lead_exp: rd.leading_exponent,
            free_roots,
            matched,
        })
    }

    pub fn eval(&self, f: CircleFunction, z: Complex64) -> Result<Complex64> {
        match f {
            CircleFunction::W => self.ansatz.eval(&self.theta, z),
            CircleFunction::WP => Ok(self.eval_wp(z)),
        }
    }

    fn eval_wp(&self, z: Complex64) -> Complex64 {
        let a = self.ansatz;
        let q = a.params.q();
        let qz = z * q;
        let mut v = a.c * z.powi(a.params.k() as i32) * qz.powi(a.l_power as i32);
        v *= self.lead * z.powi(self.lead_exp as i32);
        for r in &self.free_roots {
            v *= z - r;
        }
        for &al in &a.zeros {
            v *= self.theta.theta_hat(qz / al).expect("qz != 0");
        }
        // r = q beta, so th(qz / beta) = th(q^2 z / r) = -(r / z) th(z / r)
        // and (z - r) / th(qz / beta) = -z / cofactor(z / r)
        for &r in &self.matched {
            v *= -z / self.theta.cofactor(z / r);
        }
        v
    }
}

/// Sample both functions at `samples` uniform points of the unit circle.
pub fn circle_positivity(
    ansatz: &TraceAnsatz,
    samples: usize,
    tol: f64,
    pole_tol: f64,
) -> Result<[CirclePositivityReport; 2]> {
    check_poles_off_circle(ansatz, 1.0, pole_tol)?;
    let ev = CircleEvaluator::new(ansatz)?;
    let report = |f: CircleFunction| -> Result<CirclePositivityReport> {
        let vals: Vec<Complex64> = (0..samples)
            .into_par_iter()
            .map(|s| {
                let phi = std::f64::consts::TAU * s as f64 / samples as f64;
                ev.eval(f, Complex64::from_polar(1.0, phi))
            })
            .collect::<Result<_>>()?;
        let min_value = vals.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        let max_imag = vals.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let max_abs = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(CirclePositivityReport {
            function: f,
            min_value,
            max_imag,
            max_abs,
            samples,
            tolerance: tol,
            positive: min_value > tol * max_abs && max_imag <= tol * max_abs,
        })
    };
    Ok([report(CircleFunction::W)?, report(CircleFunction::WP)?])
}
