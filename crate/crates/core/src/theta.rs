//! Multiplicative Jacobi theta function with nome `q`, in the
//! integral-weight normalization
//!
//! ```text
//! th(z) = (z - 1) prod_{m >= 1} (1 - q^{2m} z)(1 - q^{2m} / z)
//! ```
//!
//! It vanishes exactly on `q^{2Z}` and satisfies `th(q^2 z) = -z^-1 th(z)`.
//! Quotients `c z^l prod th(z/a_i) / prod th(z/b_j)` are the building blocks
//! of candidate traces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::complex_pair;

/// Minimum distance (relative to `|z|`) to a pole orbit point.
pub const POLE_PROXIMITY: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    pub q: f64,
    /// Factors kept at `|z| = 1`; more are added away from the unit circle.
    pub trunc_terms: usize,
}

impl ThetaParams {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidQ(q));
        }
        if q >= 0.9 {
            return Err(Error::QTooLarge(q));
        }
        // q^{2T} < 1e-17
        let t = (17.0 * std::f64::consts::LN_10 / (-2.0 * q.ln())).ceil() as usize;
        Ok(Self {
            q,
            trunc_terms: t.max(1),
        })
    }

    fn terms_for(&self, z: Complex64) -> usize {
        let r = z.norm().max(1.0 / z.norm());
        let extra = (r.ln() / (-2.0 * self.q.ln())).ceil().max(0.0) as usize;
        self.trunc_terms + extra
    }

    /// `th(z)`.
    pub fn theta_hat(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() == 0.0 {
            return Err(Error::ZeroArgument);
        }
        Ok(self.theta_unchecked(z))
    }

    fn theta_unchecked(&self, z: Complex64) -> Complex64 {
        (z - 1.0) * self.cofactor(z)
    }

    /// `th(z) / (z - 1)`: the product over `m >= 1`, nonzero near `z = 1`.
    pub fn cofactor(&self, z: Complex64) -> Complex64 {
        let q2 = self.q * self.q;
        let zi = z.inv();
        let one = Complex64::new(1.0, 0.0);
        let mut acc = one;
        let mut qm = 1.0;
        for _ in 0..self.terms_for(z) {
            qm *= q2;
            acc *= (one - z * qm) * (one - zi * qm);
        }
        acc
    }

    /// Distance from `z` to the nearest point of `b q^{2Z}`.
    pub fn orbit_distance(&self, z: Complex64, b: Complex64) -> f64 {
        let ratio = (z / b).norm();
        let n = (ratio.ln() / (2.0 * self.q.ln())).round() as i32;
        (n - 1..=n + 1)
            .map(|k| (z - b * self.q.powi(2 * k)).norm())
            .fold(f64::MAX, f64::min)
    }

    /// `c z^l prod th(z/a) / prod th(z/b)`.
    pub fn theta_quotient(
        &self,
        z: Complex64,
        zeros: &[Complex64],
        poles: &[Complex64],
        l: i64,
        c: Complex64,
    ) -> Result<Complex64> {
        if z.norm() == 0.0 {
            return Err(Error::ZeroArgument);
        }
        for &b in poles {
            let d = self.orbit_distance(z, b);
            if d <= POLE_PROXIMITY * z.norm().max(1.0) {
                return Err(Error::EvaluationSingularity {
                    point: z.to_string(),
                    pole: b.to_string(),
                    distance: d,
                });
            }
        }
        let num: Complex64 = zeros.iter().map(|&a| self.theta_unchecked(z / a)).product();
        let den: Complex64 = poles.iter().map(|&b| self.theta_unchecked(z / b)).product();
        Ok(c * z.powi(l as i32) * num / den)
    }

    /// Factor picked up by the quotient under `z -> q^2 z`; see [`Multiplier`].
    pub fn multiplier(&self, zeros: &[Complex64], poles: &[Complex64], l: i64) -> Multiplier {
        multiplier(self.q, zeros, poles, l)
    }
}

/// `w(q^2 z) = constant * z^zpow * w(z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    pub zpow: i64,
    #[serde(with = "complex_pair")]
    pub constant: Complex64,
}

/// Multiplier of `c z^l prod th(z/a_i) / prod th(z/b_j)`: from
/// `th(q^2 z/a) = -(a/z) th(z/a)` each zero contributes `-a z^-1`, each pole
/// the inverse, and `(q^2 z)^l` contributes `q^{2l}`.
pub fn multiplier(q: f64, zeros: &[Complex64], poles: &[Complex64], l: i64) -> Multiplier {
    let n = zeros.len() as i64;
    let m = poles.len() as i64;
    let pa: Complex64 = zeros.iter().product();
    let pb: Complex64 = poles.iter().product();
    let sign = if (n - m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Multiplier {
        zpow: m - n,
        constant: q.powi(2 * l as i32) * sign * pa / pb,
    }
}
