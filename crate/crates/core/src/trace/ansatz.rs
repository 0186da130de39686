use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::algebra::AlgebraParams;
use crate::error::{Error, Result};
use crate::json::{complex_pair, complex_vec};
use crate::theta::{multiplier, ThetaParams};

/// How a pole `beta` must sit relative to a root of `P`.
pub const POLE_ROOT_TOL: f64 = 1e-8;
/// Relative tolerance of the gauge precondition `|prod beta| = q^-M`.
pub const GAUGE_MODULUS_TOL: f64 = 1e-8;
/// With `N = 0` the product target must equal the empty product to this
/// tolerance.
pub const EMPTY_PRODUCT_TOL: f64 = 1e-8;

/// Sign convention of the zero count.
///
/// `Published` is `N = M - 2k`; `Mirrored` is `N = M + 2k`. They correspond
/// to the two functional equations `w(q^2 z) = q^{-+l} z^{-+l} w(z)`, and
/// only one of them is forced by `T(ab) = T(b g(a))`. Serialized as `-1` and
/// `+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Published,
    Mirrored,
}

impl Orientation {
    pub fn sign(self) -> i64 {
        match self {
            Orientation::Published => -1,
            Orientation::Mirrored => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Orientation::Published => Orientation::Mirrored,
            Orientation::Mirrored => Orientation::Published,
        }
    }

    /// `(zpow, constant)` with `w(q^2 z) = constant * z^zpow * w(z)`.
    pub fn required_multiplier(self, q: f64, l: i64) -> (i64, Complex64) {
        let s = self.sign();
        (-s * l, Complex64::new(q.powi((-s * l) as i32), 0.0))
    }
}

impl Serialize for Orientation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.sign())
    }
}

/// Roots `r` of `P` in the annulus `q < |r| < 1/q`, divided by `q`, with
/// multiplicity.
pub fn poles_from_p(params: &AlgebraParams) -> Result<Vec<Complex64>> {
    let q = params.q();
    let rd = params.p().roots(None)?;
    Ok(rd
        .expanded()
        .into_iter()
        .filter(|r| {
            let m = r.norm();
            m > q && m < 1.0 / q
        })
        .map(|r| r / q)
        .collect())
}

/// Zero count and product target for one orientation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountCandidate {
    pub orientation: Orientation,
    #[serde(rename = "N")]
    pub n: i64,
    /// Required `prod alpha_i` for the given poles.
    #[serde(with = "complex_pair")]
    pub product_target: Complex64,
}

impl CountCandidate {
    /// `N > 0`, or `N = 0` with a target of 1: without zeros the product
    /// constraint fixes the phase of `prod beta`.
    pub fn feasible(&self) -> bool {
        self.n > 0 || (self.n == 0 && self.empty_product_ok())
    }

    pub fn empty_product_ok(&self) -> bool {
        (self.product_target - 1.0).norm() <= EMPTY_PRODUCT_TOL
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintSolution {
    #[serde(rename = "M")]
    pub m: usize,
    pub primary: CountCandidate,
    pub alternative: CountCandidate,
}

impl ConstraintSolution {
    pub fn n(&self) -> i64 {
        self.primary.n
    }

    pub fn feasible(&self) -> bool {
        self.primary.feasible()
    }

    pub fn product_target(&self) -> Complex64 {
        self.primary.product_target
    }
}

fn candidate(q: f64, l: i64, poles: &[Complex64], orientation: Orientation) -> CountCandidate {
    let m = poles.len() as i64;
    let (zpow, constant) = orientation.required_multiplier(q, l);
    // the quotient with N zeros has zpow M - N and constant
    // (-1)^(N-M) prod(alpha) / prod(beta)
    let n = m - zpow;
    let sign = if (n - m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let pb: Complex64 = poles.iter().product();
    CountCandidate {
        orientation,
        n,
        product_target: constant * pb * sign,
    }
}

/// Equate the quotient's multiplier with the one demanded by the
/// functional equation of `w`, for both orientations; `primary` is the one
/// passed in.
pub fn solve_constraints(
    params: &AlgebraParams,
    poles: &[Complex64],
    primary: Orientation,
) -> ConstraintSolution {
    let (q, l) = (params.q(), params.l());
    ConstraintSolution {
        m: poles.len(),
        primary: candidate(q, l, poles, primary),
        alternative: candidate(q, l, poles, primary.other()),
    }
}

/// `w(z) = c z^l_power prod th(z/alpha) / prod th(z/beta)`.
#[derive(Clone, Debug, Serialize)]
pub struct TraceAnsatz {
    #[serde(with = "complex_pair")]
    pub c: Complex64,
    pub l_power: i64,
    #[serde(with = "complex_vec")]
    pub zeros: Vec<Complex64>,
    #[serde(with = "complex_vec")]
    pub poles: Vec<Complex64>,
    pub params: AlgebraParams,
    /// Accumulated rotation `phi` applied by [`gauge_normalize`]:
    /// `P` was replaced by `P(e^{i phi} z)`.
    pub gauge_phase: f64,
}

impl TraceAnsatz {
    pub fn new(
        params: AlgebraParams,
        c: Complex64,
        zeros: Vec<Complex64>,
        poles: Vec<Complex64>,
    ) -> Result<Self> {
        let a = Self {
            c,
            l_power: 0,
            zeros,
            poles,
            params,
            gauge_phase: 0.0,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.zeros.len()
    }

    pub fn m(&self) -> usize {
        self.poles.len()
    }

    pub fn theta(&self) -> Result<ThetaParams> {
        ThetaParams::new(self.params.q())
    }

    /// Pole placement: `1 < |beta| < q^-2` and `q beta` a root of `P`.
    pub fn validate(&self) -> Result<()> {
        let q = self.params.q();
        if self.zeros.iter().any(|a| a.norm() == 0.0) {
            return Err(Error::InvalidAnsatz("zero at the origin".into()));
        }
        if self.poles.is_empty() {
            return Ok(());
        }
        let roots = self.params.p().roots(None)?.expanded();
        for b in &self.poles {
            let m = b.norm();
            if !(m > 1.0 && m < q.powi(-2)) {
                return Err(Error::InvalidAnsatz(format!(
                    "pole {b} has modulus {m}, outside (1, q^-2)"
                )));
            }
            let d = roots
                .iter()
                .map(|r| (r - b * q).norm())
                .fold(f64::INFINITY, f64::min);
            if d > POLE_ROOT_TOL * m.max(1.0) {
                return Err(Error::InvalidAnsatz(format!(
                    "q * {b} is {d:e} away from every root of P"
                )));
            }
        }
        Ok(())
    }

    /// `w(z)`.
    pub fn eval(&self, theta: &ThetaParams, z: Complex64) -> Result<Complex64> {
        theta.theta_quotient(z, &self.zeros, &self.poles, self.l_power, self.c)
    }

    /// Mismatch between the quotient's multiplier and the one required in
    /// `orientation`: `(zpow difference, relative constant error)`.
    pub fn multiplier_mismatch(&self, orientation: Orientation) -> (i64, f64) {
        let q = self.params.q();
        let got = multiplier(q, &self.zeros, &self.poles, self.l_power);
        let (zpow, constant) = orientation.required_multiplier(q, self.params.l());
        (
            got.zpow - zpow,
            (got.constant - constant).norm() / constant.norm(),
        )
    }

    /// The same ansatz with another scale.
    pub fn with_c(&self, c: Complex64) -> Self {
        Self { c, ..self.clone() }
    }
}

/// Rotate poles and zeros by a common unit phase so that `prod beta` is
/// real positive, replacing `P(z)` by `P(e^{i phi} z)`. Requires
/// `|prod beta| = q^-M`.
pub fn gauge_normalize(ansatz: &TraceAnsatz) -> Result<TraceAnsatz> {
    let m = ansatz.m();
    if m == 0 {
        return Ok(ansatz.clone());
    }
    let q = ansatz.params.q();
    let pb: Complex64 = ansatz.poles.iter().product();
    let expected = q.powi(-(m as i32));
    if (pb.norm() - expected).abs() > GAUGE_MODULUS_TOL * expected {
        return Err(Error::GaugeModulus {
            found: pb.norm(),
            expected,
        });
    }
    let phi = pb.arg() / m as f64;
    let rot = Complex64::from_polar(1.0, -phi);
    let p = ansatz.params.p().scale_arg(rot.inv())?;
    Ok(TraceAnsatz {
        c: ansatz.c,
        l_power: ansatz.l_power,
        zeros: ansatz.zeros.iter().map(|a| a * rot).collect(),
        poles: ansatz.poles.iter().map(|b| b * rot).collect(),
        params: ansatz.params.with_p(p)?,
        gauge_phase: ansatz.gauge_phase + phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn flagship(k: i64) -> AlgebraParams {
        let s = 1.2 + 1.0 / 1.2;
        AlgebraParams::new(0.5, LaurentPoly::from_real(-1, &[1.0, -s, 1.0]), k).unwrap()
    }

    #[test]
    fn flagship_poles() {
        let mut poles = poles_from_p(&flagship(1)).unwrap();
        poles.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(poles.len(), 2);
        assert!((poles[0] - c(1.0 / 0.6, 0.0)).norm() < 1e-12);
        assert!((poles[1] - c(2.4, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn root_outside_annulus_gives_no_pole() {
        let p = LaurentPoly::from_real(0, &[-3.0, 1.0]);
        let params = AlgebraParams::new(0.5, p, 0).unwrap();
        assert!(poles_from_p(&params).unwrap().is_empty());
    }

    #[test]
    fn unit_circle_roots_all_count() {
        // (z - i)(z^-1 + i): double root at i
        let p = LaurentPoly::from_roots(c(1.0, 0.0), -1, &[c(0.0, 1.0), c(0.0, 1.0)]);
        let params = AlgebraParams::with_twist(0.5, p, 0, 0).unwrap();
        assert_eq!(poles_from_p(&params).unwrap().len(), 2);
    }

    #[test]
    fn counts_in_both_orientations() {
        let poles = [c(2.4, 0.0), c(1.0 / 0.6, 0.0)];
        let s = solve_constraints(&flagship(1), &poles, Orientation::Published);
        assert_eq!(s.n(), 0);
        assert_eq!(s.alternative.n, 4);
        let s = solve_constraints(&flagship(0), &poles, Orientation::Published);
        assert_eq!(s.n(), 2);
        // prod alpha = prod beta q^{M - N} = prod beta when k = 0
        assert!((s.product_target() - c(4.0, 0.0)).norm() < 1e-12);
        let s = solve_constraints(&flagship(1), &[], Orientation::Published);
        assert!(!s.feasible());
        assert_eq!(s.n(), -2);
        let s = solve_constraints(&flagship(1), &poles, Orientation::Mirrored);
        // prod alpha = q^-l prod beta = q^-N after the gauge
        assert!((s.product_target() - c(16.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gauge_identity_and_rotation() {
        let params = flagship(1);
        let poles = vec![c(2.4, 0.0), c(1.0 / 0.6, 0.0)];
        let a = TraceAnsatz::new(params.clone(), c(1.0, 0.0), vec![], poles.clone()).unwrap();
        let g = gauge_normalize(&a).unwrap();
        assert_eq!(g.gauge_phase, 0.0);
        assert!((g.poles[0] - poles[0]).norm() < 1e-15);

        let phi = 0.7;
        let rp = params.p().scale_arg(Complex64::from_polar(1.0, phi)).unwrap();
        let rparams = params.with_p(rp).unwrap();
        let rpoles: Vec<_> = poles.iter().map(|b| b * Complex64::from_polar(1.0, -phi)).collect();
        let a = TraceAnsatz::new(rparams, c(1.0, 0.0), vec![], rpoles).unwrap();
        let g = gauge_normalize(&a).unwrap();
        assert!((g.gauge_phase + phi).abs() < 1e-12);
        let pb: Complex64 = g.poles.iter().product();
        assert!((pb - c(4.0, 0.0)).norm() < 1e-12);
        assert!(g.params.p().max_abs_diff(params.p()) < 1e-12);
        g.validate().unwrap();
    }

    #[test]
    fn gauge_of_imaginary_poles_with_real_product() {
        // 2.4i * (-1.6667i) = +4 is already real positive; no self-conjugate
        // P has exactly these two roots in the annulus, so skip validation
        let a = TraceAnsatz {
            c: c(1.0, 0.0),
            l_power: 0,
            zeros: vec![],
            poles: vec![c(0.0, 2.4), c(0.0, -1.0 / 0.6)],
            params: flagship(1),
            gauge_phase: 0.0,
        };
        let g = gauge_normalize(&a).unwrap();
        assert_eq!(g.gauge_phase, 0.0);
        assert_eq!(g.poles, a.poles);
    }

    #[test]
    fn gauge_of_single_pole_on_positive_axis() {
        let a = TraceAnsatz {
            c: c(1.0, 0.0),
            l_power: 0,
            zeros: vec![],
            poles: vec![c(2.0, 0.0)],
            params: flagship(1),
            gauge_phase: 0.0,
        };
        assert_eq!(gauge_normalize(&a).unwrap().gauge_phase, 0.0);
    }

    #[test]
    fn gauge_rejects_wrong_modulus() {
        let params = flagship(1);
        let a = TraceAnsatz {
            c: c(1.0, 0.0),
            l_power: 0,
            zeros: vec![],
            poles: vec![c(3.0, 0.0)],
            params,
            gauge_phase: 0.0,
        };
        assert!(matches!(gauge_normalize(&a), Err(Error::GaugeModulus { .. })));
    }

    #[test]
    fn validation_catches_misplaced_pole() {
        let err = TraceAnsatz::new(flagship(1), c(1.0, 0.0), vec![], vec![c(2.5, 0.0)]);
        assert!(matches!(err, Err(Error::InvalidAnsatz(_))));
    }
}
