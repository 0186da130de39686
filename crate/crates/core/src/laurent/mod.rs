//! Laurent polynomials, truncated bilateral series and the kernel theory of
//! multiplication by a Laurent polynomial on `C[[z, z^-1]]`.
//!
//! Coefficients are `Complex64`. A [`LaurentPoly`] is stored in canonical
//! form: entries smaller than `1e-14 * max|coeff|` are dropped, so support
//! queries (`min_exp`, `max_exp`) are stable under round-off.

mod roots;
mod series;

pub use roots::{roots, RootData, DEFAULT_CLUSTER_REL_TOL};
pub use series::{
    division_residual, kernel_basis, left_inverse, right_inverse, solve_division, BilateralSeries,
    Window,
};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative threshold below which coefficients are pruned.
pub const PRUNE_REL: f64 = 1e-14;

/// Anything with a constant term.
pub trait ConstantTerm {
    /// Coefficient of `z^0`.
    fn ct(&self) -> Complex64;
}

/// Finite-support Laurent polynomial with complex coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: Complex64) -> Self {
        Self::from_pairs([(exp, c)])
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_pairs<I: IntoIterator<Item = (i64, Complex64)>>(pairs: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, c) in pairs {
            *coeffs.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self::canonical(coeffs)
    }

    /// Real coefficients, lowest exponent first.
    pub fn from_real(min_exp: i64, coeffs: &[f64]) -> Self {
        Self::from_pairs(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (min_exp + i as i64, Complex64::new(c, 0.0))),
        )
    }

    /// `leading * z^min_exp * prod (z - r)`.
    pub fn from_roots(leading: Complex64, min_exp: i64, roots: &[Complex64]) -> Self {
        let mut p = Self::monomial(min_exp, leading);
        for &r in roots {
            p = &p * &Self::from_pairs([(1, Complex64::new(1.0, 0.0)), (0, -r)]);
        }
        p
    }

    /// `sign * prod (z - r)(1/z - conj(r))`, symmetrized so that it equals its
    /// own `conj_invol` exactly. Roots `r` and `1/conj(r)` for each `r`.
    pub fn self_conjugate(sign: f64, roots: &[Complex64]) -> Self {
        let mut p = Self::constant(Complex64::new(sign, 0.0));
        for &r in roots {
            let f = Self::from_pairs([(1, Complex64::new(1.0, 0.0)), (0, -r)]);
            p = &(&p * &f) * &f.conj_invol();
        }
        (&p + &p.conj_invol()).scale(Complex64::new(0.5, 0.0))
    }

    fn canonical(mut coeffs: BTreeMap<i64, Complex64>) -> Self {
        let max = coeffs.values().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = PRUNE_REL * max;
        coeffs.retain(|_, c| c.norm() > cut && c.norm() > 0.0);
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> Complex64 {
        self.coeffs.get(&exp).copied().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// `max_exp - min_exp`; zero for constants and for the zero polynomial.
    pub fn spread(&self) -> i64 {
        match (self.min_exp(), self.max_exp()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// Largest absolute exponent in the support.
    pub fn max_abs_exp(&self) -> i64 {
        self.coeffs.keys().map(|e| e.abs()).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.iter().map(|(e, c)| c * z.powi(e as i32)).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::canonical(self.coeffs.iter().map(|(&e, &c)| (e, c * s)).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
    }

    /// `p(z) -> p(c z)`: the coefficient of `z^i` is multiplied by `c^i`.
    pub fn scale_arg(&self, c: Complex64) -> Result<Self> {
        if c == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroScale);
        }
        Ok(Self::canonical(
            self.coeffs
                .iter()
                .map(|(&e, &a)| (e, a * c.powi(e as i32)))
                .collect(),
        ))
    }

    /// `p(z) -> conj(p)(1/z)`, i.e. the coefficient of `z^i` becomes the
    /// conjugate of the coefficient of `z^-i`.
    pub fn conj_invol(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (-e, c.conj())).collect(),
        }
    }

    /// `max |p - conj_invol(p)|` relative to `max |p|`.
    pub fn self_conjugacy_defect(&self) -> f64 {
        let d = (self - &self.conj_invol()).max_norm();
        let m = self.max_norm();
        if m == 0.0 {
            0.0
        } else {
            d / m
        }
    }

    /// Nonzero roots with multiplicities; see [`roots`].
    pub fn roots(&self, cluster_tol: Option<f64>) -> Result<RootData> {
        roots(self, cluster_tol)
    }

    /// Largest coefficient difference `max_i |a_i - b_i|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_norm()
    }
}

impl ConstantTerm for LaurentPoly {
    fn ct(&self) -> Complex64 {
        self.coeff(0)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_pairs(self.iter().chain(rhs.iter()))
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_pairs(self.iter().chain(rhs.iter().map(|(e, c)| (e, -c))))
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (ea, ca) in self.iter() {
            for (eb, cb) in rhs.iter() {
                *out.entry(ea + eb).or_default() += ca * cb;
            }
        }
        LaurentPoly::canonical(out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .iter()
            .map(|(e, c)| format!("({}{:+}i)z^{}", c.re, c.im, e))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

// JSON: {"<exp>": [re, im], ...}
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.coeffs.len()))?;
        for (e, c) in self.iter() {
            map.serialize_entry(&e.to_string(), &[c.re, c.im])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, [f64; 2]>::deserialize(d)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (k, [re, im]) in raw {
            let e: i64 = k.trim().parse().map_err(|_| {
                serde::de::Error::custom(format!("exponent key {k:?} is not an integer"))
            })?;
            pairs.push((e, Complex64::new(re, im)));
        }
        Ok(LaurentPoly::from_pairs(pairs))
    }
}
