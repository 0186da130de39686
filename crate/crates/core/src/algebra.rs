//! Normal-ordered arithmetic in the generalized q-Weyl algebra `A(P, q)`.
//!
//! Every element is written as `sum_m L(m) R_m(Z)` where `L(m) = u^m` for
//! `m > 0`, `v^-m` for `m < 0` and `1` for `m = 0`. Products are reduced
//! with the rewrite rules
//!
//! ```text
//! R(Z) L(m) = L(m) R(q^{2m} Z)
//! u v = P(q^-1 Z)        v u = P(q Z)
//! ```
//!
//! This engine is the reference against which every trace computation is
//! checked: nothing here knows about theta functions or moments.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// Parameters of `A(P, q)` together with the twist exponents.
///
/// `k` enters the conjugation `rho(u) = Z^k q^k v`; `l` enters the twist
/// `g(u) = q^l Z^-l u`, `g(v) = q^l Z^l v`. With `rho` in play `l = 2k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraParams {
    q: f64,
    #[serde(rename = "P")]
    p: LaurentPoly,
    k: i64,
    l: i64,
}

/// Roots closer than this (relative) to `|z| = q^{+-1}` are rejected.
const CRITICAL_CIRCLE_TOL: f64 = 1e-9;
/// Allowed defect of `P = conj(P)(1/z)` when the conjugation is used.
pub const SELF_CONJUGACY_TOL: f64 = 1e-12;

impl AlgebraParams {
    /// Parameters for the conjugation with twist integer `k` (so `l = 2k`).
    pub fn new(q: f64, p: LaurentPoly, k: i64) -> Result<Self> {
        Self::with_twist(q, p, k, 2 * k)
    }

    /// General twist exponent `l`, independent of `k`.
    pub fn with_twist(q: f64, p: LaurentPoly, k: i64, l: i64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidQ(q));
        }
        let rd = p.roots(None)?;
        for r in &rd.roots {
            let m = r.location.norm();
            for crit in [q, 1.0 / q] {
                if (m - crit).abs() <= CRITICAL_CIRCLE_TOL * crit {
                    return Err(Error::RootOnCriticalCircle {
                        root: r.location.to_string(),
                        modulus: m,
                    });
                }
            }
        }
        Ok(Self { q, p, k, l })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> &LaurentPoly {
        &self.p
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    /// Same algebra with a different conjugation integer (and `l = 2k`).
    pub fn with_k(&self, k: i64) -> Self {
        Self {
            k,
            l: 2 * k,
            ..self.clone()
        }
    }

    /// Same `q`, `k`, `l` with another polynomial (validated).
    pub fn with_p(&self, p: LaurentPoly) -> Result<Self> {
        Self::with_twist(self.q, p, self.k, self.l)
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.p.self_conjugacy_defect() <= SELF_CONJUGACY_TOL
    }

    pub fn require_self_conjugate(&self) -> Result<()> {
        let d = self.p.self_conjugacy_defect();
        if d <= SELF_CONJUGACY_TOL {
            Ok(())
        } else {
            Err(Error::NotSelfConjugate(d))
        }
    }

    fn qc(&self, e: i64) -> Complex64 {
        Complex64::new(self.q.powi(e as i32), 0.0)
    }

    /// `P(q^s Z)` as a Laurent polynomial.
    pub fn p_scaled(&self, s: i64) -> LaurentPoly {
        self.p.scale_arg(self.qc(s)).expect("q > 0")
    }
}

/// Element of `A(P, q)` in normal form `sum_m L(m) R_m(Z)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    #[serde(with = "term_map")]
    terms: BTreeMap<i64, LaurentPoly>,
}

mod term_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        t: &BTreeMap<i64, LaurentPoly>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        // numeric key order, not string order
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(t.len()))?;
        for (k, v) in t {
            map.serialize_entry(&k.to_string(), v)?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<i64, LaurentPoly>, D::Error> {
        let raw = BTreeMap::<String, LaurentPoly>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, v) in raw {
            let m: i64 = k
                .trim()
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("ladder key {k:?} is not an integer")))?;
            if !v.is_zero() {
                out.insert(m, v);
            }
        }
        Ok(out)
    }
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::laurent(LaurentPoly::one())
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::laurent(LaurentPoly::constant(c))
    }

    /// `L(m) R(Z)`.
    pub fn ladder(m: i64, r: LaurentPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(m, r);
        }
        Self { terms }
    }

    pub fn laurent(r: LaurentPoly) -> Self {
        Self::ladder(0, r)
    }

    pub fn u() -> Self {
        Self::ladder(1, LaurentPoly::one())
    }

    pub fn v() -> Self {
        Self::ladder(-1, LaurentPoly::one())
    }

    /// `Z^n`.
    pub fn z_pow(n: i64) -> Self {
        Self::laurent(LaurentPoly::monomial(n, Complex64::new(1.0, 0.0)))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &LaurentPoly)> {
        self.terms.iter().map(|(&m, r)| (m, r))
    }

    pub fn term(&self, m: i64) -> Option<&LaurentPoly> {
        self.terms.get(&m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|m|` present.
    pub fn ladder_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.abs()).max().unwrap_or(0)
    }

    /// The `m = 0` coefficient: the only part a `Z`-invariant trace sees.
    pub fn degree_zero_part(&self) -> LaurentPoly {
        self.terms.get(&0).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: i64, r: LaurentPoly) {
        let sum = match self.terms.remove(&m) {
            Some(old) => &old + &r,
            None => r,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, r) in other.terms() {
            out.add_term(m, r.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for (m, r) in self.terms() {
            out.add_term(m, r.scale(s));
        }
        out
    }

    /// Normal-ordered product.
    pub fn multiply(&self, other: &Self, params: &AlgebraParams) -> Self {
        let mut out = Self::zero();
        for (a, r) in self.terms() {
            for (b, s) in other.terms() {
                // L(a) R(Z) L(b) S(Z) = L(a) L(b) R(q^{2b} Z) S(Z)
                let (m, f) = ladder_product(a, b, params);
                let shifted = r.scale_arg(params.qc(2 * b)).expect("q > 0");
                out.add_term(m, &(&f * &shifted) * s);
            }
        }
        out
    }

    /// Largest coefficient difference over all terms.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .terms()
            .map(|(_, r)| r.max_norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.terms().map(|(_, r)| r.max_norm()).fold(0.0, f64::max)
    }
}

/// Normal form of `L(a) L(b)` as `L(m) F(Z)`.
fn ladder_product(a: i64, b: i64, params: &AlgebraParams) -> (i64, LaurentPoly) {
    if a == 0 || b == 0 || (a > 0) == (b > 0) {
        return (a + b, LaurentPoly::one());
    }
    // one u-v (or v-u) pair cancels in the middle:
    // L(a) L(b) = L(a -+ 1) [u v | v u] L(b +- 1)
    let (a1, b1, middle) = if a > 0 {
        (a - 1, b + 1, params.p_scaled(-1))
    } else {
        (a + 1, b - 1, params.p_scaled(1))
    };
    let (m, f) = ladder_product(a1, b1, params);
    let moved = middle.scale_arg(params.qc(2 * b1)).expect("q > 0");
    (m, &f * &moved)
}

/// A ladder-graded morphism: fixed images of `u` and `v`, a map on
/// `C[Z, Z^-1]`, and linear or antilinear behaviour on scalars.
pub struct LadderMorphism<'a> {
    params: &'a AlgebraParams,
    u_image: AlgebraElement,
    v_image: AlgebraElement,
    antilinear: bool,
}

/// Which structure map to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureMap {
    G,
    Rho,
}

impl<'a> LadderMorphism<'a> {
    /// `g(Z) = Z`, `g(u) = q^l Z^-l u`, `g(v) = q^l Z^l v`.
    pub fn twist(params: &'a AlgebraParams) -> Self {
        let l = params.l;
        let ql = params.qc(l);
        let zm = AlgebraElement::laurent(LaurentPoly::monomial(-l, ql));
        let zp = AlgebraElement::laurent(LaurentPoly::monomial(l, ql));
        Self {
            params,
            u_image: zm.multiply(&AlgebraElement::u(), params),
            v_image: zp.multiply(&AlgebraElement::v(), params),
            antilinear: false,
        }
    }

    /// `rho(Z) = Z^-1`, `rho(u) = Z^k q^k v`, `rho(v) = Z^-k q^k u`,
    /// antilinear. Only defined for self-conjugate `P`.
    pub fn conjugation(params: &'a AlgebraParams) -> Result<Self> {
        params.require_self_conjugate()?;
        Ok(Self::conjugation_unchecked(params))
    }

    /// The conjugation formulas without the self-conjugacy check; used to
    /// exhibit the failure of the relations for other `P`.
    pub fn conjugation_unchecked(params: &'a AlgebraParams) -> Self {
        let k = params.k;
        let qk = params.qc(k);
        let zp = AlgebraElement::laurent(LaurentPoly::monomial(k, qk));
        let zm = AlgebraElement::laurent(LaurentPoly::monomial(-k, qk));
        Self {
            params,
            u_image: zp.multiply(&AlgebraElement::v(), params),
            v_image: zm.multiply(&AlgebraElement::u(), params),
            antilinear: true,
        }
    }

    pub fn for_map(map: StructureMap, params: &'a AlgebraParams) -> Self {
        match map {
            StructureMap::G => Self::twist(params),
            StructureMap::Rho => Self::conjugation_unchecked(params),
        }
    }

    /// Image of a polynomial in `Z`.
    pub fn map_laurent(&self, r: &LaurentPoly) -> LaurentPoly {
        if self.antilinear {
            r.conj_invol()
        } else {
            r.clone()
        }
    }

    fn ladder_image(&self, m: i64) -> AlgebraElement {
        let base = if m > 0 { &self.u_image } else { &self.v_image };
        let mut out = AlgebraElement::one();
        for _ in 0..m.abs() {
            out = out.multiply(base, self.params);
        }
        out
    }

    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m, r) in a.terms() {
            let img = self
                .ladder_image(m)
                .multiply(&AlgebraElement::laurent(self.map_laurent(r)), self.params);
            out = out.add(&img);
        }
        out
    }
}

/// `g(a)` for the twist with exponent `params.l()`.
pub fn apply_g(a: &AlgebraElement, params: &AlgebraParams) -> AlgebraElement {
    LadderMorphism::twist(params).apply(a)
}

/// `rho(a)`; rejects non-self-conjugate `P`.
pub fn apply_rho(a: &AlgebraElement, params: &AlgebraParams) -> Result<AlgebraElement> {
    Ok(LadderMorphism::conjugation(params)?.apply(a))
}

/// Residual of one defining relation after applying a structure map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationResidual {
    pub relation: String,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationReport {
    pub map: StructureMap,
    pub relations: Vec<RelationResidual>,
    pub max_residual: f64,
}

/// Apply `map` to both sides of every defining relation and report the
/// normal-ordered mismatch.
pub fn check_relations_preserved(map: StructureMap, params: &AlgebraParams) -> RelationReport {
    let phi = LadderMorphism::for_map(map, params);
    let q2 = Complex64::new(params.q * params.q, 0.0);
    let z = AlgebraElement::laurent(phi.map_laurent(&LaurentPoly::monomial(1, 1.0.into())));
    let zinv = AlgebraElement::laurent(phi.map_laurent(&LaurentPoly::monomial(-1, 1.0.into())));
    let u = phi.apply(&AlgebraElement::u());
    let v = phi.apply(&AlgebraElement::v());
    let mul = |a: &AlgebraElement, b: &AlgebraElement| a.multiply(b, params);

    let cases = [
        (
            "Z u Z^-1 = q^2 u",
            mul(&mul(&z, &u), &zinv),
            u.scale(q2),
        ),
        (
            "Z v Z^-1 = q^-2 v",
            mul(&mul(&z, &v), &zinv),
            v.scale(q2.inv()),
        ),
        (
            "u v = P(q^-1 Z)",
            mul(&u, &v),
            AlgebraElement::laurent(phi.map_laurent(&params.p_scaled(-1))),
        ),
        (
            "v u = P(q Z)",
            mul(&v, &u),
            AlgebraElement::laurent(phi.map_laurent(&params.p_scaled(1))),
        ),
    ];
    let relations: Vec<RelationResidual> = cases
        .into_iter()
        .map(|(name, lhs, rhs)| RelationResidual {
            relation: name.to_string(),
            residual: lhs.max_abs_diff(&rhs),
        })
        .collect();
    let max_residual = relations.iter().map(|r| r.residual).fold(0.0, f64::max);
    RelationReport {
        map,
        relations,
        max_residual,
    }
}
