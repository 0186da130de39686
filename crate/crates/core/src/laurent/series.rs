use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ConstantTerm, LaurentPoly, RootData};
use crate::error::{Error, Result};

/// Inclusive exponent range `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty window [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// `[-w, w]`.
    pub fn symmetric(w: i64) -> Self {
        Self::new(-w, w)
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn intersect(&self, other: &Window) -> Option<Window> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Window { lo, hi })
    }

    /// Exponents of `s * p` that are unaffected by truncating `s` to this
    /// window: `[lo + max_exp(p), hi + min_exp(p)]`, clipped to the window.
    pub fn interior_for(&self, p: &LaurentPoly) -> Option<Window> {
        let (a, b) = (p.min_exp().unwrap_or(0), p.max_exp().unwrap_or(0));
        let lo = (self.lo + b).max(self.lo);
        let hi = (self.hi + a).min(self.hi);
        (lo <= hi).then_some(Window { lo, hi })
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A two-sided series `sum a_i z^i` truncated to a window.
#[derive(Clone, Debug, PartialEq)]
pub struct BilateralSeries {
    window: Window,
    coeffs: Vec<Complex64>,
    note: String,
}

impl BilateralSeries {
    pub fn new(window: Window, coeffs: Vec<Complex64>, note: impl Into<String>) -> Self {
        assert_eq!(coeffs.len(), window.len(), "coefficient count must match window");
        Self {
            window,
            coeffs,
            note: note.into(),
        }
    }

    pub fn zeros(window: Window) -> Self {
        Self::new(window, vec![Complex64::default(); window.len()], "zero")
    }

    pub fn from_fn(
        window: Window,
        note: impl Into<String>,
        f: impl Fn(i64) -> Complex64,
    ) -> Self {
        Self::new(window, window.iter().map(f).collect(), note)
    }

    pub fn from_poly(p: &LaurentPoly, window: Window) -> Self {
        Self::from_fn(window, "polynomial", |i| p.coeff(i))
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn note(&self) -> &str {
        &self.note
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^i`; zero outside the window.
    pub fn coeff(&self, i: i64) -> Complex64 {
        if self.window.contains(i) {
            self.coeffs[(i - self.window.lo) as usize]
        } else {
            Complex64::default()
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_norm_on(&self, w: Window) -> f64 {
        w.iter().map(|i| self.coeff(i).norm()).fold(0.0, f64::max)
    }

    /// `s(z) -> s(c z)`.
    pub fn scale_arg(&self, c: Complex64) -> Result<Self> {
        if c == Complex64::default() {
            return Err(Error::ZeroScale);
        }
        Ok(Self::from_fn(self.window, self.note.clone(), |i| {
            self.coeff(i) * c.powi(i as i32)
        }))
    }

    /// Product with a polynomial, computed on the same window with the
    /// series taken as zero outside it. Only [`Window::interior_for`] is exact.
    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        let note = format!("({}) * poly", self.note);
        Self::from_fn(self.window, note, |i| {
            p.iter().map(|(m, c)| c * self.coeff(i - m)).sum()
        })
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Option<Self> {
        let w = self.window.intersect(&other.window)?;
        let note = format!("({}) {op} ({}) on {w}", self.note, other.note);
        Some(Self::from_fn(w, note, |i| f(self.coeff(i), other.coeff(i))))
    }

    /// Sum on the intersection window; `None` if the windows are disjoint.
    pub fn add(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, "+", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, "-", |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(self.window, self.note.clone(), |i| self.coeff(i) * s)
    }
}

impl ConstantTerm for BilateralSeries {
    fn ct(&self) -> Complex64 {
        self.coeff(0)
    }
}

/// Coefficients of the inverse of `p` in `C((z))` for exponents
/// `-min_exp(p) ..= upto`. Returns `(first_exponent, coefficients)`.
fn right_inverse_coeffs(p: &LaurentPoly, upto: i64) -> Result<(i64, Vec<Complex64>)> {
    let a = p.min_exp().ok_or(Error::ZeroPolynomial)?;
    let b0 = p.coeff(a);
    let n = p.spread();
    let start = -a;
    let count = (upto - start + 1).max(0) as usize;
    let mut d = Vec::with_capacity(count);
    for j in 0..count as i64 {
        let mut acc = if j == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::default()
        };
        for k in 1..=j.min(n) {
            acc -= p.coeff(a + k) * d[(j - k) as usize];
        }
        d.push(acc / b0);
    }
    Ok((start, d))
}

fn reflect(p: &LaurentPoly) -> LaurentPoly {
    LaurentPoly::from_pairs(p.iter().map(|(e, c)| (-e, c)))
}

/// Inverse of `p` in `C((z))` (support bounded below), truncated to `window`.
pub fn right_inverse(p: &LaurentPoly, window: Window) -> Result<BilateralSeries> {
    let (start, d) = right_inverse_coeffs(p, window.hi)?;
    Ok(BilateralSeries::from_fn(window, "right inverse", |i| {
        if i < start {
            Complex64::default()
        } else {
            d[(i - start) as usize]
        }
    }))
}

/// Inverse of `p` in `C((z^-1))` (support bounded above), truncated to `window`.
pub fn left_inverse(p: &LaurentPoly, window: Window) -> Result<BilateralSeries> {
    let (start, d) = right_inverse_coeffs(&reflect(p), -window.lo)?;
    Ok(BilateralSeries::from_fn(window, "left inverse", |i| {
        let j = -i;
        if j < start {
            Complex64::default()
        } else {
            d[(j - start) as usize]
        }
    }))
}

/// `l (l-1) ... (l-i+1)`; one for `i = 0`.
fn falling(l: i64, i: usize) -> f64 {
    (0..i as i64).map(|t| (l - t) as f64).product()
}

/// Basis of the kernel of `w -> w P` on two-sided series: for every distinct
/// root `a` of multiplicity `m`, the series `sum_l l^(i) a^-l z^l` for
/// `i = 0..m`, where `l^(i)` is the falling factorial.
pub fn kernel_basis(rd: &RootData, window: Window) -> Result<Vec<BilateralSeries>> {
    let mut out = Vec::with_capacity(rd.n());
    for (j, root) in rd.roots.iter().enumerate() {
        if root.location.norm() == 0.0 {
            return Err(Error::RootAtOrigin);
        }
        let inv = root.location.inv();
        for i in 0..root.multiplicity {
            out.push(BilateralSeries::from_fn(
                window,
                format!("kernel f[{i},{j}]"),
                |l| inv.powi(l as i32) * falling(l, i),
            ));
        }
    }
    Ok(out)
}

/// A preimage of `target` under multiplication by `p`:
/// `w+ * P_r^-1 + w- * P_l^-1`, where `w+` holds the exponents `>= 0` of the
/// target and `w-` the rest. The result lives on the target's window.
pub fn solve_division(target: &BilateralSeries, p: &LaurentPoly) -> Result<BilateralSeries> {
    let w = target.window();
    let (rstart, rd) = right_inverse_coeffs(p, w.hi)?;
    let (lstart, ld) = right_inverse_coeffs(&reflect(p), -w.lo)?;
    let right = |e: i64| -> Complex64 {
        if e < rstart {
            Complex64::default()
        } else {
            rd[(e - rstart) as usize]
        }
    };
    let left = |e: i64| -> Complex64 {
        let j = -e;
        if j < lstart {
            Complex64::default()
        } else {
            ld[(j - lstart) as usize]
        }
    };
    Ok(BilateralSeries::from_fn(w, "solve_division", |j| {
        let plus: Complex64 = (0.max(w.lo)..=w.hi)
            .filter(|&i| j - i >= rstart)
            .map(|i| target.coeff(i) * right(j - i))
            .sum();
        let minus: Complex64 = (w.lo..=(-1).min(w.hi))
            .filter(|&i| -(j - i) >= lstart)
            .map(|i| target.coeff(i) * left(j - i))
            .sum();
        plus + minus
    }))
}

/// `max |(s p - target)_i|` over the exact interior of `s`'s window.
pub fn division_residual(s: &BilateralSeries, p: &LaurentPoly, target: &BilateralSeries) -> f64 {
    let prod = s.mul_poly(p);
    match s.window().interior_for(p) {
        Some(inner) => inner
            .iter()
            .map(|i| (prod.coeff(i) - target.coeff(i)).norm())
            .fold(0.0, f64::max),
        None => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::roots;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn right_inverse_geometric() {
        let p = LaurentPoly::from_real(0, &[-2.0, 1.0]);
        let s = right_inverse(&p, Window::new(0, 32)).unwrap();
        for i in 0..=32 {
            let expect = -0.5 * 0.5f64.powi(i as i32);
            assert!((s.coeff(i) - c(expect)).norm() < 1e-15);
        }
        let prod = s.mul_poly(&p);
        assert!((prod.ct() - c(1.0)).norm() < 1e-10);
    }

    #[test]
    fn left_inverse_geometric() {
        let p = LaurentPoly::from_real(0, &[-2.0, 1.0]);
        let s = left_inverse(&p, Window::new(-32, 0)).unwrap();
        assert_eq!(s.coeff(0), c(0.0));
        for k in 1..=32i64 {
            let expect = 2.0f64.powi(k as i32 - 1);
            assert!((s.coeff(-k) - c(expect)).norm() < 1e-15 * expect);
        }
    }

    #[test]
    fn inverse_of_one_is_one() {
        let one = LaurentPoly::one();
        let w = Window::new(-4, 4);
        for s in [right_inverse(&one, w).unwrap(), left_inverse(&one, w).unwrap()] {
            for i in w.iter() {
                assert_eq!(s.coeff(i), if i == 0 { c(1.0) } else { c(0.0) });
            }
        }
    }

    #[test]
    fn kernel_of_linear_factor() {
        let p = LaurentPoly::from_real(0, &[-2.0, 1.0]);
        let rd = roots(&p, None).unwrap();
        let w = Window::symmetric(40);
        let basis = kernel_basis(&rd, w).unwrap();
        assert_eq!(basis.len(), 1);
        for l in w.iter() {
            let expect = 2.0f64.powi(-l as i32);
            assert!((basis[0].coeff(l) - c(expect)).norm() < 1e-12 * expect);
        }
    }

    #[test]
    fn kernel_of_quadratic() {
        // (z - 2)(z - 3)/z
        let p = LaurentPoly::from_real(-1, &[6.0, -5.0, 1.0]);
        let rd = roots(&p, None).unwrap();
        let w = Window::symmetric(64);
        let basis = kernel_basis(&rd, w).unwrap();
        assert_eq!(basis.len(), 2);
        for f in &basis {
            let res = division_residual(f, &p, &BilateralSeries::zeros(w));
            assert!(res <= 1e-10 * f.max_norm(), "{res}");
        }
    }

    #[test]
    fn kernel_with_multiplicity() {
        // (z - 1.5)^3 z^-2
        let p = LaurentPoly::from_roots(c(1.0), -2, &[c(1.5), c(1.5), c(1.5)]);
        let rd = roots(&p, Some(1e-3)).unwrap();
        assert_eq!(rd.roots.len(), 1);
        let w = Window::symmetric(64);
        let basis = kernel_basis(&rd, w).unwrap();
        assert_eq!(basis.len(), 3);
        for f in &basis {
            let res = division_residual(f, &p, &BilateralSeries::zeros(w));
            assert!(res <= 1e-9 * f.max_norm(), "{res}");
        }
    }

    #[test]
    fn division_of_p_by_itself() {
        let p = LaurentPoly::from_real(-1, &[1.0, -2.0333, 1.0]);
        let w = Window::symmetric(16);
        let target = BilateralSeries::from_poly(&p, w);
        let s = solve_division(&target, &p).unwrap();
        assert!(division_residual(&s, &p, &target) < 1e-10);
    }

    #[test]
    fn division_of_zero() {
        let p = LaurentPoly::from_real(0, &[-2.0, 1.0]);
        let w = Window::symmetric(16);
        let s = solve_division(&BilateralSeries::zeros(w), &p).unwrap();
        assert_eq!(s.max_norm(), 0.0);
    }

    #[test]
    fn two_series_use_intersection() {
        let a = BilateralSeries::from_fn(Window::new(-3, 5), "a", |i| c(i as f64));
        let b = BilateralSeries::from_fn(Window::new(-5, 2), "b", |_| c(1.0));
        let s = a.add(&b).unwrap();
        assert_eq!(s.window(), Window::new(-3, 2));
        assert!(s.note().contains("[-3, 2]"));
        assert_eq!(s.coeff(2), c(3.0));
        assert!(a.add(&BilateralSeries::zeros(Window::new(10, 12))).is_none());
    }
}
