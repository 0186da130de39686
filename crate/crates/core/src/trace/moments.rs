use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ansatz::TraceAnsatz;
use crate::algebra::{apply_g, AlgebraElement, AlgebraParams};
use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Window};
use crate::linalg;

/// Moments `c_i = T(Z^i)` for `|i| <= W`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    w: i64,
    normalized: bool,
    c: Vec<Complex64>,
}

impl MomentTable {
    pub fn new(w: i64, c: Vec<Complex64>) -> Self {
        assert_eq!(c.len(), (2 * w + 1) as usize, "need 2W + 1 moments");
        Self {
            w,
            normalized: false,
            c,
        }
    }

    pub fn from_fn(w: i64, f: impl Fn(i64) -> Complex64) -> Self {
        Self::new(w, (-w..=w).map(f).collect())
    }

    pub fn window(&self) -> i64 {
        self.w
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `c_i`; zero outside the window.
    pub fn get(&self, i: i64) -> Complex64 {
        if i.abs() <= self.w {
            self.c[(i + self.w) as usize]
        } else {
            Complex64::default()
        }
    }

    pub fn set(&mut self, i: i64, v: Complex64) {
        assert!(i.abs() <= self.w, "index {i} outside window {}", self.w);
        self.c[(i + self.w) as usize] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.c
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        (-self.w..=self.w).zip(self.c.iter().copied())
    }

    /// Divide by `c_0`.
    pub fn normalize(&self) -> Result<Self> {
        let c0 = self.get(0);
        if c0.norm() == 0.0 {
            return Err(Error::Infeasible("c_0 = 0 cannot be normalized".into()));
        }
        Ok(Self {
            w: self.w,
            normalized: true,
            c: self.c.iter().map(|x| x / c0).collect(),
        })
    }

    /// Multiply every moment by `s`; the result is normalized only if
    /// `self` is and `s = 1`.
    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            w: self.w,
            normalized: self.normalized && s == Complex64::new(1.0, 0.0),
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    /// `max_{|i| <= upto} |c_i - other_i|`.
    pub fn max_diff(&self, other: &Self, upto: i64) -> f64 {
        (-upto..=upto)
            .map(|i| (self.get(i) - other.get(i)).norm())
            .fold(0.0, f64::max)
    }

    /// `max |c_{-i} - conj(c_i)|`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        (1..=self.w)
            .map(|i| (self.get(-i) - self.get(i).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|c_i|` with `i != 0` and where it is attained.
    pub fn max_off_center(&self) -> (i64, f64) {
        self.iter()
            .filter(|(i, _)| *i != 0)
            .map(|(i, c)| (i, c.norm()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    pub fn truncate(&self, w: i64) -> Self {
        Self {
            w,
            normalized: self.normalized,
            c: (-w..=w).map(|i| self.get(i)).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MomentTableJson {
    #[serde(rename = "W")]
    w: i64,
    normalized: bool,
    c: BTreeMap<String, [f64; 2]>,
}

impl Serialize for MomentTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        struct Entries<'a>(&'a MomentTable);
        impl Serialize for Entries<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.c.len()))?;
                for (i, c) in self.0.iter() {
                    m.serialize_entry(&i.to_string(), &[c.re, c.im])?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("W", &self.w)?;
        m.serialize_entry("normalized", &self.normalized)?;
        m.serialize_entry("c", &Entries(self))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for MomentTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MomentTableJson::deserialize(d)?;
        if raw.w < 0 {
            return Err(D::Error::custom("W must be nonnegative"));
        }
        let mut c = vec![Complex64::default(); (2 * raw.w + 1) as usize];
        for (k, [re, im]) in raw.c {
            let i: i64 = k
                .parse()
                .map_err(|_| D::Error::custom(format!("moment index {k:?} is not an integer")))?;
            if i.abs() > raw.w {
                return Err(D::Error::custom(format!("moment index {i} outside W = {}", raw.w)));
            }
            c[(i + raw.w) as usize] = Complex64::new(re, im);
        }
        Ok(Self {
            w: raw.w,
            normalized: raw.normalized,
            c,
        })
    }
}

/// `max(4096, 8W)` rounded up to a power of two.
pub fn default_samples(w: i64) -> usize {
    (8 * w.max(0) as usize).max(4096).next_power_of_two()
}

/// Uniform sample points `e^{2 pi i s / S}`.
pub fn circle_points(samples: usize) -> Vec<Complex64> {
    (0..samples)
        .map(|s| Complex64::from_polar(1.0, std::f64::consts::TAU * s as f64 / samples as f64))
        .collect()
}

/// Moments of `w = sum c_i z^-i` from samples on the unit circle:
/// `c_i = (1/S) sum_s w(z_s) z_s^i`.
pub fn fourier_moments(values: &[Complex64], w: i64) -> Result<MomentTable> {
    let s = values.len();
    if !s.is_power_of_two() || (s as i64) < 8 * w {
        return Err(Error::BadSampleCount(s));
    }
    let mut buf = values.to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(s).process(&mut buf);
    // forward transform: X_k = sum_s x_s z_s^-k, so c_i = X_{-i} / S
    let n = s as i64;
    Ok(MomentTable::from_fn(w, |i| buf[(-i).rem_euclid(n) as usize] / s as f64))
}

/// Raw moments of the ansatz.
pub fn moments(ansatz: &TraceAnsatz, w: i64, samples: usize, pole_tol: f64) -> Result<MomentTable> {
    if !samples.is_power_of_two() || (samples as i64) < 8 * w {
        return Err(Error::BadSampleCount(samples));
    }
    check_poles_off_circle(ansatz, 1.0, pole_tol)?;
    let theta = ansatz.theta()?;
    let values: Vec<Complex64> = circle_points(samples)
        .par_iter()
        .map(|&z| ansatz.eval(&theta, z))
        .collect::<Result<_>>()?;
    fourier_moments(&values, w)
}

/// Error if some point of a pole orbit `beta q^{2Z}` lies within `tol` of
/// the circle `|z| = radius`.
pub fn check_poles_off_circle(ansatz: &TraceAnsatz, radius: f64, tol: f64) -> Result<()> {
    let q2 = ansatz.params.q().powi(2);
    for b in &ansatz.poles {
        let n = ((radius / b.norm()).ln() / q2.ln()).round() as i32;
        for k in n - 1..=n + 1 {
            let d = (b.norm() * q2.powi(k) - radius).abs();
            if d <= tol {
                return Err(Error::PoleNearCircle {
                    radius,
                    distance: d,
                });
            }
        }
    }
    Ok(())
}

/// Degree-zero part of `u v Z^j - v Z^j g(u)`: pairing it with the moments
/// gives `T(ab) - T(b g(a))` for `a = u`, `b = v Z^j`.
pub fn trace_condition_row(params: &AlgebraParams, j: i64) -> LaurentPoly {
    let u = AlgebraElement::u();
    let b = AlgebraElement::v().multiply(&AlgebraElement::z_pow(j), params);
    let lhs = u.multiply(&b, params);
    let rhs = b.multiply(&apply_g(&u, params), params);
    lhs.sub(&rhs).degree_zero_part()
}

/// The truncated homogeneous system on `c_{-W..W}` and its null space.
#[derive(Clone, Debug)]
pub struct LinearSystemSolution {
    pub window: i64,
    /// Singular values of the row-normalized system, ascending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    /// Orthonormal basis of the null space, one column per direction.
    pub basis: DMatrix<Complex64>,
    /// Minimum-norm null vector with `c_0 = 1`, if any.
    pub solution: Option<MomentTable>,
}

impl LinearSystemSolution {
    pub fn nullspace_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthogonal projection of `mt` (restricted to this window) onto the
    /// null space.
    pub fn project(&self, mt: &MomentTable) -> MomentTable {
        let x = DVector::from_iterator(
            (2 * self.window + 1) as usize,
            (-self.window..=self.window).map(|i| mt.get(i)),
        );
        let y = &self.basis * (self.basis.adjoint() * &x);
        let mut out = MomentTable::new(self.window, y.iter().copied().collect());
        out.normalized = mt.normalized;
        out
    }

    /// `max_{|i| <= upto} |c_i - (P c)_i|` relative to `max |c_i|`.
    pub fn distance(&self, mt: &MomentTable, upto: i64) -> f64 {
        let p = self.project(mt);
        let scale = mt.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        mt.max_diff(&p, upto) / scale
    }

    /// Largest singular value counted as a null direction and the smallest
    /// one that is not: the spectral gap behind `nullspace_dim`.
    pub fn gap(&self) -> (f64, f64) {
        let d = self.nullspace_dim();
        let below = if d == 0 { 0.0 } else { self.singular_values[d - 1] };
        let above = self.singular_values.get(d).copied().unwrap_or(f64::INFINITY);
        (below, above)
    }
}

/// Moments from the twisted-trace conditions alone: one row per `j` whose
/// condition touches `[-W, W]`, with moments outside the window set to 0.
/// Rows are normalized; singular values below `rel_tol * sigma_max` count as
/// null directions.
pub fn moments_by_linear_system(
    params: &AlgebraParams,
    w: i64,
    rel_tol: f64,
) -> Result<LinearSystemSolution> {
    let p = params.p();
    let (lo, hi) = match (p.min_exp(), p.max_exp()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::ZeroPolynomial),
    };
    let l = params.l();
    let reach = lo.abs().max(hi.abs()) + l.abs() + 1;
    let window = Window::symmetric(w);
    let rows: Vec<Vec<Complex64>> = (-w - reach..=w + reach)
        .into_par_iter()
        .map(|j| {
            let r = trace_condition_row(params, j);
            window.iter().map(|i| r.coeff(i)).collect::<Vec<_>>()
        })
        .collect();
    let rows: Vec<Vec<Complex64>> = rows
        .into_iter()
        .filter_map(|row| {
            let n = row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            (n > 0.0).then(|| row.into_iter().map(|c| c / n).collect())
        })
        .collect();
    let ncol = window.len();
    let a = DMatrix::from_fn(rows.len(), ncol, |r, c| rows[r][c]);
    let (singular_values, basis) = linalg::nullspace(&a, rel_tol);

    let center = w as usize;
    let b0: Vec<Complex64> = (0..basis.ncols()).map(|k| basis[(center, k)]).collect();
    let nb: f64 = b0.iter().map(|x| x.norm_sqr()).sum();
    let solution = (nb > 1e-20).then(|| {
        // minimize |y| subject to b0 . y = 1
        let y: Vec<Complex64> = b0.iter().map(|x| x.conj() / nb).collect();
        let mut mt = MomentTable::from_fn(w, |i| {
            let r = (i + w) as usize;
            (0..basis.ncols()).map(|k| basis[(r, k)] * y[k]).sum()
        });
        mt.normalized = true;
        mt
    });
    Ok(LinearSystemSolution {
        window: w,
        singular_values,
        threshold: rel_tol,
        basis,
        solution,
    })
}

/// `kappa` must stay this far below 1 to count as decay.
pub const DECAY_MARGIN: f64 = 1e-6;

/// Fitted decay of the moment tails: `|c_N| ~ kappa_+^N N^a` and
/// `|c_-N| ~ kappa_-^N N^b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub poly_exp_a: i64,
    pub poly_exp_b: i64,
    /// Root-mean-square residual of the fit in natural-log scale.
    pub fit_residual: f64,
    /// Both `kappa` below `1 - DECAY_MARGIN`.
    pub decaying: bool,
}

/// Least-squares fit of `log|c_N|` against `N` and `log N` over
/// `N in [W/2, W]`, separately for both signs. A tail containing an exact
/// zero reports `kappa = 0`.
pub fn decay_fit(mt: &MomentTable) -> Result<DecayReport> {
    let w = mt.window();
    if w < 16 {
        return Err(Error::WindowTooSmall { have: w, need: 16 });
    }
    let side = |sign: i64| -> (f64, i64, f64) {
        let ns: Vec<i64> = (w / 2..=w).collect();
        let ys: Vec<f64> = ns.iter().map(|&n| mt.get(sign * n).norm().ln()).collect();
        if ys.iter().any(|y| !y.is_finite()) {
            return (0.0, 0, 0.0);
        }
        let a = DMatrix::from_fn(ns.len(), 3, |r, c| match c {
            0 => 1.0,
            1 => ns[r] as f64,
            _ => (ns[r] as f64).ln(),
        });
        let b = DVector::from_vec(ys.clone());
        let sol = a
            .clone()
            .svd(true, true)
            .solve(&b, 1e-12)
            .expect("SVD requested with U and V");
        let res = (&a * &sol - &b).norm() / (ns.len() as f64).sqrt();
        (sol[1].exp(), sol[2].round() as i64, res)
    };
    let (kp, a, rp) = side(1);
    let (km, b, rm) = side(-1);
    Ok(DecayReport {
        kappa_plus: kp,
        kappa_minus: km,
        poly_exp_a: a,
        poly_exp_b: b,
        fit_residual: rp.max(rm),
        decaying: kp < 1.0 - DECAY_MARGIN && km < 1.0 - DECAY_MARGIN,
    })
}
