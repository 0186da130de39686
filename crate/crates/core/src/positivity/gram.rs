use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgebraElement, AlgebraParams, LadderMorphism};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg;
use crate::trace::{pair, trace_of, MomentTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GramBasis {
    /// `Z^i`, `|i| <= m`.
    #[serde(rename = "laurent")]
    Laurent,
    /// `u Z^i`, `|i| <= m`.
    #[serde(rename = "u-sector")]
    USector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GramVerdict {
    Positive,
    NotPositive,
    /// Smallest eigenvalue within the tolerance of zero.
    Inconclusive,
}

/// Positive-definiteness test of `H_ij = T(e_i rho(e_j))`.
///
/// The matrix is first scaled to unit diagonal, so `min_eigenvalue` and the
/// tolerance refer to `D^-1/2 H D^-1/2`; `raw_min_eigenvalue` is that of
/// `H` itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramReport {
    pub basis: GramBasis,
    pub m: i64,
    pub dim: usize,
    pub min_eigenvalue: f64,
    pub raw_min_eigenvalue: f64,
    pub cholesky_min_pivot: f64,
    pub positive_definite: bool,
    pub verdict: GramVerdict,
    pub tolerance: f64,
    pub hermitian_defect: f64,
    /// Largest mismatch (relative to `max |H|`) against the closed form,
    /// u-sector only.
    pub closed_form_max_diff: Option<f64>,
}

/// Classify a Hermitian matrix.
pub fn assess(h: &DMatrix<Complex64>, basis: GramBasis, m: i64, tol: f64) -> GramReport {
    let raw_min = linalg::min_eigenvalue(h);
    let (min_eig, pivot, verdict) = match linalg::unit_diagonal_scaling(h) {
        None => (raw_min, f64::NAN, GramVerdict::NotPositive),
        Some(hs) => {
            let lam = linalg::min_eigenvalue(&hs);
            let chol = linalg::pivoted_cholesky(&hs, tol);
            let v = if lam > tol && chol.positive_definite {
                GramVerdict::Positive
            } else if lam < -tol {
                GramVerdict::NotPositive
            } else {
                GramVerdict::Inconclusive
            };
            (lam, chol.min_pivot, v)
        }
    };
    GramReport {
        basis,
        m,
        dim: h.nrows(),
        min_eigenvalue: min_eig,
        raw_min_eigenvalue: raw_min,
        cholesky_min_pivot: pivot,
        positive_definite: verdict == GramVerdict::Positive,
        verdict,
        tolerance: tol,
        hermitian_defect: linalg::hermitian_defect(h),
        closed_form_max_diff: None,
    }
}

/// `G_ij = c_{i-j}` for `i, j in [-m, m]`.
pub fn laurent_gram_matrix(mt: &MomentTable, m: i64) -> Result<DMatrix<Complex64>> {
    if mt.window() < 2 * m {
        return Err(Error::WindowTooSmall {
            have: mt.window(),
            need: 2 * m,
        });
    }
    let d = (2 * m + 1) as usize;
    Ok(DMatrix::from_fn(d, d, |i, j| mt.get(i as i64 - j as i64)))
}

pub fn gram_laurent(mt: &MomentTable, m: i64, tol: f64) -> Result<GramReport> {
    Ok(assess(&laurent_gram_matrix(mt, m)?, GramBasis::Laurent, m, tol))
}

fn u_basis(i: i64) -> AlgebraElement {
    AlgebraElement::ladder(1, LaurentPoly::monomial(i, Complex64::new(1.0, 0.0)))
}

/// `H_ij = T(u Z^i rho(u Z^j))`, computed by the algebra engine.
pub fn u_sector_gram_matrix(
    mt: &MomentTable,
    params: &AlgebraParams,
    m: i64,
) -> Result<DMatrix<Complex64>> {
    let rho = LadderMorphism::conjugation(params)?;
    let need = 2 * m + params.p().max_abs_exp() + params.k().abs();
    if mt.window() < need {
        return Err(Error::WindowTooSmall {
            have: mt.window(),
            need,
        });
    }
    let d = (2 * m + 1) as usize;
    let images: Vec<AlgebraElement> = (-m..=m).map(|j| rho.apply(&u_basis(j))).collect();
    let entries: Vec<Complex64> = (0..d * d)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / d, idx % d);
            trace_of(&u_basis(i as i64 - m).multiply(&images[j], params), mt)
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(d, d, |i, j| entries[i * d + j]))
}

/// Hand-derived entry `q^{-k-2i} T(P(q^-1 Z) Z^{i-j+k})`.
pub fn u_sector_closed_form(
    mt: &MomentTable,
    params: &AlgebraParams,
    i: i64,
    j: i64,
) -> Result<Complex64> {
    let k = params.k();
    let r = params.p_scaled(-1).shift(i - j + k);
    Ok(pair(&r, mt)? * params.q().powi((-k - 2 * i) as i32))
}

pub fn gram_u_sector(
    mt: &MomentTable,
    params: &AlgebraParams,
    m: i64,
    tol: f64,
) -> Result<GramReport> {
    let h = u_sector_gram_matrix(mt, params, m)?;
    let scale = h.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut diff: f64 = 0.0;
    for i in -m..=m {
        for j in -m..=m {
            let cf = u_sector_closed_form(mt, params, i, j)?;
            diff = diff.max((cf - h[((i + m) as usize, (j + m) as usize)]).norm());
        }
    }
    let mut rep = assess(&h, GramBasis::USector, m, tol);
    rep.closed_form_max_diff = Some(diff / scale);
    Ok(rep)
}
