//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Outcome of a diagonally pivoted Cholesky factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotedCholesky {
    /// All pivots exceeded the tolerance.
    pub positive_definite: bool,
    /// Smallest pivot reached (negative or tiny when the test fails).
    pub min_pivot: f64,
    /// Number of pivots that exceeded the tolerance.
    pub rank: usize,
}

/// Pivoted Cholesky on the Hermitian part of `h`, stopping at the first
/// pivot `<= tol`.
pub fn pivoted_cholesky(h: &DMatrix<Complex64>, tol: f64) -> PivotedCholesky {
    let n = h.nrows();
    let mut a = hermitian_part(h);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        // largest remaining diagonal entry
        let (p, &best) = perm[k..]
            .iter()
            .enumerate()
            .map(|(i, &j)| (i + k, &a[(j, j)].re))
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .expect("nonempty");
        perm.swap(k, p);
        min_pivot = min_pivot.min(best);
        if best <= tol {
            return PivotedCholesky {
                positive_definite: false,
                min_pivot: best,
                rank: k,
            };
        }
        let pk = perm[k];
        let d = best.sqrt();
        for &i in &perm[k + 1..] {
            a[(i, pk)] /= d;
        }
        for (ii, &i) in perm[k + 1..].iter().enumerate() {
            for &j in &perm[k + 1..k + 2 + ii] {
                let upd = a[(i, pk)] * a[(j, pk)].conj();
                a[(i, j)] -= upd;
                a[(j, i)] = a[(i, j)].conj();
            }
        }
    }
    PivotedCholesky {
        positive_definite: true,
        min_pivot,
        rank: n,
    }
}

pub fn hermitian_part(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (h + h.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `max |h - h^*|` relative to `max |h|`.
pub fn hermitian_defect(h: &DMatrix<Complex64>) -> f64 {
    let scale = h.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    (h - h.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max) / scale
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(h: &DMatrix<Complex64>) -> f64 {
    if h.nrows() == 0 {
        return f64::INFINITY;
    }
    hermitian_part(h)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `D^-1/2 h D^-1/2` with `D = diag(h)`; `None` if some diagonal entry is
/// not strictly positive.
pub fn unit_diagonal_scaling(h: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let n = h.nrows();
    let d: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    if d.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return None;
    }
    let s: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    Some(DMatrix::from_fn(n, n, |i, j| h[(i, j)] * (s[i] * s[j])))
}

/// Singular values (ascending) and an orthonormal basis (columns) of the
/// approximate null space `{x : sigma < rel_tol * sigma_max}`.
pub fn nullspace(a: &DMatrix<Complex64>, rel_tol: f64) -> (Vec<f64>, DMatrix<Complex64>) {
    let (m, n) = a.shape();
    let padded;
    let a = if m < n {
        padded = a.clone().resize_vertically(n, Complex64::default());
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&i, &j| sv[i].partial_cmp(&sv[j]).unwrap());
    let null: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|&i| sv[i] < rel_tol * smax)
        .collect();
    let basis = DMatrix::from_fn(n, null.len(), |r, c| vt[(null[c], r)].conj());
    (idx.iter().map(|&i| sv[i]).collect(), basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, v: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(n, n, &v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn cholesky_identity_and_indefinite() {
        let id = DMatrix::<Complex64>::identity(4, 4);
        let r = pivoted_cholesky(&id, 1e-12);
        assert!(r.positive_definite);
        assert_eq!(r.rank, 4);
        let ind = real(3, &[1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        assert!(!pivoted_cholesky(&ind, 1e-12).positive_definite);
        assert!((min_eigenvalue(&ind) - (1.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn cholesky_agrees_with_eigenvalues_on_hermitian() {
        let h = DMatrix::from_fn(5, 5, |i, j| {
            let d = i as i64 - j as i64;
            Complex64::new(0.6f64.powi(d.abs() as i32), 0.1 * d as f64)
        });
        let pd = min_eigenvalue(&h) > 0.0;
        assert_eq!(pivoted_cholesky(&h, 1e-12).positive_definite, pd);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = real(3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 3.0, 6.0, 9.0]);
        let (sv, basis) = nullspace(&a, 1e-10);
        assert_eq!(basis.ncols(), 2);
        assert!(sv[0] < 1e-12);
        assert!((&a * &basis).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn wide_matrix_padding() {
        let a = DMatrix::from_row_slice(1, 3, &[Complex64::new(1.0, 0.0); 3]);
        let (_, basis) = nullspace(&a, 1e-10);
        assert_eq!(basis.ncols(), 2);
    }
}
