use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LaurentPoly;
use crate::error::{Error, Result};
use crate::json::complex_pair;

/// Default clustering radius, relative to the largest root modulus.
pub const DEFAULT_CLUSTER_REL_TOL: f64 = 1e-7;

/// A distinct root and its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    #[serde(with = "complex_pair")]
    pub location: Complex64,
    pub multiplicity: usize,
}

/// Factored form `leading_coeff * z^leading_exponent * prod (z - r)^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootData {
    pub roots: Vec<Root>,
    pub leading_exponent: i64,
    #[serde(with = "complex_pair")]
    pub leading_coeff: Complex64,
}

impl RootData {
    /// Number of nonzero roots counted with multiplicity.
    pub fn n(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.location, r.multiplicity))
            .collect()
    }

    /// Evaluate the product form.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.roots.iter().fold(
            self.leading_coeff * z.powi(self.leading_exponent as i32),
            |acc, r| acc * (z - r.location).powi(r.multiplicity as i32),
        )
    }

    /// Worst relative mismatch between the product form and `p` at `points`
    /// equally spaced points of the unit circle (rotated off the real axis).
    pub fn reconstruction_error(&self, p: &LaurentPoly, points: usize) -> f64 {
        (0..points)
            .map(|j| {
                let phi = 0.37 + std::f64::consts::TAU * j as f64 / points as f64;
                let z = Complex64::from_polar(1.0, phi);
                let exact = p.eval(z);
                (self.eval(z) - exact).norm() / exact.norm().max(p.max_norm() * 1e-3)
            })
            .fold(0.0, f64::max)
    }
}

/// Nonzero roots of `p`, from the ordinary polynomial `z^(-min_exp) p(z)`.
///
/// Eigenvalues of the balanced companion matrix, Newton-polished when
/// isolated, then clustered: roots closer than `cluster_tol` (default
/// `1e-7 * max|root|`) merge into one root whose multiplicity is the
/// cluster size.
pub fn roots(p: &LaurentPoly, cluster_tol: Option<f64>) -> Result<RootData> {
    let (lo, hi) = match (p.min_exp(), p.max_exp()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::ZeroPolynomial),
    };
    let leading = p.coeff(hi);
    let n = (hi - lo) as usize;
    // ordinary coefficients, ascending, a[n] = leading
    let a: Vec<Complex64> = (lo..=hi).map(|e| p.coeff(e)).collect();
    if n == 0 {
        return Ok(RootData {
            roots: vec![],
            leading_exponent: lo,
            leading_coeff: leading,
        });
    }

    let raw = companion_eigenvalues(&a);

    let max_mod = raw.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let tol = cluster_tol.unwrap_or(DEFAULT_CLUSTER_REL_TOL * max_mod);
    let clusters = cluster(&raw, tol);

    let roots = clusters
        .into_iter()
        .map(|members| {
            let sum: Complex64 = members.iter().map(|&i| raw[i]).sum();
            let mult = members.len();
            let loc = if mult == 1 {
                polish(&a, raw[members[0]])
            } else {
                sum / mult as f64
            };
            Root {
                location: loc,
                multiplicity: mult,
            }
        })
        .collect();

    Ok(RootData {
        roots,
        leading_exponent: lo,
        leading_coeff: leading,
    })
}

fn horner(a: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &c in a.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

fn polish(a: &[Complex64], mut z: Complex64) -> Complex64 {
    let (mut f, _) = horner(a, z);
    for _ in 0..8 {
        let (_, d) = horner(a, z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - f / d;
        let (fc, _) = horner(a, cand);
        if fc.norm() < f.norm() {
            z = cand;
            f = fc;
        } else {
            break;
        }
    }
    z
}

fn companion_eigenvalues(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let lead = a[n];
    if n == 1 {
        return vec![-a[0] / lead];
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -a[n - 1 - j] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    balance(&mut m);
    m.schur()
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .copied()
        .collect()
}

/// Parlett-Reinsch diagonal balancing with powers of two.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, mut r2) = (c, r);
            while c2 < r2 / radix {
                c2 *= radix;
                r2 /= radix;
                f *= radix;
            }
            while c2 >= r2 * radix {
                c2 /= radix;
                r2 *= radix;
                f /= radix;
            }
            if (c2 + r2) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Single-linkage clusters of indices.
fn cluster(points: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut rep: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut label, i);
        match rep[r] {
            Some(g) => groups[g].push(i),
            None => {
                rep[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sorted_mods(rd: &RootData) -> Vec<f64> {
        let mut v: Vec<f64> = rd.roots.iter().map(|r| r.location.norm()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn reciprocal_pair() {
        let s = 1.2 + 1.0 / 1.2;
        let p = LaurentPoly::from_real(-1, &[1.0, -s, 1.0]);
        let rd = roots(&p, None).unwrap();
        assert_eq!(rd.n(), 2);
        let m = sorted_mods(&rd);
        // quadratic formula on z^2 - s z + 1
        let disc = (s * s - 4.0).sqrt();
        assert!((m[0] - (s - disc) / 2.0).abs() < 1e-14);
        assert!((m[1] - (s + disc) / 2.0).abs() < 1e-14);
        assert!(rd.roots.iter().all(|r| r.multiplicity == 1));
        assert!(rd.reconstruction_error(&p, 16) < 1e-8);
    }

    #[test]
    fn linear() {
        let p = LaurentPoly::from_real(0, &[-2.0, 1.0]);
        let rd = roots(&p, None).unwrap();
        assert_eq!(rd.roots.len(), 1);
        assert!((rd.roots[0].location - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn double_root_clusters() {
        // (z - 2)^2 / z
        let p = LaurentPoly::from_real(-1, &[4.0, -4.0, 1.0]);
        let rd = roots(&p, Some(1e-6)).unwrap();
        assert_eq!(rd.roots.len(), 1);
        assert_eq!(rd.roots[0].multiplicity, 2);
        assert!((rd.roots[0].location - c(2.0)).norm() < 1e-10);
        assert!(rd.reconstruction_error(&p, 16) < 1e-8);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(roots(&LaurentPoly::zero(), None), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn constants_have_no_roots() {
        let rd = roots(&LaurentPoly::monomial(3, c(2.0)), None).unwrap();
        assert_eq!(rd.n(), 0);
        assert_eq!(rd.leading_exponent, 3);
    }

    #[test]
    fn wide_spread_complex_roots() {
        let rs = [
            Complex64::new(0.3, 0.1),
            Complex64::new(-1.5, 0.7),
            Complex64::new(4.0, -2.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-0.8, -0.8),
        ];
        let p = LaurentPoly::from_roots(Complex64::new(0.5, 2.0), -2, &rs);
        let rd = roots(&p, None).unwrap();
        assert_eq!(rd.n(), 5);
        for r in rs {
            let best = rd
                .roots
                .iter()
                .map(|x| (x.location - r).norm())
                .fold(f64::MAX, f64::min);
            assert!(best < 1e-12, "{r} missing");
        }
        assert!(rd.reconstruction_error(&p, 16) < 1e-8);
    }
}
