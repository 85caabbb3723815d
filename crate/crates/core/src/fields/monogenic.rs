//! Homogeneous left monogenic polynomials (`DP = 0`) of low degree.
//!
//! `P = sum_alpha x^alpha c_alpha` is monogenic iff the linear map
//! `c -> coefficients of DP` vanishes. That map is assembled on the
//! monomial-times-blade basis and a random coefficient vector is projected
//! onto its null space.

use alloc::vec;
use alloc::vec::Vec;

use super::poly::{monomials_of_degree, Polynomial};
use super::CliffordField;
use crate::algebra::{check_dim, product_sign};
use crate::{Error, Result};

const MAX_UNKNOWNS: usize = 4096;

#[derive(Clone, Debug)]
pub struct MonogenicPolynomial {
    degree: usize,
    poly: Polynomial,
}

/// Dense row-major matrix of `c -> DP` from degree `d` to degree `d - 1`.
///
/// Columns are indexed `alpha * 2^n + A`, rows `beta * 2^n + C`, with
/// monomials ordered as in [`monomials_of_degree`].
pub fn dirac_constraint_matrix(n: usize, d: usize) -> (usize, usize, Vec<f64>) {
    let w = 1usize << n;
    let cols_m = monomials_of_degree(n, d);
    let cols = cols_m.len() * w;
    if d == 0 {
        return (0, cols, Vec::new());
    }
    let rows_m = monomials_of_degree(n, d - 1);
    let rows = rows_m.len() * w;
    let mut m = vec![0.0; rows * cols];
    for (ia, alpha) in cols_m.iter().enumerate() {
        for j in 0..n {
            if alpha[j] == 0 {
                continue;
            }
            let mut beta = alpha.clone();
            beta[j] -= 1;
            let ib = rows_m.iter().position(|b| *b == beta).expect("lower monomial exists");
            let g = 1u16 << j;
            for a in 0..w {
                let c = (g ^ a as u16) as usize;
                let row = ib * w + c;
                let col = ia * w + a;
                m[row * cols + col] += alpha[j] as f64 * product_sign(g, a as u16);
            }
        }
    }
    (rows, cols, m)
}

/// Orthonormal basis of the row space (modified Gram-Schmidt, applied twice).
fn row_space_basis(rows: usize, cols: usize, m: &[f64]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in 0..rows {
        let mut v = m[r * cols..(r + 1) * cols].to_vec();
        let n0 = libm::sqrt(v.iter().map(|x| x * x).sum());
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let p: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let nv = libm::sqrt(v.iter().map(|x| x * x).sum());
        if nv > 1e-10 * n0 {
            for vi in &mut v {
                *vi /= nv;
            }
            basis.push(v);
        }
    }
    basis
}

/// Random homogeneous monogenic polynomial of degree `d <= 2`, coefficient
/// vector normalized to unit Euclidean norm.
pub fn gen_monogenic_poly<R: rand::Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<MonogenicPolynomial> {
    check_dim(n)?;
    if d > 2 {
        return Err(Error::Parameter(alloc::format!(
            "monogenic degree must be 0, 1 or 2, got {d}"
        )));
    }
    let cols = monomials_of_degree(n, d).len() << n;
    if cols > MAX_UNKNOWNS {
        return Err(Error::Config(alloc::format!(
            "degree {d} monogenic generation in dimension {n} needs {cols} unknowns (limit {MAX_UNKNOWNS})"
        )));
    }
    let (rows, _, m) = dirac_constraint_matrix(n, d);
    let basis = row_space_basis(rows, cols, &m);
    if basis.len() >= cols {
        return Err(Error::Internal("trivial null space".into()));
    }
    let mut c: Vec<f64> = (0..cols).map(|_| crate::rng::normal(rng)).collect();
    for _ in 0..2 {
        for q in &basis {
            let p: f64 = q.iter().zip(&c).map(|(a, b)| a * b).sum();
            for (ci, qi) in c.iter_mut().zip(q) {
                *ci -= p * qi;
            }
        }
    }
    let nc = libm::sqrt(c.iter().map(|x| x * x).sum());
    if nc < 1e-8 {
        return Err(Error::Internal("projection collapsed to zero".into()));
    }
    for ci in &mut c {
        *ci /= nc;
    }
    let poly = Polynomial::from_flat(n, monomials_of_degree(n, d), c);
    Ok(MonogenicPolynomial { degree: d, poly })
}

impl MonogenicPolynomial {
    /// Wraps a homogeneous polynomial, checking `DP = 0` on its coefficients.
    pub fn new(poly: Polynomial, tol: f64) -> Result<Self> {
        let d = poly.degree();
        if !poly.is_homogeneous(d) {
            return Err(Error::Parameter("polynomial is not homogeneous".into()));
        }
        let out = MonogenicPolynomial { degree: d, poly };
        let res = out.constraint_residual();
        if res > tol {
            return Err(Error::Parameter(alloc::format!(
                "polynomial is not monogenic (residual {res:e})"
            )));
        }
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    /// Max-norm of the coefficients of `DP`, computed on the monomial basis.
    pub fn constraint_residual(&self) -> f64 {
        let n = self.poly.dim();
        let (rows, cols, m) = dirac_constraint_matrix(n, self.degree);
        let w = 1usize << n;
        let order = monomials_of_degree(n, self.degree);
        let mut c = vec![0.0; cols];
        for (e, coeffs) in self.poly.terms() {
            let i = order.iter().position(|o| o.as_slice() == e).expect("homogeneous term");
            for (k, v) in coeffs.iter().enumerate() {
                c[i * w + k] += v;
            }
        }
        (0..rows)
            .map(|r| {
                m[r * cols..(r + 1) * cols]
                    .iter()
                    .zip(&c)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_field(&self) -> CliffordField {
        let (p1, p2) = (self.poly.clone(), self.poly.clone());
        CliffordField::new(self.poly.dim(), move |x| p1.eval(x)).with_partials(move |x| p2.partials(x))
    }
}
