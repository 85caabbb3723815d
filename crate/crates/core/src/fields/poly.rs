//! Multivector-coefficient polynomials in `x in R^n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{check_dim, Multivector};
use crate::{Error, Result};

/// All exponent vectors of total degree exactly `d` in `n` variables, in
/// lexicographically decreasing order (`x_1^d` first).
pub fn monomials_of_degree(n: usize, d: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, d: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() + 1 == n {
            prefix.push(d as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k as u8);
            rec(n, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `P(x) = sum_alpha x^alpha c_alpha` with `c_alpha` in `R_n`.
///
/// Coefficients are kept in one flat buffer, `2^n` values per monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    exponents: Vec<Vec<u8>>,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(Vec<u8>, Multivector)>) -> Result<Self> {
        check_dim(dim)?;
        let mut exponents = Vec::with_capacity(terms.len());
        let mut coeffs = Vec::with_capacity(terms.len() << dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: e.len(),
                });
            }
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: c.dim(),
                });
            }
            exponents.push(e);
            coeffs.extend_from_slice(c.coeffs());
        }
        Ok(Polynomial {
            dim,
            exponents,
            coeffs,
        })
    }

    pub(crate) fn from_flat(dim: usize, exponents: Vec<Vec<u8>>, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), exponents.len() << dim);
        Polynomial {
            dim,
            exponents,
            coeffs,
        }
    }

    pub fn constant(c: Multivector) -> Self {
        let n = c.dim();
        Polynomial {
            dim: n,
            exponents: vec![vec![0; n]],
            coeffs: c.into_coeffs(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.exponents
            .iter()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &[f64])> {
        let w = 1 << self.dim;
        self.exponents
            .iter()
            .enumerate()
            .map(move |(i, e)| (e.as_slice(), &self.coeffs[i * w..(i + 1) * w]))
    }

    /// True when every monomial has total degree `d`.
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.exponents
            .iter()
            .all(|e| e.iter().map(|&k| k as usize).sum::<usize>() == d)
    }

    fn accumulate(&self, out: &mut [f64], weight: impl Fn(&[u8]) -> f64) {
        let w = 1 << self.dim;
        for (i, e) in self.exponents.iter().enumerate() {
            let s = weight(e);
            if s == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(&self.coeffs[i * w..(i + 1) * w]) {
                *o += s * c;
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Multivector {
        let mut out = Multivector::zero(self.dim);
        self.accumulate(out.coeffs_mut(), |e| monomial(e, x, None));
        out
    }

    /// `d_j P` for `j = 1..n`, in order.
    pub fn partials(&self, x: &[f64]) -> Vec<Multivector> {
        (0..self.dim)
            .map(|j| {
                let mut out = Multivector::zero(self.dim);
                self.accumulate(out.coeffs_mut(), |e| monomial(e, x, Some(j)));
                out
            })
            .collect()
    }
}

/// `x^e`, or its derivative in variable `dj` (0-based).
fn monomial(e: &[u8], x: &[f64], dj: Option<usize>) -> f64 {
    let mut v = 1.0;
    for (i, (&k, &xi)) in e.iter().zip(x).enumerate() {
        let k = k as i32;
        if Some(i) == dj {
            if k == 0 {
                return 0.0;
            }
            v *= k as f64 * libm::pow(xi, (k - 1) as f64);
        } else if k > 0 {
            v *= libm::pow(xi, k as f64);
        }
    }
    v
}
