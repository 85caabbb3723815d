//! Clifford-valued fields on `R^n` and the Euclidean Dirac operator.

mod bump;
mod kelvin;
mod monogenic;
mod multiplier;
mod poly;
mod weight;

pub use bump::{bump_field, bump_profile, random_polynomial};
pub use kelvin::kelvin;
pub use monogenic::{dirac_constraint_matrix, gen_monogenic_poly, MonogenicPolynomial};
pub use multiplier::MultiplierChoice;
pub use poly::{monomials_of_degree, Polynomial};
pub use weight::{weight_builtin, Weight, WeightKind, WeightParams};

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::Multivector;
use crate::{Error, Result};

pub type EvalFn = Arc<dyn Fn(&[f64]) -> Multivector + Send + Sync>;
pub type PartialsFn = Arc<dyn Fn(&[f64]) -> Vec<Multivector> + Send + Sync>;

/// Closed ball `|x - center| <= radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: &[f64]) -> bool {
        dist_sq(x, &self.center) <= self.radius * self.radius
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}

pub(crate) fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// A Clifford-valued function with optional analytic first partials and an
/// optional support ball outside which it vanishes identically.
#[derive(Clone)]
pub struct CliffordField {
    dim: usize,
    eval: EvalFn,
    partials: Option<PartialsFn>,
    support: Option<Ball>,
}

impl fmt::Debug for CliffordField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CliffordField")
            .field("dim", &self.dim)
            .field("analytic_partials", &self.partials.is_some())
            .field("support", &self.support)
            .finish()
    }
}

impl CliffordField {
    pub fn new(dim: usize, eval: impl Fn(&[f64]) -> Multivector + Send + Sync + 'static) -> Self {
        CliffordField {
            dim,
            eval: Arc::new(eval),
            partials: None,
            support: None,
        }
    }

    pub fn with_partials(
        mut self,
        partials: impl Fn(&[f64]) -> Vec<Multivector> + Send + Sync + 'static,
    ) -> Self {
        self.partials = Some(Arc::new(partials));
        self
    }

    pub fn with_support(mut self, ball: Ball) -> Self {
        self.support = Some(ball);
        self
    }

    /// Drops analytic partials so that derivatives come from finite differences.
    pub fn without_partials(mut self) -> Self {
        self.partials = None;
        self
    }

    pub fn constant(c: Multivector) -> Self {
        let n = c.dim();
        let v = c.clone();
        CliffordField::new(n, move |_| v.clone())
            .with_partials(move |_| (0..n).map(|_| Multivector::zero(n)).collect())
    }

    /// `u(x) = x = sum x_j e_j`.
    pub fn position(n: usize) -> Self {
        CliffordField::new(n, Multivector::vector)
            .with_partials(move |_| (1..=n).map(|j| Multivector::e(n, j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> Option<&Ball> {
        self.support.as_ref()
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    fn outside_support(&self, x: &[f64]) -> bool {
        self.support.as_ref().is_some_and(|b| !b.contains(x))
    }

    /// Evaluation without finiteness checks; zero outside the declared support.
    pub fn eval(&self, x: &[f64]) -> Multivector {
        if self.outside_support(x) {
            return Multivector::zero(self.dim);
        }
        (self.eval)(x)
    }

    pub fn try_eval(&self, x: &[f64]) -> Result<Multivector> {
        self.check_point(x)?;
        let v = self.eval(x);
        if !v.is_finite() {
            return Err(Error::Domain(format!("field is singular at {x:?}")));
        }
        Ok(v)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.len(),
            });
        }
        Ok(())
    }

    /// `(d_1 u, .., d_n u)` at `x`: analytic when available, otherwise central differences.
    pub fn partials(&self, x: &[f64]) -> Result<Vec<Multivector>> {
        self.check_point(x)?;
        let out = match &self.partials {
            Some(p) if !self.outside_support(x) => p(x),
            Some(_) => (0..self.dim).map(|_| Multivector::zero(self.dim)).collect(),
            None => self.fd_partials(x),
        };
        if out.iter().any(|m| !m.is_finite()) {
            return Err(Error::Domain(format!("field derivative is singular at {x:?}")));
        }
        Ok(out)
    }

    /// Central differences with step `max(1, |x|) * eps^{1/3}`.
    pub fn fd_partials(&self, x: &[f64]) -> Vec<Multivector> {
        let h = fd_step(x);
        let mut xp = x.to_vec();
        (0..self.dim)
            .map(|j| {
                xp[j] = x[j] + h;
                let fp = self.eval(&xp);
                xp[j] = x[j] - h;
                let fm = self.eval(&xp);
                xp[j] = x[j];
                (&fp - &fm).scale(0.5 / h)
            })
            .collect()
    }

    /// `x -> a u(x)` for a constant multivector `a`.
    pub fn left_mul(&self, a: &Multivector) -> CliffordField {
        let (inner, a1) = (self.clone(), a.clone());
        let mut out = CliffordField::new(self.dim, move |x| &a1 * &inner.eval(x));
        if self.partials.is_some() {
            let (inner, a2) = (self.clone(), a.clone());
            out = out.with_partials(move |x| {
                inner
                    .partials(x)
                    .unwrap_or_default()
                    .iter()
                    .map(|p| &a2 * p)
                    .collect()
            });
        }
        out.support = self.support.clone();
        out
    }
}

pub(crate) fn fd_step(x: &[f64]) -> f64 {
    let scale = norm(x).max(1.0);
    scale * libm::cbrt(f64::EPSILON)
}

/// `sum_j e_j p_j` for a list of partial derivatives.
pub fn dirac_from_partials(partials: &[Multivector]) -> Multivector {
    let n = partials[0].dim();
    let mut out = Multivector::zero(n);
    for (j, p) in partials.iter().enumerate() {
        out += &p.left_generator(j + 1);
    }
    out
}

/// `Du(x) = sum_j e_j d_j u(x)`.
pub fn dirac(u: &CliffordField, x: &[f64]) -> Result<Multivector> {
    let p = u.partials(x)?;
    Ok(dirac_from_partials(&p))
}

/// Formal adjoint of `D` in `L^2_phi`: `Du - (D phi) u`.
pub fn adjoint_formal(u: &CliffordField, w: &Weight, x: &[f64]) -> Result<Multivector> {
    if w.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: w.dim(),
        });
    }
    let dphi = w.try_dphi(x)?;
    let du = dirac(u, x)?;
    let val = u.try_eval(x)?;
    Ok(&du - &(&dphi * &val))
}
