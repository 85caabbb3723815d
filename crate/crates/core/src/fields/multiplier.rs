//! Auxiliary multipliers `(eta, Y)` for the conjugated weighted identity.
//!
//! `eta` is scalar and `Y = sum Y_j e_j` a vector field. The identity needs
//! `sum_j d_j(eta Y_j)` and `Laplace |Y|^2`; both are analytic for the
//! built-in choices and fall back to finite differences for custom ones.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::weight::Weight;
use super::{norm, WeightKind};
use crate::algebra::{check_dim, Multivector};
use crate::{Error, Result};

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct MultiplierChoice {
    dim: usize,
    name: String,
    eta: ScalarFn,
    y: VecFn,
    div_eta_y: Option<ScalarFn>,
    lap_y_sq: Option<ScalarFn>,
}

impl fmt::Debug for MultiplierChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierChoice")
            .field("dim", &self.dim)
            .field("name", &self.name)
            .field("analytic_divergence", &self.div_eta_y.is_some())
            .field("analytic_laplacian", &self.lap_y_sq.is_some())
            .finish()
    }
}

impl MultiplierChoice {
    pub fn custom(
        n: usize,
        name: impl Into<String>,
        eta: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        y: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        check_dim(n)?;
        Ok(MultiplierChoice {
            dim: n,
            name: name.into(),
            eta: Arc::new(eta),
            y: Arc::new(y),
            div_eta_y: None,
            lap_y_sq: None,
        })
    }

    pub fn with_divergence(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.div_eta_y = Some(Arc::new(f));
        self
    }

    pub fn with_laplacian_y_sq(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.lap_y_sq = Some(Arc::new(f));
        self
    }

    /// `eta = 0`, `Y = 0`.
    pub fn zero(n: usize) -> Result<Self> {
        Ok(Self::custom(n, "zero", |_| 0.0, move |_| vec![0.0; n])?
            .with_divergence(|_| 0.0)
            .with_laplacian_y_sq(|_| 0.0))
    }

    /// `Y = D phi / |D phi|`, `eta = -|D phi| / 2`; singular where `grad phi = 0`.
    pub fn canonical(w: &Weight) -> Self {
        let (w1, w2, w3) = (w.clone(), w.clone(), w.clone());
        MultiplierChoice {
            dim: w.dim(),
            name: "canonical".into(),
            eta: Arc::new(move |x| -0.5 * norm(&w1.grad(x))),
            y: Arc::new(move |x| unit(w2.grad(x))),
            div_eta_y: Some(Arc::new(move |x| -0.5 * w3.laplacian(x))),
            lap_y_sq: Some(Arc::new(|_| 0.0)),
        }
    }

    /// Radial choice for `phi = |x|^m`: `Y = x/r`, `eta = -m r^{m-1}/2 + (2-n)/r`.
    pub fn radial(n: usize, m: f64) -> Result<Self> {
        check_dim(n)?;
        if m == 0.0 {
            return Err(Error::Parameter("radial exponent must be nonzero".into()));
        }
        let nf = n as f64;
        Ok(MultiplierChoice {
            dim: n,
            name: alloc::format!("radial(m={m})"),
            eta: Arc::new(move |x| {
                let r = norm(x);
                -0.5 * m * libm::pow(r, m - 1.0) + (2.0 - nf) / r
            }),
            y: Arc::new(|x| {
                let r = norm(x);
                x.iter().map(|v| v / r).collect()
            }),
            // eta Y_j = -d_j phi / 2 + (2-n) x_j / r^2
            div_eta_y: Some(Arc::new(move |x| {
                let r = norm(x);
                let lap = m * (m + nf - 2.0) * libm::pow(r, m - 2.0);
                -0.5 * lap + (2.0 - nf) * (nf - 2.0) / (r * r)
            })),
            lap_y_sq: Some(Arc::new(|_| 0.0)),
        })
    }

    /// `Y = e_1`, `eta = -x_1` for `phi = x_1^2`.
    pub fn single_quadratic(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(MultiplierChoice {
            dim: n,
            name: "single_quadratic".into(),
            eta: Arc::new(|x| -x[0]),
            y: Arc::new(move |_| {
                let mut y = vec![0.0; n];
                y[0] = 1.0;
                y
            }),
            div_eta_y: Some(Arc::new(|_| -1.0)),
            lap_y_sq: Some(Arc::new(|_| 0.0)),
        })
    }

    /// For `phi = sum a_i x_i^2`: `Y = D phi/|D phi|`, `eta = -|D phi|/2 + 2(2-n)/|D phi|`.
    pub fn perturbed_gaussian(w: &Weight) -> Result<Self> {
        let a = match w.kind() {
            WeightKind::AnisoQuadratic { a } => a.clone(),
            _ => {
                return Err(Error::Parameter(
                    "perturbed Gaussian multiplier needs an aniso_quadratic weight".into(),
                ))
            }
        };
        let n = a.len();
        let nf = n as f64;
        let (a1, a2, a3) = (a.clone(), a.clone(), a);
        let grad = move |a: &[f64], x: &[f64]| -> Vec<f64> {
            a.iter().zip(x).map(|(a, x)| 2.0 * a * x).collect()
        };
        Ok(MultiplierChoice {
            dim: n,
            name: "perturbed_gaussian".into(),
            eta: Arc::new(move |x| {
                let g = norm(&grad(&a1, x));
                -0.5 * g + 2.0 * (2.0 - nf) / g
            }),
            y: Arc::new(move |x| unit(grad(&a2, x))),
            // eta Y_j = -a_j x_j + 2(2-n) (2 a_j x_j) / S with S = 4 sum a_i^2 x_i^2
            div_eta_y: Some(Arc::new(move |x| {
                let s: f64 = 4.0 * a3.iter().zip(x).map(|(a, x)| a * a * x * x).sum::<f64>();
                let mut div = -a3.iter().sum::<f64>();
                for (aj, xj) in a3.iter().zip(x) {
                    let d = 2.0 * aj / s - 2.0 * aj * xj * (8.0 * aj * aj * xj) / (s * s);
                    div += 2.0 * (2.0 - nf) * d;
                }
                div
            })),
            lap_y_sq: Some(Arc::new(|_| 0.0)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eta(&self, x: &[f64]) -> f64 {
        (self.eta)(x)
    }

    pub fn y_components(&self, x: &[f64]) -> Vec<f64> {
        (self.y)(x)
    }

    pub fn y(&self, x: &[f64]) -> Multivector {
        Multivector::vector(&(self.y)(x))
    }

    /// `sum_j d_j (eta Y_j)`.
    pub fn divergence(&self, x: &[f64]) -> f64 {
        if let Some(f) = &self.div_eta_y {
            return f(x);
        }
        let h = 1e-5 * norm(x).max(1.0);
        let mut xp = x.to_vec();
        let mut div = 0.0;
        for j in 0..self.dim {
            xp[j] = x[j] + h;
            let p = self.eta(&xp) * (self.y)(&xp)[j];
            xp[j] = x[j] - h;
            let m = self.eta(&xp) * (self.y)(&xp)[j];
            xp[j] = x[j];
            div += (p - m) / (2.0 * h);
        }
        div
    }

    /// `Laplace |Y|^2`.
    pub fn laplacian_y_sq(&self, x: &[f64]) -> f64 {
        if let Some(f) = &self.lap_y_sq {
            return f(x);
        }
        let h = 1e-4 * norm(x).max(1.0);
        let sq = |p: &[f64]| (self.y)(p).iter().map(|v| v * v).sum::<f64>();
        let f0 = sq(x);
        let mut xp = x.to_vec();
        let mut lap = 0.0;
        for j in 0..self.dim {
            xp[j] = x[j] + h;
            let fp = sq(&xp);
            xp[j] = x[j] - h;
            let fm = sq(&xp);
            xp[j] = x[j];
            lap += (fp - 2.0 * f0 + fm) / (h * h);
        }
        lap
    }
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let r = norm(&v);
    for x in &mut v {
        *x /= r;
    }
    v
}
