//! Scalar weights `phi` with analytic gradient and Laplacian.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::norm;
use crate::algebra::{check_dim, Multivector};
use crate::{Error, Result};

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum WeightKind {
    /// `n log|x|`
    LogRadial,
    /// `|x|^m`, `m != 0`
    RadialPower { m: f64 },
    /// `x_1^2`
    SingleQuadratic,
    /// `sum a_i x_i^2`, all `a_i > 0`
    AnisoQuadratic { a: Vec<f64> },
    Custom {
        name: String,
        phi: ScalarFn,
        grad: GradFn,
        laplacian: ScalarFn,
    },
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::LogRadial => write!(f, "LogRadial"),
            WeightKind::RadialPower { m } => write!(f, "RadialPower {{ m: {m} }}"),
            WeightKind::SingleQuadratic => write!(f, "SingleQuadratic"),
            WeightKind::AnisoQuadratic { a } => write!(f, "AnisoQuadratic {{ a: {a:?} }}"),
            WeightKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Parameters accepted by [`weight_builtin`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightParams {
    pub m: Option<f64>,
    pub a: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct Weight {
    dim: usize,
    kind: WeightKind,
}

/// Builds one of the closed-form weight families by name
/// (`log_radial`/`log`, `radial_power`, `gaussian`/`gauss`,
/// `single_quadratic`/`x1sq`, `aniso_quadratic`/`aniso`, `zero`).
pub fn weight_builtin(kind: &str, params: &WeightParams, n: usize) -> Result<Weight> {
    match kind {
        "log_radial" | "log" => Weight::log_radial(n),
        "radial_power" => {
            let m = params
                .m
                .ok_or_else(|| Error::Parameter("radial_power needs an exponent m".into()))?;
            Weight::radial_power(n, m)
        }
        "gaussian" | "gauss" => Weight::gaussian(n),
        "zero" => {
            check_dim(n)?;
            Ok(Weight::zero(n))
        }
        "single_quadratic" | "x1sq" => Weight::single_quadratic(n),
        "aniso_quadratic" | "aniso" => {
            let a = params
                .a
                .clone()
                .ok_or_else(|| Error::Parameter("aniso_quadratic needs coefficients a".into()))?;
            if a.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: a.len(),
                });
            }
            Weight::aniso_quadratic(a)
        }
        other => Err(Error::Parameter(format!("unknown weight kind `{other}`"))),
    }
}

impl Weight {
    pub fn log_radial(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Weight {
            dim: n,
            kind: WeightKind::LogRadial,
        })
    }

    pub fn radial_power(n: usize, m: f64) -> Result<Self> {
        check_dim(n)?;
        if m == 0.0 || !m.is_finite() {
            return Err(Error::Parameter(format!(
                "radial exponent must be a nonzero real, got {m}"
            )));
        }
        Ok(Weight {
            dim: n,
            kind: WeightKind::RadialPower { m },
        })
    }

    /// `|x|^2`.
    pub fn gaussian(n: usize) -> Result<Self> {
        Self::radial_power(n, 2.0)
    }

    pub fn single_quadratic(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Weight {
            dim: n,
            kind: WeightKind::SingleQuadratic,
        })
    }

    pub fn aniso_quadratic(a: Vec<f64>) -> Result<Self> {
        check_dim(a.len())?;
        if let Some(bad) = a.iter().find(|&&ai| !(ai > 0.0 && ai.is_finite())) {
            return Err(Error::Parameter(format!(
                "quadratic coefficients must be positive, got {bad}"
            )));
        }
        Ok(Weight {
            dim: a.len(),
            kind: WeightKind::AnisoQuadratic { a },
        })
    }

    pub fn custom(
        n: usize,
        name: impl Into<String>,
        phi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        laplacian: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_dim(n)?;
        Ok(Weight {
            dim: n,
            kind: WeightKind::Custom {
                name: name.into(),
                phi: Arc::new(phi),
                grad: Arc::new(grad),
                laplacian: Arc::new(laplacian),
            },
        })
    }

    /// `phi = 0`.
    pub fn zero(n: usize) -> Self {
        Self::custom(n, "zero", |_| 0.0, move |_| vec![0.0; n], |_| 0.0)
            .expect("dimension checked by caller")
    }

    /// Harmonic linear weight `phi = c . x`.
    pub fn linear(c: Vec<f64>) -> Result<Self> {
        let n = c.len();
        let (c1, c2) = (c.clone(), c);
        Self::custom(
            n,
            "linear",
            move |x| x.iter().zip(&c1).map(|(a, b)| a * b).sum(),
            move |_| c2.clone(),
            |_| 0.0,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            WeightKind::LogRadial => "log_radial".into(),
            WeightKind::RadialPower { m } => format!("radial_power(m={m})"),
            WeightKind::SingleQuadratic => "single_quadratic".into(),
            WeightKind::AnisoQuadratic { a } => format!("aniso_quadratic(a={a:?})"),
            WeightKind::Custom { name, .. } => name.clone(),
        }
    }

    /// True when `phi`, its gradient or Laplacian blow up at the origin.
    pub fn singular_at_origin(&self) -> bool {
        match &self.kind {
            WeightKind::LogRadial => true,
            WeightKind::RadialPower { m } => *m < 2.0,
            _ => false,
        }
    }

    pub fn phi(&self, x: &[f64]) -> f64 {
        match &self.kind {
            WeightKind::LogRadial => self.dim as f64 * libm::log(norm(x)),
            WeightKind::RadialPower { m } => libm::pow(norm(x), *m),
            WeightKind::SingleQuadratic => x[0] * x[0],
            WeightKind::AnisoQuadratic { a } => a.iter().zip(x).map(|(a, x)| a * x * x).sum(),
            WeightKind::Custom { phi, .. } => phi(x),
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            WeightKind::LogRadial => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let s = self.dim as f64 / r2;
                x.iter().map(|v| s * v).collect()
            }
            WeightKind::RadialPower { m } => {
                let s = m * libm::pow(norm(x), m - 2.0);
                x.iter().map(|v| s * v).collect()
            }
            WeightKind::SingleQuadratic => {
                let mut g = vec![0.0; self.dim];
                g[0] = 2.0 * x[0];
                g
            }
            WeightKind::AnisoQuadratic { a } => a.iter().zip(x).map(|(a, x)| 2.0 * a * x).collect(),
            WeightKind::Custom { grad, .. } => grad(x),
        }
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        let n = self.dim as f64;
        match &self.kind {
            WeightKind::LogRadial => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                n * (n - 2.0) / r2
            }
            WeightKind::RadialPower { m } => m * (m + n - 2.0) * libm::pow(norm(x), m - 2.0),
            WeightKind::SingleQuadratic => 2.0,
            WeightKind::AnisoQuadratic { a } => 2.0 * a.iter().sum::<f64>(),
            WeightKind::Custom { laplacian, .. } => laplacian(x),
        }
    }

    /// `D phi = sum_j e_j d_j phi`, a pure vector.
    pub fn dphi(&self, x: &[f64]) -> Multivector {
        Multivector::vector(&self.grad(x))
    }

    pub fn try_dphi(&self, x: &[f64]) -> Result<Multivector> {
        let d = self.dphi(x);
        if !d.is_finite() {
            return Err(Error::Domain(format!(
                "gradient of weight {} is singular at {x:?}",
                self.name()
            )));
        }
        Ok(d)
    }
}
