//! Run configuration, serialized as JSON next to every report.

use serde::{Deserialize, Serialize};

use dirac_l2::fields::{weight_builtin, WeightParams};
use dirac_l2::quadrature::{Domain, QuadratureSpec};
use dirac_l2::{Weight, WeightKind};

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Obstruction,
    Solve,
    Sharpness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    Duality,
    Bochner,
    Weighted,
    Trace,
    General,
    Radial,
    SingleQuadratic,
    Perturbed,
    Application,
    Apriori2d,
}

impl IdentityKind {
    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::Duality => "duality",
            IdentityKind::Bochner => "bochner",
            IdentityKind::Weighted => "weighted",
            IdentityKind::Trace => "trace",
            IdentityKind::General => "general",
            IdentityKind::Radial => "radial",
            IdentityKind::SingleQuadratic => "single_quadratic",
            IdentityKind::Perturbed => "perturbed",
            IdentityKind::Application => "application",
            IdentityKind::Apriori2d => "apriori2d",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
}

impl WeightConfig {
    pub fn named(kind: &str) -> Self {
        WeightConfig {
            kind: kind.into(),
            m: None,
            a: None,
        }
    }

    pub fn build(&self, n: usize) -> Result<Weight, UsageError> {
        let mut params = WeightParams {
            m: self.m,
            a: self.a.clone(),
        };
        if matches!(self.kind.as_str(), "aniso" | "aniso_quadratic") && params.a.is_none() {
            let mut a = vec![1.0; n];
            a[0] = 1.01;
            if n > 1 {
                a[1] = 0.99;
            }
            params.a = Some(a);
        }
        weight_builtin(&self.kind, &params, n).map_err(UsageError::from)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainConfig {
    Annulus { r0: f64, r1: f64 },
    Cube { lo: f64, hi: f64 },
    Ball { radius: f64 },
}

impl DomainConfig {
    pub fn build(&self, n: usize) -> Result<Domain, UsageError> {
        let d = match *self {
            DomainConfig::Annulus { r0, r1 } => Domain::annulus(n, r0, r1),
            DomainConfig::Cube { lo, hi } => Domain::cube(vec![lo; n], vec![hi; n]),
            DomainConfig::Ball { radius } => Domain::ball(vec![0.0; n], radius),
        };
        d.map_err(UsageError::from)
    }

    /// Whether the closed domain contains the origin.
    pub fn contains_origin(&self) -> bool {
        match *self {
            DomainConfig::Annulus { r0, .. } => r0 <= 0.0,
            DomainConfig::Cube { lo, hi } => lo <= 0.0 && hi >= 0.0,
            DomainConfig::Ball { .. } => true,
        }
    }

    /// Parses `annulus:R0,R1`, `cube:LO,HI` or `ball:R`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("expected KIND:ARGS, got `{s}`"))?;
        let nums = parse_list(rest)?;
        match (kind, nums.as_slice()) {
            ("annulus", [r0, r1]) => Ok(DomainConfig::Annulus { r0: *r0, r1: *r1 }),
            ("cube", [lo, hi]) => Ok(DomainConfig::Cube { lo: *lo, hi: *hi }),
            ("ball", [r]) => Ok(DomainConfig::Ball { radius: *r }),
            _ => Err(format!("unrecognized domain `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub radial_nodes: usize,
    pub sphere_level: usize,
}

impl QuadratureConfig {
    /// `(64, 20)` up to `n = 3`, `(48, 14)` above.
    pub fn default_for(n: usize) -> Self {
        if n >= 4 {
            QuadratureConfig {
                radial_nodes: 48,
                sphere_level: 14,
            }
        } else {
            QuadratureConfig {
                radial_nodes: 64,
                sphere_level: 20,
            }
        }
    }

    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec::new(self.radial_nodes, self.sphere_level)
    }
}

/// Overrides for the pass/fail thresholds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub weight: WeightConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainConfig>,
    pub quadrature: QuadratureConfig,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    // verify
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<IdentityKind>,
    #[serde(default)]
    pub trials: usize,
    #[serde(default)]
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_aux: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    // obstruction, sharpness, radial
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_list: Vec<f64>,
    // solve
    #[serde(default)]
    pub levels: usize,
    #[serde(default)]
    pub cells: usize,
    #[serde(default)]
    pub poisson: bool,
}

impl RunConfig {
    pub fn new(command: Command, n: usize) -> Self {
        RunConfig {
            command,
            n,
            weight: WeightConfig::named("gauss"),
            domain: None,
            quadrature: QuadratureConfig::default_for(n),
            seed: 0,
            tolerances: Tolerances::default(),
            identity: None,
            trials: 0,
            degree: 2,
            kappa: None,
            k_aux: None,
            epsilon: None,
            m_list: Vec::new(),
            levels: 0,
            cells: 0,
            poisson: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, UsageError> {
        serde_json::from_str(s).map_err(|e| UsageError(format!("invalid config: {e}")))
    }

    pub fn is_radial_weight(&self) -> bool {
        matches!(self.weight.kind.as_str(), "log" | "log_radial" | "radial_power")
    }

    /// The weight, rejecting a singular radial weight on a domain through the origin.
    pub fn weight(&self) -> Result<Weight, UsageError> {
        let w = self.weight.build(self.n)?;
        if let Some(d) = &self.domain {
            if d.contains_origin() && w.singular_at_origin() {
                return Err(UsageError(format!(
                    "weight `{}` is singular at the origin, which lies in the domain",
                    self.weight.kind
                )));
            }
        }
        Ok(w)
    }

    pub fn is_gaussian(w: &Weight) -> bool {
        matches!(w.kind(), WeightKind::RadialPower { m } if *m == 2.0)
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
                .and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("`{t}` is not finite")) })
        })
        .collect()
}
