//! Domains, radial-times-spherical quadrature and weighted `L^2` inner products.
//!
//! Integrals over annuli, balls and truncated exteriors are computed in
//! spherical coordinates `x = c + r omega`, `dV = r^{n-1} dr dS(omega)`, with
//! Gauss-Legendre panels in `r` and a [`SphereRule`] in `omega`. Boxes use a
//! tensor Gauss-Legendre grid. Every integral is evaluated with the requested
//! rule and with a coarser companion; their difference is the error estimate.

pub mod rules;

pub use rules::{gauss_gegenbauer, gauss_legendre, sphere_rule, SphereRule};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{check_dim, dot};
use crate::fields::{norm, Ball, CliffordField, Weight, WeightKind};
use crate::special::{gamma, gamma_p, gamma_q};
use crate::sum::pairwise;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// `r0 <= |x| <= r1`
    Annulus { r0: f64, r1: f64 },
    /// `lo_i <= x_i <= hi_i`
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `r0 <= |x| <= r`, standing in for `|x| >= r0`; `tail_bound` is the
    /// certified size of the discarded part.
    ExteriorTruncated { r0: f64, r: f64, tail_bound: f64 },
    /// `|x - center| <= radius`
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    dim: usize,
    kind: DomainKind,
}

const CONTAIN_TOL: f64 = 1e-12;

impl Domain {
    pub fn annulus(n: usize, r0: f64, r1: f64) -> Result<Self> {
        check_dim(n)?;
        if !(r0 > 0.0 && r0 < r1 && r1.is_finite()) {
            return Err(Error::Parameter(format!("annulus needs 0 < r0 < r1, got ({r0}, {r1})")));
        }
        Ok(Domain {
            dim: n,
            kind: DomainKind::Annulus { r0, r1 },
        })
    }

    pub fn cube(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let n = lo.len();
        check_dim(n)?;
        if hi.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Parameter("box needs lo < hi in every coordinate".into()));
        }
        Ok(Domain {
            dim: n,
            kind: DomainKind::Box { lo, hi },
        })
    }

    pub fn exterior_truncated(n: usize, r0: f64, r: f64, tail_bound: f64) -> Result<Self> {
        check_dim(n)?;
        if !(r0 >= 1.0 && r0 < r && r.is_finite()) {
            return Err(Error::Parameter(format!(
                "truncated exterior needs 1 <= r0 < R < inf, got ({r0}, {r})"
            )));
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::Parameter("tail bound must be nonnegative".into()));
        }
        Ok(Domain {
            dim: n,
            kind: DomainKind::ExteriorTruncated { r0, r, tail_bound },
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_dim(center.len())?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Domain {
            dim: center.len(),
            kind: DomainKind::Ball { center, radius },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    /// Discarded tail for truncated exteriors, zero otherwise.
    pub fn tail_bound(&self) -> f64 {
        match self.kind {
            DomainKind::ExteriorTruncated { tail_bound, .. } => tail_bound,
            _ => 0.0,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.kind {
            DomainKind::Annulus { r0, r1 } => {
                let r = norm(x);
                r >= *r0 && r <= *r1
            }
            DomainKind::ExteriorTruncated { r0, r, .. } => {
                let s = norm(x);
                s >= *r0 && s <= *r
            }
            DomainKind::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b),
            DomainKind::Ball { center, radius } => Ball {
                center: center.clone(),
                radius: *radius,
            }
            .contains(x),
        }
    }

    /// Whether the closed ball lies in the domain (up to `1e-12` rounding).
    pub fn contains_ball(&self, b: &Ball) -> bool {
        if b.center.len() != self.dim {
            return false;
        }
        let c = norm(&b.center);
        let rho = b.radius;
        match &self.kind {
            DomainKind::Annulus { r0, r1 } => c - rho >= r0 - CONTAIN_TOL && c + rho <= r1 + CONTAIN_TOL,
            DomainKind::ExteriorTruncated { r0, r, .. } => {
                c - rho >= r0 - CONTAIN_TOL && c + rho <= r + CONTAIN_TOL
            }
            DomainKind::Box { lo, hi } => b
                .center
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, h))| v - rho >= a - CONTAIN_TOL && v + rho <= h + CONTAIN_TOL),
            DomainKind::Ball { center, radius } => {
                libm::sqrt(crate::fields::dist_sq(center, &b.center)) + rho <= radius + CONTAIN_TOL
            }
        }
    }

    /// Precondition check for fields that must vanish near the boundary.
    pub fn check_support(&self, u: &CliffordField) -> Result<()> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: u.dim() });
        }
        match u.support() {
            Some(b) if self.contains_ball(b) => Ok(()),
            Some(b) => Err(Error::Precondition(format!(
                "support ball (center {:?}, radius {}) is not contained in the domain",
                b.center, b.radius
            ))),
            None => Err(Error::Precondition("field has no declared compact support".into())),
        }
    }
}

/// Radial variable used for the Gauss-Legendre panels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialMap {
    /// Linear in `r` for bounded domains, `s = ln r` for truncated exteriors.
    Auto,
    Linear,
    /// `s = ln r`, panels of width at most `log_panel_width`.
    Log,
    /// `t = r^{-p}` with `p > 0` on a single panel.
    InversePower { p: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per radial panel.
    pub radial_nodes: usize,
    /// Polynomial exactness of the sphere rule.
    pub sphere_level: usize,
    /// Gauss-Legendre nodes per axis on boxes.
    pub box_nodes: usize,
    /// Extra radial panel boundaries (ignored outside the radial range).
    pub breakpoints: Vec<f64>,
    pub radial_map: RadialMap,
    pub log_panel_width: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: 64,
            sphere_level: 20,
            box_nodes: 24,
            breakpoints: Vec::new(),
            radial_map: RadialMap::Auto,
            log_panel_width: 1.0,
        }
    }
}

impl QuadratureSpec {
    pub fn new(radial_nodes: usize, sphere_level: usize) -> Self {
        QuadratureSpec {
            radial_nodes,
            sphere_level,
            ..Self::default()
        }
    }

    pub fn with_breakpoints(mut self, b: Vec<f64>) -> Self {
        self.breakpoints = b;
        self
    }

    pub fn with_radial_map(mut self, m: RadialMap) -> Self {
        self.radial_map = m;
        self
    }

    /// The comparison rule behind `est_error`: two thirds of the radial and box
    /// nodes, sphere level - 4. Its deviation from the full rule bounds the
    /// error of the full rule from above for converging integrands.
    pub fn coarsened(&self) -> Self {
        QuadratureSpec {
            radial_nodes: (self.radial_nodes - self.radial_nodes / 3).max(1),
            sphere_level: self.sphere_level.saturating_sub(4).max(1),
            box_nodes: (self.box_nodes - self.box_nodes / 3).max(1),
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.radial_nodes == 0 || self.box_nodes == 0 || self.sphere_level == 0 {
            return Err(Error::Config("quadrature sizes must be positive".into()));
        }
        if !(self.log_panel_width > 0.0) {
            return Err(Error::Config("log panel width must be positive".into()));
        }
        if let RadialMap::InversePower { p } = self.radial_map {
            if !(p > 0.0) {
                return Err(Error::Config("inverse power map needs p > 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    /// `|Q - Q_coarse|`
    pub est_error: f64,
    pub nodes_used: usize,
}

impl IntegralValue {
    pub const ZERO: IntegralValue = IntegralValue {
        value: 0.0,
        est_error: 0.0,
        nodes_used: 0,
    };

    /// Linear combination; errors add in absolute value.
    pub fn combine(terms: &[(f64, IntegralValue)]) -> IntegralValue {
        let values: Vec<f64> = terms.iter().map(|(c, t)| c * t.value).collect();
        let errs: Vec<f64> = terms.iter().map(|(c, t)| c.abs() * t.est_error).collect();
        IntegralValue {
            value: pairwise(&values),
            est_error: pairwise(&errs),
            nodes_used: terms.iter().map(|(_, t)| t.nodes_used).max().unwrap_or(0),
        }
    }
}

/// Radial nodes `(r, w)` on `[a, b]`, `w` including the map Jacobian but not `r^{n-1}`.
fn radial_nodes(a: f64, b: f64, q: &QuadratureSpec, exterior: bool) -> Result<Vec<(f64, f64)>> {
    let (gx, gw) = gauss_legendre(q.radial_nodes);
    let map = match q.radial_map {
        RadialMap::Auto if exterior => RadialMap::Log,
        RadialMap::Auto => RadialMap::Linear,
        m => m,
    };
    let mut cuts: Vec<f64> = q.breakpoints.iter().copied().filter(|c| *c > a && *c < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    let mut panel = |lo: f64, hi: f64, f: &dyn Fn(f64) -> (f64, f64)| {
        let (h, m) = (0.5 * (hi - lo), 0.5 * (hi + lo));
        for (x, w) in gx.iter().zip(&gw) {
            let (r, jac) = f(m + h * x);
            out.push((r, w * h * jac));
        }
    };
    match map {
        RadialMap::Linear | RadialMap::Auto => {
            let mut edges = vec![a];
            edges.extend(cuts);
            edges.push(b);
            for e in edges.windows(2) {
                panel(e[0], e[1], &|r| (r, 1.0));
            }
        }
        RadialMap::Log => {
            if !(a > 0.0) {
                return Err(Error::Config("log radial map needs r0 > 0".into()));
            }
            let mut edges = vec![libm::log(a)];
            edges.extend(cuts.iter().map(|c| libm::log(*c)));
            edges.push(libm::log(b));
            for e in edges.windows(2) {
                let k = libm::ceil((e[1] - e[0]) / q.log_panel_width).max(1.0) as usize;
                let step = (e[1] - e[0]) / k as f64;
                for i in 0..k {
                    let lo = e[0] + step * i as f64;
                    let hi = if i + 1 == k { e[1] } else { lo + step };
                    panel(lo, hi, &|s| {
                        let r = libm::exp(s);
                        (r, r)
                    });
                }
            }
        }
        RadialMap::InversePower { p } => {
            if !(a > 0.0) {
                return Err(Error::Config("inverse power map needs r0 > 0".into()));
            }
            let mut edges = vec![libm::pow(b, -p)];
            edges.extend(cuts.iter().rev().map(|c| libm::pow(*c, -p)));
            edges.push(libm::pow(a, -p));
            for e in edges.windows(2) {
                panel(e[0], e[1], &|t| {
                    let r = libm::pow(t, -1.0 / p);
                    (r, r / (p * t))
                });
            }
        }
    }
    Ok(out)
}

/// Sums `f` (writing `k` values) against the rule `q` on `dom`.
fn apply_rule<F>(dom: &Domain, q: &QuadratureSpec, k: usize, f: &mut F) -> Result<(Vec<f64>, usize)>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    q.validate()?;
    let n = dom.dim;
    let mut vals = vec![0.0; k];
    let mut eval = |x: &[f64], vals: &mut [f64]| -> Result<()> {
        f(x, vals)?;
        if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("integrand is not finite ({v}) at {x:?}")));
        }
        Ok(())
    };
    let mut outer: Vec<Vec<f64>> = vec![Vec::new(); k];
    let count;
    match &dom.kind {
        DomainKind::Box { lo, hi } => {
            let (gx, gw) = gauss_legendre(q.box_nodes);
            let m = q.box_nodes;
            let inner_len = m;
            let total = libm::pow(m as f64, n as f64) as usize;
            let mut x = vec![0.0; n];
            let mut inner: Vec<Vec<f64>> = vec![Vec::with_capacity(inner_len); k];
            for idx in 0..total {
                let mut rem = idx;
                let mut w = 1.0;
                for d in (0..n).rev() {
                    let i = rem % m;
                    rem /= m;
                    let h = 0.5 * (hi[d] - lo[d]);
                    x[d] = 0.5 * (hi[d] + lo[d]) + h * gx[i];
                    w *= gw[i] * h;
                }
                eval(&x, &mut vals)?;
                for t in 0..k {
                    inner[t].push(w * vals[t]);
                }
                if idx % inner_len == inner_len - 1 {
                    for t in 0..k {
                        outer[t].push(pairwise(&inner[t]));
                        inner[t].clear();
                    }
                }
            }
            count = total;
        }
        _ => {
            let (center, a, b, exterior) = match &dom.kind {
                DomainKind::Annulus { r0, r1 } => (None, *r0, *r1, false),
                DomainKind::ExteriorTruncated { r0, r, .. } => (None, *r0, *r, true),
                DomainKind::Ball { center, radius } => (Some(center.as_slice()), 0.0, *radius, false),
                DomainKind::Box { .. } => unreachable!(),
            };
            let radial = radial_nodes(a, b, q, exterior)?;
            let sphere = sphere_rule(n, q.sphere_level)?;
            let mut x = vec![0.0; n];
            let mut inner: Vec<Vec<f64>> = vec![Vec::with_capacity(sphere.len()); k];
            for (r, wr) in &radial {
                let jac = wr * libm::pow(*r, n as f64 - 1.0);
                for i in 0..sphere.len() {
                    let om = sphere.node(i);
                    for d in 0..n {
                        x[d] = center.map_or(0.0, |c| c[d]) + r * om[d];
                    }
                    eval(&x, &mut vals)?;
                    let ws = sphere.weights()[i];
                    for t in 0..k {
                        inner[t].push(ws * vals[t]);
                    }
                }
                for t in 0..k {
                    outer[t].push(jac * pairwise(&inner[t]));
                    inner[t].clear();
                }
            }
            count = radial.len() * sphere.len();
        }
    }
    Ok((outer.iter().map(|v| pairwise(v)).collect(), count))
}

/// Integrates `k` scalar integrands at once; `f(x, out)` fills `out[..k]`.
pub fn integrate_terms<F>(dom: &Domain, q: &QuadratureSpec, k: usize, mut f: F) -> Result<Vec<IntegralValue>>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let (base, n1) = apply_rule(dom, q, k, &mut f)?;
    let (coarse, n2) = apply_rule(dom, &q.coarsened(), k, &mut f)?;
    Ok(base
        .iter()
        .zip(&coarse)
        .map(|(b, f)| IntegralValue {
            value: *b,
            est_error: (b - f).abs(),
            nodes_used: n1 + n2,
        })
        .collect())
}

pub fn integrate<F>(dom: &Domain, q: &QuadratureSpec, f: F) -> Result<IntegralValue>
where
    F: Fn(&[f64]) -> f64,
{
    let v = integrate_terms(dom, q, 1, |x, out| {
        out[0] = f(x);
        Ok(())
    })?;
    Ok(v[0])
}

/// `int Re(u conj(v)) e^{-phi} dV = int sum_A u_A v_A e^{-phi} dV`.
pub fn weighted_inner(
    u: &CliffordField,
    v: &CliffordField,
    w: &Weight,
    dom: &Domain,
    q: &QuadratureSpec,
) -> Result<IntegralValue> {
    for d in [u.dim(), v.dim(), w.dim()] {
        if d != dom.dim {
            return Err(Error::DimensionMismatch { left: dom.dim, right: d });
        }
    }
    integrate(dom, q, |x| {
        let a = u.eval(x);
        let b = v.eval(x);
        dot(a.coeffs(), b.coeffs()) * libm::exp(-w.phi(x))
    })
}

pub fn weighted_norm_sq(u: &CliffordField, w: &Weight, dom: &Domain, q: &QuadratureSpec) -> Result<IntegralValue> {
    weighted_inner(u, u, w, dom, q)
}

/// Tail of `int_R^inf r^{p + n - 1} e^{-phi(r)} dr` (sphere factor excluded) as a closed-form bound.
pub fn tail_bound(w: &Weight, decay_exponent: f64, r: f64) -> Result<f64> {
    let n = w.dim() as f64;
    let q = decay_exponent + n;
    let power_tail = |q: f64, r: f64| -> Result<f64> {
        if q >= 0.0 {
            return Err(Error::NotIntegrable(format!(
                "tail r^{} is not integrable at infinity",
                q - 1.0
            )));
        }
        Ok(libm::pow(r, q) / -q)
    };
    match w.kind() {
        WeightKind::LogRadial => power_tail(decay_exponent, r),
        WeightKind::RadialPower { m } if *m > 0.0 => Ok(gamma_tail(q / m, libm::pow(r, *m)) / m),
        // e^{-r^m} <= 1 for m < 0
        WeightKind::RadialPower { .. } | WeightKind::SingleQuadratic => power_tail(q, r),
        WeightKind::AnisoQuadratic { a } => {
            let amin = a.iter().copied().fold(f64::INFINITY, f64::min);
            // phi >= amin r^2; substitute s = amin r^2
            Ok(0.5 * libm::pow(amin, -q / 2.0) * gamma_tail(q / 2.0, amin * r * r))
        }
        WeightKind::Custom { name, .. } => Err(Error::NotIntegrable(format!(
            "no closed-form tail bound for custom weight {name}"
        ))),
    }
}

// Bound on int_x^inf s^{a-1} e^{-s} ds; exact for a > 0, crude for a <= 0.
fn gamma_tail(a: f64, x: f64) -> f64 {
    if a > 0.0 {
        gamma_q(a, x) * gamma(a)
    } else {
        libm::pow(x, a - 1.0) * libm::exp(-x)
    }
}

/// Smallest `R >= r0` (rounded up to an integer above 1) with tail bound `< tol`.
pub fn truncation_radius(w: &Weight, decay_exponent: f64, r0: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    if tol == f64::INFINITY {
        return Ok(r0);
    }
    let t0 = tail_bound(w, decay_exponent, r0)?;
    if t0 < tol {
        return Ok(r0);
    }
    let n = w.dim() as f64;
    let exact = match w.kind() {
        WeightKind::LogRadial => Some(libm::pow(tol * -decay_exponent, 1.0 / decay_exponent)),
        WeightKind::SingleQuadratic => {
            let q = decay_exponent + n;
            Some(libm::pow(tol * -q, 1.0 / q))
        }
        WeightKind::RadialPower { m } if *m < 0.0 => {
            let q = decay_exponent + n;
            Some(libm::pow(tol * -q, 1.0 / q))
        }
        _ => None,
    };
    let r = match exact {
        Some(r) => r,
        None => {
            let mut hi = r0.max(1.0);
            let mut steps = 0;
            while tail_bound(w, decay_exponent, hi)? >= tol {
                hi *= 2.0;
                steps += 1;
                if steps > 2000 || !hi.is_finite() {
                    break;
                }
            }
            let mut lo = hi / 2.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if tail_bound(w, decay_exponent, mid)? < tol {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    let r = libm::ceil(r);
    if !r.is_finite() {
        return Err(Error::NotIntegrable(format!(
            "truncation radius for tolerance {tol} exceeds the floating-point range"
        )));
    }
    Ok(r.max(r0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialShape {
    /// `r^p`
    Power(f64),
    /// `r^p e^{-r^2}`
    PowerTimesGaussian(f64),
}

/// Exact `int_a^b shape(r) dr` (`b` may be infinite). Multiply by
/// `sphere_area(n)` for the corresponding radial volume integral.
pub fn closed_form_radial(shape: RadialShape, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= a) {
        return Err(Error::Parameter(format!("need 0 <= a <= b, got ({a}, {b})")));
    }
    if a == b {
        return Ok(0.0);
    }
    match shape {
        RadialShape::Power(p) => {
            if a == 0.0 && p <= -1.0 {
                return Err(Error::NotIntegrable(format!("r^{p} diverges at 0")));
            }
            if b.is_infinite() && p >= -1.0 {
                return Err(Error::NotIntegrable(format!("r^{p} diverges at infinity")));
            }
            if p == -1.0 {
                return Ok(libm::log(b / a));
            }
            let e = p + 1.0;
            let fb = if b.is_infinite() { 0.0 } else { libm::pow(b, e) };
            let fa = if a == 0.0 { 0.0 } else { libm::pow(a, e) };
            Ok((fb - fa) / e)
        }
        RadialShape::PowerTimesGaussian(p) => {
            let s = (p + 1.0) / 2.0;
            if s <= 0.0 {
                if a == 0.0 {
                    return Err(Error::NotIntegrable(format!("r^{p} e^(-r^2) diverges at 0")));
                }
                return Err(Error::Parameter("power_times_gaussian needs p > -1".into()));
            }
            let (xa, xb) = (a * a, b * b);
            let g = gamma(s);
            let v = if xa > s {
                0.5 * g * (gamma_q(s, xa) - gamma_q(s, xb))
            } else {
                0.5 * g * (gamma_p(s, xb) - gamma_p(s, xa))
            };
            Ok(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Multivector;
    use crate::special::sphere_area;
    use core::f64::consts::PI;

    #[test]
    fn shell_volume() {
        let dom = Domain::annulus(3, 1.0, 2.0).unwrap();
        let one = CliffordField::constant(Multivector::one(3));
        let v = weighted_inner(&one, &one, &Weight::zero(3), &dom, &QuadratureSpec::default()).unwrap();
        let exact = 4.0 * PI / 3.0 * 7.0;
        assert!((v.value - exact).abs() < 1e-12 * exact);
        assert!((v.value - 29.3215).abs() < 1e-4);
        assert!(v.est_error < 1e-10);
    }

    #[test]
    fn orthogonal_blades() {
        let dom = Domain::annulus(3, 1.0, 2.0).unwrap();
        let a = CliffordField::constant(Multivector::e(3, 1));
        let b = CliffordField::constant(Multivector::e(3, 2));
        let q = QuadratureSpec::new(8, 4);
        assert_eq!(weighted_inner(&a, &b, &Weight::zero(3), &dom, &q).unwrap().value, 0.0);
    }

    #[test]
    fn sphere_second_moment() {
        let r = sphere_rule(3, 20).unwrap();
        let s: f64 = (0..r.len()).map(|i| r.weights()[i] * r.node(i)[0] * r.node(i)[0]).sum();
        assert!((s - 4.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn ball_and_box_volumes() {
        let q = QuadratureSpec::new(16, 6);
        let b = Domain::ball(alloc::vec![0.3, -1.0, 2.0], 0.5).unwrap();
        let v = integrate(&b, &q, |_| 1.0).unwrap();
        assert!((v.value - 4.0 / 3.0 * PI * 0.125).abs() < 1e-13);
        let c = Domain::cube(alloc::vec![0.0, -1.0], alloc::vec![2.0, 1.0]).unwrap();
        let v = integrate(&c, &q, |x| x[0] * x[0]).unwrap();
        assert!((v.value - 16.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn truncation_examples() {
        let w = Weight::log_radial(3).unwrap();
        assert_eq!(truncation_radius(&w, -2.0, 1.0, 1e-8).unwrap(), 7072.0);
        assert_eq!(truncation_radius(&w, -2.0, 1.0, f64::INFINITY).unwrap(), 1.0);
        assert!(matches!(truncation_radius(&w, 0.5, 1.0, 1e-8), Err(Error::NotIntegrable(_))));
        let g = Weight::gaussian(3).unwrap();
        let r = truncation_radius(&g, 4.0, 0.0, 1e-12).unwrap();
        assert!(r <= 10.0 && r > 0.0);
        assert!(tail_bound(&g, 4.0, r).unwrap() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        for m in [1.0, 3.0, 10.0] {
            let v = closed_form_radial(RadialShape::Power(-2.0 / m - 1.0), 1.0, f64::INFINITY).unwrap();
            assert!((v - m / 2.0).abs() < 1e-14);
        }
        for n in 2..=6 {
            let v = closed_form_radial(RadialShape::PowerTimesGaussian(n as f64 + 1.0), 0.0, f64::INFINITY).unwrap();
            assert!((v - gamma(n as f64 / 2.0 + 1.0) / 2.0).abs() < 1e-14);
        }
        assert!((closed_form_radial(RadialShape::Power(2.0), 0.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!(closed_form_radial(RadialShape::Power(-1.0), 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn log_and_inverse_power_maps_agree_with_closed_form() {
        let n = 3;
        let r = 1e6;
        for map in [RadialMap::Auto, RadialMap::InversePower { p: 0.2 }] {
            let dom = Domain::exterior_truncated(n, 1.0, r, 0.0).unwrap();
            let q = QuadratureSpec::new(32, 4).with_radial_map(map);
            // r^{-0.2} * r^{-n}
            let v = integrate(&dom, &q, |x| libm::pow(norm(x), -0.2 - n as f64)).unwrap();
            let exact = sphere_area(n) * closed_form_radial(RadialShape::Power(-1.2), 1.0, r).unwrap();
            assert!((v.value / exact - 1.0).abs() < 1e-12, "{map:?}");
        }
    }

    #[test]
    fn support_containment() {
        let dom = Domain::annulus(2, 1.0, 2.0).unwrap();
        assert!(dom.contains_ball(&Ball { center: alloc::vec![1.5, 0.0], radius: 0.5 }));
        assert!(!dom.contains_ball(&Ball { center: alloc::vec![1.5, 0.0], radius: 0.6 }));
        assert!(Domain::annulus(2, 2.0, 1.0).is_err());
        assert!(Domain::exterior_truncated(2, 0.5, 3.0, 0.0).is_err());
    }
}
