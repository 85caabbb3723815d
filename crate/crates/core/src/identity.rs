//! Term-by-term quadrature checks of the weighted integral identities and
//! the coercive estimates derived from them.
//!
//! Every check integrates over the support ball of the test field (which must
//! lie inside the stated domain), so the integrands are smooth and the
//! boundary terms vanish.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{dot, Multivector};
use crate::fields::{
    bump_field, dirac_from_partials, norm, random_polynomial, Ball, CliffordField, MultiplierChoice, Weight,
    WeightKind,
};
use crate::quadrature::{integrate_terms, Domain, DomainKind, IntegralValue, QuadratureSpec};
use crate::{Error, Result};

/// Floor for the denominator of relative residuals.
pub const SCALE_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub label: String,
    pub value: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Pieces of the left side (signed, summing to `lhs`).
    pub lhs_terms: Vec<Term>,
    /// Pieces of the right side (signed, summing to `rhs`).
    pub terms: Vec<Term>,
    pub abs_residual: f64,
    pub rel_residual: f64,
    /// Sum of the quadrature error estimates of all terms.
    pub est_error: f64,
    /// Coercivity margin where the identity implies an inequality.
    pub margin: Option<f64>,
    /// Derived quantities that are not part of either side.
    pub diagnostics: Vec<Term>,
}

impl IdentityReport {
    fn build(name: &str, lhs_terms: Vec<Term>, terms: Vec<Term>) -> Self {
        let lhs: f64 = lhs_terms.iter().map(|t| t.value).sum();
        let rhs: f64 = terms.iter().map(|t| t.value).sum();
        let est_error = lhs_terms.iter().chain(&terms).map(|t| t.est_error).sum();
        let abs_residual = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs()).max(SCALE_FLOOR);
        IdentityReport {
            name: name.into(),
            lhs,
            rhs,
            lhs_terms,
            terms,
            abs_residual,
            rel_residual: abs_residual / scale,
            est_error,
            margin: None,
            diagnostics: Vec::new(),
        }
    }

    fn with_margin(mut self, m: f64) -> Self {
        self.margin = Some(m);
        self
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.lhs_terms.iter().chain(&self.terms).find(|t| t.label == label).map(|t| t.value)
    }
}

fn term(label: &str, coeff: f64, v: IntegralValue) -> Term {
    Term {
        label: label.into(),
        value: coeff * v.value,
        est_error: coeff.abs() * v.est_error,
    }
}

/// `kappa > (n-2)/n` and `k = (n-2) kappa / (n kappa - (n-2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaK {
    pub n: usize,
    pub kappa: f64,
    pub k: f64,
}

impl KappaK {
    pub fn new(n: usize, kappa: f64) -> Result<Self> {
        crate::algebra::check_dim(n)?;
        let nf = n as f64;
        if !(kappa > (nf - 2.0) / nf) || !kappa.is_finite() {
            return Err(Error::Parameter(format!(
                "kappa must exceed (n-2)/n = {}, got {kappa}",
                (nf - 2.0) / nf
            )));
        }
        let k = (nf - 2.0) * kappa / (nf * kappa - (nf - 2.0));
        Ok(KappaK { n, kappa, k })
    }

    /// `(k - (n-2)/n)(kappa + k) - k^2`
    pub fn relation_residual(&self) -> f64 {
        let nf = self.n as f64;
        (self.k - (nf - 2.0) / nf) * (self.kappa + self.k) - self.k * self.k
    }

    /// Constant in `||u||^2 <= C int |delta u|^2 / (Laplace phi - kappa |grad phi|^2)`.
    pub fn c_kappa(&self) -> f64 {
        1.0 / (1.0 + self.k)
    }
}

/// Pointwise data of `u` and `phi` at one node.
struct Local {
    u: Multivector,
    du: Vec<Multivector>,
    dirac: Multivector,
    grad: Vec<f64>,
    dphi: Multivector,
    lap: f64,
    ew: f64,
}

impl Local {
    fn at(u: &CliffordField, w: &Weight, x: &[f64]) -> Result<Local> {
        let uv = u.eval(x);
        let du = u.partials(x)?;
        let dirac = dirac_from_partials(&du);
        let grad = w.grad(x);
        let dphi = Multivector::vector(&grad);
        Ok(Local {
            u: uv,
            du,
            dirac,
            grad,
            dphi,
            lap: w.laplacian(x),
            ew: libm::exp(-w.phi(x)),
        })
    }

    /// `Du - (D phi) u`
    fn adjoint(&self) -> Multivector {
        &self.dirac - &(&self.dphi * &self.u)
    }

    fn grad_sq(&self) -> f64 {
        self.du.iter().map(|d| d.norm_sq()).sum()
    }
}

/// Integration region for a field supported in `dom`: its support ball.
fn support_region(u: &CliffordField, dom: &Domain) -> Result<Domain> {
    dom.check_support(u)?;
    let b = u.support().expect("checked above");
    Domain::ball(b.center.clone(), b.radius)
}

fn check_weight_dim(u: &CliffordField, w: &Weight, dom: &Domain) -> Result<()> {
    for d in [u.dim(), w.dim()] {
        if d != dom.dim() {
            return Err(Error::DimensionMismatch { left: dom.dim(), right: d });
        }
    }
    Ok(())
}

/// `<delta u, v>_phi = <u, D v>_phi`
pub fn check_adjoint_duality(
    u: &CliffordField,
    v: &CliffordField,
    w: &Weight,
    dom: &Domain,
    q: &QuadratureSpec,
) -> Result<IdentityReport> {
    check_weight_dim(u, w, dom)?;
    dom.check_support(v)?;
    let region = support_region(u, dom)?;
    let t = integrate_terms(&region, q, 2, |x, out| {
        let l = Local::at(u, w, x)?;
        let vv = v.eval(x);
        let dv = dirac_from_partials(&v.partials(x)?);
        out[0] = dot(l.adjoint().coeffs(), vv.coeffs()) * l.ew;
        out[1] = dot(l.u.coeffs(), dv.coeffs()) * l.ew;
        Ok(())
    })?;
    Ok(IdentityReport::build(
        "adjoint_duality",
        vec![term("adjoint_pairing", 1.0, t[0])],
        vec![term("dirac_pairing", 1.0, t[1])],
    ))
}

/// `||delta u||^2 + ||Du||^2 = 2 int sum |d_j u_A|^2 e^{-phi} + int Laplace phi |u|^2 e^{-phi}`
pub fn check_bochner(u: &CliffordField, w: &Weight, dom: &Domain, q: &QuadratureSpec) -> Result<IdentityReport> {
    check_weight_dim(u, w, dom)?;
    let region = support_region(u, dom)?;
    let t = integrate_terms(&region, q, 4, |x, out| {
        let l = Local::at(u, w, x)?;
        out[0] = l.adjoint().norm_sq() * l.ew;
        out[1] = l.dirac.norm_sq() * l.ew;
        out[2] = l.grad_sq() * l.ew;
        out[3] = l.lap * l.u.norm_sq() * l.ew;
        Ok(())
    })?;
    Ok(IdentityReport::build(
        "bochner",
        vec![term("adjoint_norm_sq", 1.0, t[0]), term("dirac_norm_sq", 1.0, t[1])],
        vec![term("gradient_sq", 2.0, t[2]), term("laplacian_mass", 1.0, t[3])],
    ))
}

/// `(1+k)||delta u||^2 = int (Laplace phi - kappa |grad phi|^2)|u|^2 e^{-phi}
/// + int |sqrt(k-(n-2)/n) Du - sqrt(kappa+k) (D phi) u|^2 e^{-phi}
/// + 2 int (sum |d_j u_A|^2 - |Du|^2/n) e^{-phi}`
pub fn check_weighted_identity(
    u: &CliffordField,
    w: &Weight,
    kk: KappaK,
    dom: &Domain,
    q: &QuadratureSpec,
) -> Result<IdentityReport> {
    check_weight_dim(u, w, dom)?;
    if kk.n != dom.dim() {
        return Err(Error::DimensionMismatch { left: dom.dim(), right: kk.n });
    }
    let kk = KappaK::new(kk.n, kk.kappa)?;
    let nf = kk.n as f64;
    let a = libm::sqrt((kk.k - (nf - 2.0) / nf).max(0.0));
    let b = libm::sqrt(kk.kappa + kk.k);
    let region = support_region(u, dom)?;
    let t = integrate_terms(&region, q, 4, |x, out| {
        let l = Local::at(u, w, x)?;
        let g2: f64 = l.grad.iter().map(|g| g * g).sum();
        let mut sq = l.dirac.scale(a);
        sq.axpy(-b, &(&l.dphi * &l.u));
        out[0] = l.adjoint().norm_sq() * l.ew;
        out[1] = (l.lap - kk.kappa * g2) * l.u.norm_sq() * l.ew;
        out[2] = sq.norm_sq() * l.ew;
        out[3] = (l.grad_sq() - l.dirac.norm_sq() / nf) * l.ew;
        Ok(())
    })?;
    Ok(IdentityReport::build(
        "weighted_identity",
        vec![term("adjoint_norm_sq", 1.0 + kk.k, t[0])],
        vec![
            term("curvature_term", 1.0, t[1]),
            term("square_term", 1.0, t[2]),
            term("trace_free_term", 2.0, t[3]),
        ],
    ))
}

/// Minimum over the samples of `sum |d_j u_A|^2 - |Du|^2 / n`, together with
/// the largest `sum |d_j u_A|^2` seen (the scale of the margin).
pub fn check_trace_inequality(u: &CliffordField, samples: &[Vec<f64>]) -> Result<(f64, f64)> {
    let nf = u.dim() as f64;
    let mut min = f64::INFINITY;
    let mut scale: f64 = 0.0;
    for x in samples {
        let du = u.partials(x)?;
        let g: f64 = du.iter().map(|d| d.norm_sq()).sum();
        let m = g - dirac_from_partials(&du).norm_sq() / nf;
        min = min.min(m);
        scale = scale.max(g);
    }
    Ok((min, scale))
}

/// `S_j = sum_k d_k (Y e_k e_j Y)` by central differences.
fn product_derivatives(mult: &MultiplierChoice, x: &[f64]) -> Vec<Multivector> {
    let n = x.len();
    let h = 1e-5 * norm(x).max(1.0);
    let mut out = vec![Multivector::zero(n); n];
    let mut xp = x.to_vec();
    for k in 0..n {
        let ek = Multivector::e(n, k + 1);
        for (sign, off) in [(1.0, h), (-1.0, -h)] {
            xp[k] = x[k] + off;
            let y = mult.y(&xp);
            let yk = &y * &ek;
            for (j, s) in out.iter_mut().enumerate() {
                let m = &(&yk * &Multivector::e(n, j + 1)) * &y;
                s.axpy(sign / (2.0 * h), &m);
            }
        }
        xp[k] = x[k];
    }
    out
}

/// `sum_{j,k} <d_k (Y e_k e_j Y) d_j U, U>_0` integrand.
fn product_derivative_integrand(pd: &[Multivector], duu: &[Multivector], uu: &Multivector) -> f64 {
    pd.iter().zip(duu).map(|(p, d)| dot((p * d).coeffs(), uu.coeffs())).sum()
}

/// `U = u e^{-phi/2}` and `d_j U`.
fn conjugated(l: &Local) -> (Multivector, Vec<Multivector>) {
    let s = libm::sqrt(l.ew);
    let uu = l.u.scale(s);
    let du = l
        .du
        .iter()
        .zip(&l.grad)
        .map(|(d, g)| {
            let mut v = d.scale(s);
            v.axpy(-0.5 * g * s, &l.u);
            v
        })
        .collect();
    (uu, du)
}

/// General multiplier identity with `U = u e^{-phi/2}`:
/// `||delta u||^2 - ||eta U + sum e_j Y d_j U||_0^2 = T1 + T2 + T3 + T4`.
pub fn check_general_identity(
    u: &CliffordField,
    w: &Weight,
    mult: &MultiplierChoice,
    dom: &Domain,
    q: &QuadratureSpec,
) -> Result<IdentityReport> {
    check_weight_dim(u, w, dom)?;
    if mult.dim() != dom.dim() {
        return Err(Error::DimensionMismatch { left: dom.dim(), right: mult.dim() });
    }
    let n = dom.dim();
    let region = support_region(u, dom)?;
    let t = integrate_terms(&region, q, 6, |x, out| {
        let l = Local::at(u, w, x)?;
        let (uu, duu) = conjugated(&l);
        let eta = mult.eta(x);
        let yc = mult.y_components(x);
        let y = Multivector::vector(&yc);
        let y2: f64 = yc.iter().map(|v| v * v).sum();
        if !(eta.is_finite() && y2.is_finite()) {
            return Err(Error::Domain(format!("multiplier {} is singular at {x:?}", mult.name())));
        }
        let mut lead = uu.scale(eta);
        let mut big_du = Multivector::zero(n);
        for (j, d) in duu.iter().enumerate() {
            lead += &(&y * d).left_generator(j + 1);
            big_du += &d.left_generator(j + 1);
        }
        let g2: f64 = l.grad.iter().map(|g| g * g).sum();
        let mut shift = l.dphi.clone();
        shift.axpy(2.0 * eta, &y);
        let t4 = product_derivative_integrand(&product_derivatives(mult, x), &duu, &uu);
        out[0] = l.adjoint().norm_sq() * l.ew;
        out[1] = lead.norm_sq();
        out[2] = (0.25 * g2 - eta * eta - 2.0 * mult.divergence(x) + 0.5 * mult.laplacian_y_sq(x)) * l.u.norm_sq() * l.ew;
        out[3] = -dot(big_du.coeffs(), (&shift * &uu).coeffs());
        out[4] = (1.0 - y2) * duu.iter().map(|d| d.norm_sq()).sum::<f64>();
        out[5] = t4;
        Ok(())
    })?;
    Ok(IdentityReport::build(
        "general_identity",
        vec![term("adjoint_norm_sq", 1.0, t[0]), term("multiplier_norm_sq", -1.0, t[1])],
        vec![
            term("potential_term", 1.0, t[2]),
            term("mixed_dirac_term", 1.0, t[3]),
            term("gradient_defect_term", 1.0, t[4]),
            term("product_derivative_term", 1.0, t[5]),
        ],
    ))
}

fn require_origin_free(u: &CliffordField) -> Result<()> {
    if let Some(b) = u.support() {
        if norm(&b.center) <= b.radius {
            return Err(Error::Precondition("support must avoid the origin".into()));
        }
    }
    Ok(())
}

/// `phi = |x|^m`: `||delta u||^2 = || |x| D((x/|x|^2) u) ||^2 + m^2 int |x|^{m-2}|u|^2 e^{-phi}`.
/// Margin: `||delta u||^2 - m^2 int |x|^{m-2}|u|^2 e^{-phi}`.
pub fn check_radial_identity(u: &CliffordField, m: f64, dom: &Domain, q: &QuadratureSpec) -> Result<IdentityReport> {
    let n = dom.dim();
    let w = Weight::radial_power(n, m)?;
    check_weight_dim(u, &w, dom)?;
    let region = support_region(u, dom)?;
    require_origin_free(u)?;
    let t = integrate_terms(&region, q, 3, |x, out| {
        let l = Local::at(u, &w, x)?;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let xv = Multivector::vector(x);
        // D((x/r^2) u) = sum_j e_j [(e_j / r^2 - 2 x_j x / r^4) u + (x / r^2) d_j u]
        let mut d = Multivector::zero(n);
        for j in 0..n {
            let ej = Multivector::e(n, j + 1);
            let mut c = ej.scale(1.0 / r2);
            c.axpy(-2.0 * x[j] / (r2 * r2), &xv);
            let mut inner = &c * &l.u;
            inner += &(&xv * &l.du[j]).scale(1.0 / r2);
            d += &(&ej * &inner);
        }
        out[0] = l.adjoint().norm_sq() * l.ew;
        out[1] = r2 * d.norm_sq() * l.ew;
        out[2] = m * m * libm::pow(r2, (m - 2.0) / 2.0) * l.u.norm_sq() * l.ew;
        Ok(())
    })?;
    let rep = IdentityReport::build(
        "radial_identity",
        vec![term("adjoint_norm_sq", 1.0, t[0])],
        vec![term("inversion_term", 1.0, t[1]), term("radial_mass", 1.0, t[2])],
    );
    let margin = t[0].value - t[2].value;
    Ok(rep.with_margin(margin))
}

/// `phi = x_1^2`: `||delta u||^2 = ||D(e_1 u)||^2 + 2||u||^2`; margin `||delta u||^2 - 2||u||^2`.
pub fn check_single_quadratic(u: &CliffordField, dom: &Domain, q: &QuadratureSpec) -> Result<IdentityReport> {
    let n = dom.dim();
    let w = Weight::single_quadratic(n)?;
    check_weight_dim(u, &w, dom)?;
    let region = support_region(u, dom)?;
    let e1 = Multivector::e(n, 1);
    let t = integrate_terms(&region, q, 3, |x, out| {
        let l = Local::at(u, &w, x)?;
        let mut d = Multivector::zero(n);
        for (j, dj) in l.du.iter().enumerate() {
            d += &(&(&Multivector::e(n, j + 1) * &e1) * dj);
        }
        out[0] = l.adjoint().norm_sq() * l.ew;
        out[1] = d.norm_sq() * l.ew;
        out[2] = l.u.norm_sq() * l.ew;
        Ok(())
    })?;
    let rep = IdentityReport::build(
        "single_quadratic",
        vec![term("adjoint_norm_sq", 1.0, t[0])],
        vec![term("rotated_dirac_norm_sq", 1.0, t[1]), term("mass", 2.0, t[2])],
    );
    let margin = t[0].value - 2.0 * t[2].value;
    Ok(rep.with_margin(margin))
}

/// `||delta u||^2` and a multiple `c ||u||^2` of the weighted mass.
#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    pub adjoint_norm_sq: f64,
    pub mass: f64,
    pub constant: f64,
    /// `adjoint_norm_sq - constant * mass`
    pub margin: f64,
    pub est_error: f64,
    /// `max_i |a_i - 1|`
    pub max_deviation: f64,
}

/// `phi = sum a_i x_i^2` with `a_i` near 1 and support outside the unit ball:
/// margin `||delta u||^2 - 3||u||^2`.
pub fn check_perturbed_coercivity(
    u: &CliffordField,
    a: &[f64],
    dom: &Domain,
    q: &QuadratureSpec,
) -> Result<CoercivityReport> {
    let w = Weight::aniso_quadratic(a.to_vec())?;
    check_weight_dim(u, &w, dom)?;
    let region = support_region(u, dom)?;
    let b = u.support().expect("checked");
    if norm(&b.center) - b.radius <= 1.0 {
        return Err(Error::Precondition("support must lie in |x| > 1".into()));
    }
    let t = integrate_terms(&region, q, 2, |x, out| {
        let l = Local::at(u, &w, x)?;
        out[0] = l.adjoint().norm_sq() * l.ew;
        out[1] = l.u.norm_sq() * l.ew;
        Ok(())
    })?;
    Ok(CoercivityReport {
        adjoint_norm_sq: t[0].value,
        mass: t[1].value,
        constant: 3.0,
        margin: t[0].value - 3.0 * t[1].value,
        est_error: t[0].est_error + 3.0 * t[1].est_error,
        max_deviation: a.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max),
    })
}

/// Whether `grad phi` vanishes somewhere on the ball (closed-form weights only).
fn gradient_vanishes_on(w: &Weight, b: &Ball) -> bool {
    let c = norm(&b.center);
    match w.kind() {
        WeightKind::LogRadial => false,
        WeightKind::RadialPower { .. } | WeightKind::AnisoQuadratic { .. } => c <= b.radius,
        WeightKind::SingleQuadratic => b.center[0].abs() <= b.radius,
        WeightKind::Custom { .. } => false,
    }
}

/// `||delta u||^2 - ||sum e_j (D phi/|D phi|) d_j u||^2 = int Laplace phi |u|^2 e^{-phi} + T4`.
///
/// With `aux = Some((k, eps))` also reports the auxiliary quantity
/// `k ||delta u||^2 + (1 - eps) int Laplace phi |u|^2 e^{-phi} + T4` and uses as
/// margin `||delta u||^2 - eps / (1 + k) int Laplace phi |u|^2 e^{-phi}`.
pub fn check_general_application(
    u: &CliffordField,
    w: &Weight,
    dom: &Domain,
    q: &QuadratureSpec,
    aux: Option<(f64, f64)>,
) -> Result<IdentityReport> {
    check_weight_dim(u, w, dom)?;
    let region = support_region(u, dom)?;
    if gradient_vanishes_on(w, u.support().expect("checked")) {
        return Err(Error::Domain(format!(
            "gradient of {} vanishes on the support of u",
            w.name()
        )));
    }
    let n = dom.dim();
    let mult = MultiplierChoice::canonical(w);
    let t = integrate_terms(&region, q, 4, |x, out| {
        let l = Local::at(u, w, x)?;
        let g = norm(&l.grad);
        if !(g > 0.0) {
            return Err(Error::Domain(format!("gradient of {} vanishes at {x:?}", w.name())));
        }
        if l.lap < -1e-12 {
            return Err(Error::Precondition(format!("weight is not subharmonic at {x:?}")));
        }
        let y = l.dphi.scale(1.0 / g);
        let mut s = Multivector::zero(n);
        for (j, d) in l.du.iter().enumerate() {
            s += &(&y * d).left_generator(j + 1);
        }
        let (uu, duu) = conjugated(&l);
        let t4 = product_derivative_integrand(&product_derivatives(&mult, x), &duu, &uu);
        out[0] = l.adjoint().norm_sq() * l.ew;
        out[1] = s.norm_sq() * l.ew;
        out[2] = l.lap * l.u.norm_sq() * l.ew;
        out[3] = t4;
        Ok(())
    })?;
    let mut rep = IdentityReport::build(
        "general_application",
        vec![term("adjoint_norm_sq", 1.0, t[0]), term("directional_norm_sq", -1.0, t[1])],
        vec![term("laplacian_mass", 1.0, t[2]), term("product_derivative_term", 1.0, t[3])],
    );
    if let Some((k, eps)) = aux {
        if !(k > 0.0 && eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!("need k > 0 and 0 < eps < 1, got ({k}, {eps})")));
        }
        rep.diagnostics.push(Term {
            label: "auxiliary_value".into(),
            value: k * t[0].value + (1.0 - eps) * t[2].value + t[3].value,
            est_error: k * t[0].est_error + (1.0 - eps) * t[2].est_error + t[3].est_error,
        });
        rep.diagnostics.push(term("implied_bound", eps / (1.0 + k), t[2]));
        rep.margin = Some(t[0].value - eps / (1.0 + k) * t[2].value);
    }
    Ok(rep)
}

/// `n = 2`: `||delta u||^2 = int |(e_1 d_1 - e_2 d_2) u|^2 e^{-phi} + int Laplace phi |u|^2 e^{-phi}`;
/// margin `||delta u||^2 - int Laplace phi |u|^2 e^{-phi}`.
pub fn apriori_2d(u: &CliffordField, w: &Weight, dom: &Domain, q: &QuadratureSpec) -> Result<IdentityReport> {
    if dom.dim() != 2 {
        return Err(Error::Parameter(format!("a priori estimate needs n = 2, got {}", dom.dim())));
    }
    check_weight_dim(u, w, dom)?;
    let region = support_region(u, dom)?;
    let (e1, e2) = (Multivector::e(2, 1), Multivector::e(2, 2));
    let t = integrate_terms(&region, q, 3, |x, out| {
        let l = Local::at(u, w, x)?;
        if l.lap < -1e-12 {
            return Err(Error::Precondition(format!("weight is not subharmonic at {x:?}")));
        }
        let d = &(&e1 * &l.du[0]) - &(&e2 * &l.du[1]);
        out[0] = l.adjoint().norm_sq() * l.ew;
        out[1] = d.norm_sq() * l.ew;
        out[2] = l.lap * l.u.norm_sq() * l.ew;
        Ok(())
    })?;
    let rep = IdentityReport::build(
        "apriori_2d",
        vec![term("adjoint_norm_sq", 1.0, t[0])],
        vec![term("conjugate_dirac_norm_sq", 1.0, t[1]), term("laplacian_mass", 1.0, t[2])],
    );
    let margin = t[0].value - t[2].value;
    Ok(rep.with_margin(margin))
}

/// A random support ball inside `dom`.
pub fn random_ball<R: rand::Rng + ?Sized>(dom: &Domain, rng: &mut R) -> Ball {
    let n = dom.dim();
    let dir = |rng: &mut R| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| crate::rng::normal(rng)).collect();
            let r = norm(&v);
            if r > 1e-3 {
                return v.iter().map(|x| x / r).collect();
            }
        }
    };
    let shell = |r0: f64, r1: f64, rng: &mut R| {
        let half = 0.5 * (r1 - r0);
        let radius = half * rng.random_range(0.5..0.95);
        let c = rng.random_range(r0 + radius..=r1 - radius);
        Ball {
            center: dir(rng).iter().map(|v| c * v).collect(),
            radius,
        }
    };
    match dom.kind() {
        DomainKind::Annulus { r0, r1 } => shell(*r0, *r1, rng),
        DomainKind::ExteriorTruncated { r0, r, .. } => shell(*r0, r.min(r0 + 2.0), rng),
        DomainKind::Box { lo, hi } => {
            let side = lo.iter().zip(hi).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
            let radius = 0.5 * side * rng.random_range(0.5..0.95);
            Ball {
                center: lo.iter().zip(hi).map(|(a, b)| rng.random_range(a + radius..=b - radius)).collect(),
                radius,
            }
        }
        DomainKind::Ball { center, radius } => {
            let rho = radius * rng.random_range(0.3..0.6);
            let off = (radius - rho) * rng.random_range(0.0..1.0);
            Ball {
                center: center.iter().zip(dir(rng)).map(|(c, d)| c + off * d).collect(),
                radius: rho,
            }
        }
    }
}

/// Bump field on a random ball inside `dom` times a random polynomial.
pub fn random_bump<R: rand::Rng + ?Sized>(dom: &Domain, degree: usize, rng: &mut R) -> Result<CliffordField> {
    let b = random_ball(dom, rng);
    let p = random_polynomial(dom.dim(), degree, rng);
    bump_field(&b.center, b.radius, p)
}

/// Two bump fields on one random ball with independent random polynomials.
pub fn random_bump_pair<R: rand::Rng + ?Sized>(
    dom: &Domain,
    degree: usize,
    rng: &mut R,
) -> Result<(CliffordField, CliffordField)> {
    let b = random_ball(dom, rng);
    let p = random_polynomial(dom.dim(), degree, rng);
    let q = random_polynomial(dom.dim(), degree, rng);
    Ok((bump_field(&b.center, b.radius, p)?, bump_field(&b.center, b.radius, q)?))
}

/// The zero field with a declared support ball inside `dom`.
pub fn zero_bump(dom: &Domain) -> Result<CliffordField> {
    let mut rng = crate::rng::trial_rng(0, 0);
    let b = random_ball(dom, &mut rng);
    bump_field(&b.center, b.radius, crate::fields::Polynomial::constant(Multivector::zero(dom.dim())))
}
