//! The exterior-domain counterexample for `phi = n log|x|` on `|x| > 1`.
//!
//! `u_m = |x|^{-1/m}` solves `D u_m = f_m = -(1/m) |x|^{-1/m-2} x`, and
//! `||u_m||^2 / int |f_m|^2 / Laplace phi e^{-phi} = m^2 n (n-2)` grows without bound.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::Multivector;
use crate::fields::{dirac, norm, CliffordField, Weight};
use crate::quadrature::{
    integrate, sphere_rule, tail_bound, truncation_radius, weighted_inner, weighted_norm_sq, Domain,
    QuadratureSpec, RadialMap,
};
use crate::special::sphere_area;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Crosscheck {
    /// Quadrature values of `||u_m||^2` and `int |f_m|^2 / Laplace phi e^{-phi}`.
    pub values: [f64; 2],
    pub rel_errors: [f64; 2],
    pub est_errors: [f64; 2],
    pub truncation_radius: f64,
    /// `max |D u_m - f_m|` over the sampled points.
    pub dirac_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionResult {
    pub n: usize,
    pub m: u32,
    pub norm_u_sq: f64,
    pub weighted_f_integral: f64,
    pub ratio: f64,
    pub quadrature_crosscheck: Option<Crosscheck>,
    /// Why the cross-check is missing, if it is.
    pub note: Option<String>,
}

fn check_nm(n: usize, m: u32) -> Result<()> {
    crate::algebra::check_dim(n)?;
    if n < 3 {
        return Err(Error::Parameter(
            "the counterexample needs n >= 3: for n = 2, Laplace phi = n(n-2)/|x|^2 = 0".into(),
        ));
    }
    if m == 0 {
        return Err(Error::Parameter("m must be a positive integer".into()));
    }
    Ok(())
}

/// Exact values: `||u_m||^2 = (m/2) sigma`, `int |f_m|^2/Laplace phi e^{-phi} = sigma / (2 m n (n-2))`.
pub fn counterexample_norms(n: usize, m: u32) -> Result<ObstructionResult> {
    check_nm(n, m)?;
    let sigma = sphere_area(n);
    let mf = m as f64;
    let nn = (n * (n - 2)) as f64;
    Ok(ObstructionResult {
        n,
        m,
        norm_u_sq: mf / 2.0 * sigma,
        weighted_f_integral: sigma / (2.0 * mf * nn),
        ratio: (m as u64 * m as u64 * (n * (n - 2)) as u64) as f64,
        quadrature_crosscheck: None,
        note: None,
    })
}

/// `u_m = |x|^{-1/m}` as a scalar field with analytic partials.
pub fn u_m(n: usize, m: u32) -> CliffordField {
    let e = -1.0 / m as f64;
    CliffordField::new(n, move |x| Multivector::scalar(n, libm::pow(norm(x), e))).with_partials(move |x| {
        let r = norm(x);
        let s = e * libm::pow(r, e - 2.0);
        x.iter().map(|v| Multivector::scalar(n, s * v)).collect()
    })
}

/// `f_m = -(1/m) |x|^{-1/m-2} x`.
pub fn f_m(n: usize, m: u32) -> CliffordField {
    let mf = m as f64;
    CliffordField::new(n, move |x| {
        let r = norm(x);
        Multivector::vector(x).scale(-libm::pow(r, -1.0 / mf - 2.0) / mf)
    })
}

/// Rule used for exterior integrals of `u_m`: log panels, or `t = r^{-2/m}` for `m >= 10`.
fn exterior_spec(m: u32) -> QuadratureSpec {
    let q = QuadratureSpec::new(64, 4);
    if m >= 10 {
        q.with_radial_map(RadialMap::InversePower { p: 2.0 / m as f64 })
    } else {
        q
    }
}

/// Recomputes both integrals by quadrature on `1 <= |x| <= R(tol)` and checks
/// `D u_m = f_m` (finite differences) at 50 points with `1 < |x| < 5`.
pub fn counterexample_quadrature_crosscheck(n: usize, m: u32, tol: f64) -> Result<ObstructionResult> {
    let mut out = counterexample_norms(n, m)?;
    let w = Weight::log_radial(n)?;
    let decay = -2.0 / m as f64;
    let r = match truncation_radius(&w, decay, 1.0, tol) {
        Ok(r) => r,
        Err(e) => {
            out.note = Some(format!("cross-check skipped: {e}"));
            return Ok(out);
        }
    };
    let sigma = sphere_area(n);
    let tail = sigma * tail_bound(&w, decay, r)?;
    let dom = Domain::exterior_truncated(n, 1.0, r, tail)?;
    let q = exterior_spec(m);
    let u = u_m(n, m);
    let f = f_m(n, m);
    let nu = weighted_norm_sq(&u, &w, &dom, &q)?;
    let nf = integrate(&dom, &q, |x| f.eval(x).norm_sq() / w.laplacian(x) * libm::exp(-w.phi(x)))?;
    let values = [nu.value, nf.value];
    let exact = [out.norm_u_sq, out.weighted_f_integral];

    let mut rng = crate::rng::trial_rng(m as u64, n as u64);
    let fd = u.clone().without_partials();
    let mut res: f64 = 0.0;
    for _ in 0..50 {
        let x = random_shell_point(n, 1.0, 5.0, &mut rng);
        let d = dirac(&fd, &x)?;
        res = res.max((&d - &f.eval(&x)).norm());
    }
    out.quadrature_crosscheck = Some(Crosscheck {
        values,
        rel_errors: [
            (values[0] - exact[0]).abs() / exact[0],
            (values[1] - exact[1]).abs() / exact[1],
        ],
        est_errors: [nu.est_error, nf.est_error],
        truncation_radius: r,
        dirac_residual: res,
    });
    Ok(out)
}

fn random_shell_point<R: rand::Rng + ?Sized>(n: usize, r0: f64, r1: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| crate::rng::normal(rng)).collect();
        let s = norm(&v);
        if s > 1e-3 {
            let r = rng.random_range(r0..r1);
            return v.iter().map(|x| r * x / s).collect();
        }
    }
}

/// Growth exponent of `sup |h|` between the spheres of radius 10 and 100.
fn growth_exponent(h: &CliffordField) -> Result<f64> {
    let s1 = sphere_sup(h, 10.0, 8)?;
    let s2 = sphere_sup(h, 100.0, 8)?;
    if s1 == 0.0 && s2 == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(libm::log10(s2 / s1))
}

/// `|<u_m, h>_phi| / (||u_m||_phi ||h||_phi)` on the exterior domain, truncated at `R(tol)`.
/// Rejects `h` that do not decay (a polynomial part makes `h` non-integrable).
pub fn orthogonality_check(n: usize, m: u32, h: &CliffordField, tol: f64) -> Result<f64> {
    check_nm(n, m)?;
    if h.dim() != n {
        return Err(Error::DimensionMismatch { left: n, right: h.dim() });
    }
    let g = growth_exponent(h)?;
    if g > -0.5 {
        return Err(Error::Parameter(format!(
            "h grows like |x|^{g:.2}; it has a polynomial part and is not in the weighted space"
        )));
    }
    let w = Weight::log_radial(n)?;
    // |u_m h| e^{-phi} r^{n-1} <= C r^{-1/m - n}; |h|^2 decays at least as fast
    let r = truncation_radius(&w, -1.0 / m as f64 - (n as f64 - 1.0), 1.0, tol)?;
    let dom = Domain::exterior_truncated(n, 1.0, r, 0.0)?;
    let q = QuadratureSpec::new(64, 12);
    let u = u_m(n, m);
    let pair = weighted_inner(&u, h, &w, &dom, &q)?;
    let hn = weighted_norm_sq(h, &w, &dom, &q)?;
    let un = counterexample_norms(n, m)?.norm_u_sq;
    if hn.value == 0.0 {
        return Ok(0.0);
    }
    Ok(pair.value.abs() / libm::sqrt(un * hn.value))
}

/// `|int_{S^{n-1}} Re h(r omega) dS(omega)|`.
pub fn spherical_mean_zero(h: &CliffordField, r: f64) -> Result<f64> {
    let rule = sphere_rule(h.dim(), 16)?;
    let mut vals = Vec::with_capacity(rule.len());
    let mut x = alloc::vec![0.0; h.dim()];
    for i in 0..rule.len() {
        for (xd, o) in x.iter_mut().zip(rule.node(i)) {
            *xd = r * o;
        }
        vals.push(rule.weights()[i] * h.try_eval(&x)?.re());
    }
    Ok(crate::sum::pairwise(&vals).abs())
}

/// `max |h|` over the nodes of a sphere rule on the sphere of radius `r`.
pub fn sphere_sup(h: &CliffordField, r: f64, level: usize) -> Result<f64> {
    let rule = sphere_rule(h.dim(), level)?;
    let mut x = alloc::vec![0.0; h.dim()];
    let mut sup: f64 = 0.0;
    for i in 0..rule.len() {
        for (xd, o) in x.iter_mut().zip(rule.node(i)) {
            *xd = r * o;
        }
        sup = sup.max(h.try_eval(&x)?.norm());
    }
    Ok(sup)
}
