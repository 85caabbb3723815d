//! Cutoff sequence `w_m = chi_m x` approaching the Gaussian constant `1/4`.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::Multivector;
use crate::fields::{adjoint_formal, norm, CliffordField, Weight};
use crate::quadrature::{
    closed_form_radial, integrate_terms, truncation_radius, Domain, QuadratureSpec, RadialMap, RadialShape,
};
use crate::special::sphere_area;
use crate::{Error, Result};

fn smoothstep(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let ds = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        (s, ds)
    }
}

/// `(chi_m(r), r chi_m'(r))`: one on `[2/m, m]`, zero outside `(1/m, 2m)`,
/// quintic smoothstep in `ln r` on the two ramps.
pub fn cutoff(m: f64, r: f64) -> (f64, f64) {
    let l2 = core::f64::consts::LN_2;
    let t = libm::log(r);
    let (up, dup) = smoothstep((t + libm::log(m)) / l2);
    let (down, ddown) = smoothstep((t - libm::log(m)) / l2);
    let chi = up * (1.0 - down);
    let dchi = (dup * (1.0 - down) - up * ddown) / l2;
    (chi, dchi)
}

/// `||x||^2` in `L^2(R^n, e^{-|x|^2})`: `sigma_{n-1} Gamma(n/2 + 1) / 2`.
pub fn x_norm_closed_form(n: usize) -> f64 {
    0.5 * sphere_area(n) * crate::special::gamma(n as f64 / 2.0 + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport {
    pub n: usize,
    pub m: Vec<f64>,
    /// `||w_m||^2 / ||delta w_m||^2`
    pub ratios: Vec<f64>,
    pub est_errors: Vec<f64>,
    /// `|delta w_m - (chi (2r^2 - n) - r chi')|` at the quadrature check points
    pub pointwise_deviation: f64,
    pub x_norm_sq: f64,
    pub x_norm_sq_radial: f64,
    pub x_norm_sq_quadrature: f64,
    pub u0_norm_sq_quadrature: f64,
    /// relative errors of the three checks of `||x||^2` and `||u_0||^2 = 4 ||x||^2`
    pub x_rel_error: f64,
    pub x_radial_rel_error: f64,
    pub u0_rel_error: f64,
    /// nondecreasing within the quadrature error estimates
    pub monotone: bool,
}

fn w_field(n: usize, m: f64) -> CliffordField {
    CliffordField::new(n, move |x| Multivector::vector(x).scale(cutoff(m, norm(x)).0)).with_partials(move |x| {
        let r = norm(x);
        let (chi, dchi) = cutoff(m, r);
        (0..n)
            .map(|j| {
                let mut d = Multivector::vector(x).scale(dchi * x[j] / (r * r));
                d += &Multivector::e(n, j + 1).scale(chi);
                d
            })
            .collect()
    })
}

pub fn sharpness_sequence(n: usize, m_list: &[f64]) -> Result<SharpnessReport> {
    let w = Weight::gaussian(n)?;
    if m_list.is_empty() {
        return Err(Error::Parameter("empty cutoff list".into()));
    }
    let nf = n as f64;
    let mut ratios = Vec::with_capacity(m_list.len());
    let mut est_errors = Vec::with_capacity(m_list.len());
    let mut deviation: f64 = 0.0;
    for &m in m_list {
        if !(m >= 2.0 && m.is_finite()) {
            return Err(Error::Parameter(alloc::format!("cutoff index must be >= 2, got {m}")));
        }
        let field = w_field(n, m);
        let dom = Domain::annulus(n, 1.0 / m, 2.0 * m)?;
        let q = QuadratureSpec::new(48, 4)
            .with_radial_map(RadialMap::Log)
            .with_breakpoints(vec![2.0 / m, m]);
        let v = integrate_terms(&dom, &q, 2, |x, out| {
            let e = libm::exp(-w.phi(x));
            let u = field.try_eval(x)?;
            let d = adjoint_formal(&field, &w, x)?;
            let r = norm(x);
            let (chi, dchi) = cutoff(m, r);
            let expect = chi * (2.0 * r * r - nf) - dchi;
            let mut dev = (d.re() - expect).abs();
            dev = dev.max(libm::sqrt(d.norm_sq() - d.re() * d.re()));
            deviation = deviation.max(dev / (1.0 + expect.abs()));
            out[0] = u.norm_sq() * e;
            out[1] = d.norm_sq() * e;
            Ok(())
        })?;
        let ratio = v[0].value / v[1].value;
        let err = ratio * (v[0].est_error / v[0].value + v[1].est_error / v[1].value);
        ratios.push(ratio);
        est_errors.push(err);
    }
    let monotone = ratios
        .windows(2)
        .zip(est_errors.windows(2))
        .all(|(r, e)| r[1] >= r[0] - (e[0] + e[1]));

    let x_norm_sq = x_norm_closed_form(n);
    let x_norm_sq_radial = sphere_area(n) * closed_form_radial(RadialShape::PowerTimesGaussian(nf + 1.0), 0.0, f64::INFINITY)?;
    let radius = truncation_radius(&w, 4.0, 1.0, 1e-16)?;
    let ball = Domain::ball(vec![0.0; n], radius)?;
    let q = QuadratureSpec::new(64, 8);
    let v = integrate_terms(&ball, &q, 2, |x, out| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let e = libm::exp(-r2);
        out[0] = r2 * e;
        out[1] = (2.0 * r2 - nf) * (2.0 * r2 - nf) * e;
        Ok(())
    })?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    Ok(SharpnessReport {
        n,
        m: m_list.to_vec(),
        ratios,
        est_errors,
        pointwise_deviation: deviation,
        x_norm_sq,
        x_norm_sq_radial,
        x_norm_sq_quadrature: v[0].value,
        u0_norm_sq_quadrature: v[1].value,
        x_rel_error: rel(v[0].value, x_norm_sq),
        x_radial_rel_error: rel(x_norm_sq_radial, x_norm_sq),
        u0_rel_error: rel(v[1].value, 4.0 * x_norm_sq),
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        for m in [2.0, 8.0, 64.0] {
            assert_eq!(cutoff(m, 0.99 / m), (0.0, 0.0));
            assert_eq!(cutoff(m, 2.01 * m), (0.0, 0.0));
            assert_eq!(cutoff(m, 2.0 / m + 1e-9).0, 1.0);
            assert_eq!(cutoff(m, m), (1.0, 0.0));
        }
        // r chi' bounded by 15 / (8 ln 2)
        let c0 = 15.0 / (8.0 * core::f64::consts::LN_2);
        for i in 1..1000 {
            let r = 0.01 * i as f64;
            assert!(cutoff(4.0, r).1.abs() <= c0 + 1e-12);
        }
    }

    #[test]
    fn closed_form_n3() {
        let v = x_norm_closed_form(3);
        assert!((v - 1.5 * libm::pow(core::f64::consts::PI, 1.5)).abs() < 1e-12);
        assert!((v - 8.352_49).abs() < 1e-5);
    }
}
