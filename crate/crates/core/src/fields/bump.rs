//! Compactly supported test fields: a radial bump times a polynomial.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::poly::{monomials_of_degree, Polynomial};
use super::{dist_sq, Ball, CliffordField};
use crate::algebra::check_dim;
use crate::{Error, Result};

/// `b(t) = exp(-1 / (1 - t^2))` for `|t| < 1`, zero otherwise.
pub fn bump_profile(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        0.0
    } else {
        libm::exp(-1.0 / q)
    }
}

/// `u(x) = b(|x - c| / R) P(x)` with analytic partials and support `B(c, R)`.
pub fn bump_field(center: &[f64], radius: f64, amplitude: Polynomial) -> Result<CliffordField> {
    let n = center.len();
    check_dim(n)?;
    if amplitude.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: amplitude.dim(),
        });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Parameter(alloc::format!(
            "bump radius must be positive, got {radius}"
        )));
    }
    let amp = Arc::new(amplitude);
    let c: Arc<[f64]> = center.into();
    let inv_r2 = 1.0 / (radius * radius);

    let (a1, c1) = (amp.clone(), c.clone());
    let eval = move |x: &[f64]| {
        let b = bump_profile(libm::sqrt(dist_sq(x, &c1) * inv_r2));
        a1.eval(x).scale(b)
    };
    let (a2, c2) = (amp, c.clone());
    let partials = move |x: &[f64]| {
        let s2 = dist_sq(x, &c2) * inv_r2;
        let q = 1.0 - s2;
        let b = if q > 0.0 { libm::exp(-1.0 / q) } else { 0.0 };
        let p = a2.eval(x);
        let dp = a2.partials(x);
        if b == 0.0 {
            return dp.iter().map(|d| d.scale(0.0)).collect::<Vec<_>>();
        }
        // d_j b = b * (-2 / q^2) * (x_j - c_j) / R^2
        let k = -2.0 * b * inv_r2 / (q * q);
        dp.iter()
            .enumerate()
            .map(|(j, d)| {
                let mut out = d.scale(b);
                out.axpy(k * (x[j] - c2[j]), &p);
                out
            })
            .collect()
    };
    Ok(CliffordField::new(n, eval)
        .with_partials(partials)
        .with_support(Ball {
            center: center.to_vec(),
            radius,
        }))
}

/// Random polynomial of total degree at most `degree` with standard normal
/// coefficients in every component.
pub fn random_polynomial<R: rand::Rng + ?Sized>(n: usize, degree: usize, rng: &mut R) -> Polynomial {
    let mut exponents = Vec::new();
    for d in 0..=degree {
        exponents.extend(monomials_of_degree(n, d));
    }
    let coeffs = (0..exponents.len() << n)
        .map(|_| crate::rng::normal(rng))
        .collect();
    Polynomial::from_flat(n, exponents, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Multivector;
    use crate::rng::trial_rng;
    use rand::Rng;

    #[test]
    fn profile_values() {
        assert!((bump_profile(0.0) - libm::exp(-1.0)).abs() < 1e-16);
        assert_eq!(bump_profile(1.0), 0.0);
        assert_eq!(bump_profile(1.5), 0.0);
    }

    #[test]
    fn vanishes_outside_and_rejects_bad_radius() {
        let p = Polynomial::constant(Multivector::one(2));
        let u = bump_field(&[1.0, 1.0], 0.5, p.clone()).unwrap();
        assert_eq!(u.eval(&[1.5, 1.0]), Multivector::zero(2));
        assert_eq!(u.eval(&[3.0, 0.0]), Multivector::zero(2));
        assert!(matches!(bump_field(&[0.0, 0.0], 0.0, p.clone()), Err(Error::Parameter(_))));
        assert!(bump_field(&[0.0, 0.0], -1.0, p).is_err());
    }

    #[test]
    fn analytic_partials_match_central_differences() {
        let mut rng = trial_rng(11, 0);
        for n in 2..=4 {
            let poly = random_polynomial(n, 2, &mut rng);
            let center: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let radius = 0.8;
            let u = bump_field(&center, radius, poly).unwrap();
            let h = 1e-5;
            for _ in 0..20 {
                // interior point with t <= 0.9
                let mut x: Vec<f64>;
                loop {
                    x = center.iter().map(|c| c + rng.random_range(-radius..radius)).collect();
                    if dist_sq(&x, &center) < (0.9 * radius) * (0.9 * radius) {
                        break;
                    }
                }
                let an = u.partials(&x).unwrap();
                let mut xp = x.clone();
                for j in 0..n {
                    xp[j] = x[j] + h;
                    let fp = u.eval(&xp);
                    xp[j] = x[j] - h;
                    let fm = u.eval(&xp);
                    xp[j] = x[j];
                    let fd = (&fp - &fm).scale(0.5 / h);
                    let err = (&fd - &an[j]).norm();
                    let scale = an[j].norm().max(u.eval(&x).norm()).max(1e-3);
                    assert!(err <= 1e-6 * scale, "n={n} j={j} err={err} scale={scale}");
                }
            }
        }
    }

    #[test]
    fn vanishes_with_partials_near_support_sphere() {
        let mut rng = trial_rng(5, 1);
        let n = 3;
        let u = bump_field(&[0.0, 0.0, 1.5], 0.4, random_polynomial(n, 2, &mut rng)).unwrap();
        for k in 0..50 {
            let th = k as f64 * 0.37;
            let dir = [libm::cos(th) * libm::sin(1.1 * th), libm::sin(th) * libm::sin(1.1 * th), libm::cos(1.1 * th)];
            for &t in &[0.995, 1.0, 1.001] {
                let x: Vec<f64> = (0..n).map(|i| [0.0, 0.0, 1.5][i] + 0.4 * t * dir[i]).collect();
                assert!(u.eval(&x).norm() <= 1e-12);
                for p in u.partials(&x).unwrap() {
                    assert!(p.norm() <= 1e-12);
                }
            }
        }
    }
}
