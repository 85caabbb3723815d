//! Kelvin transform for left monogenic functions: `(Kg)(x) = x |x|^{-n} g(x / |x|^2)`.

use alloc::vec::Vec;

use super::CliffordField;
use crate::algebra::Multivector;

fn inversion(x: &[f64]) -> (f64, Vec<f64>) {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (r2, x.iter().map(|v| v / r2).collect())
}

/// Kelvin transform of `g`. Singular at the origin (evaluations there are not
/// finite, so checked evaluation reports a domain error).
///
/// Partials use the chain rule when `g` has analytic partials and fall back
/// to finite differences otherwise.
pub fn kelvin(g: &CliffordField) -> CliffordField {
    let n = g.dim();
    let nf = n as f64;
    let g1 = g.clone();
    let eval = move |x: &[f64]| {
        let (r2, y) = inversion(x);
        let j = Multivector::vector(x).scale(libm::pow(r2, -nf / 2.0));
        &j * &g1.eval(&y)
    };
    let out = CliffordField::new(n, eval);
    if !g.has_analytic_partials() {
        return out;
    }
    let g2 = g.clone();
    out.with_partials(move |x| {
        let (r2, y) = inversion(x);
        let rn = libm::pow(r2, -nf / 2.0);
        let xv = Multivector::vector(x);
        let jx = xv.scale(rn);
        let gy = g2.eval(&y);
        let gj = match g2.partials(&y) {
            Ok(p) => p,
            Err(_) => return (0..n).map(|_| Multivector::scalar(n, f64::NAN)).collect(),
        };
        // sum_j g_j(y) d_i y_j, with d_i y_j = delta_ij / r^2 - 2 x_i x_j / r^4
        let mut sum_xg = Multivector::zero(n);
        for (j, p) in gj.iter().enumerate() {
            sum_xg.axpy(x[j], p);
        }
        (0..n)
            .map(|i| {
                // d_i J = e_i r^{-n} - n x_i r^{-n-2} x
                let mut dj = Multivector::e(n, i + 1).scale(rn);
                dj.axpy(-nf * x[i] * rn / r2, &xv);
                let mut chain = gj[i].scale(1.0 / r2);
                chain.axpy(-2.0 * x[i] / (r2 * r2), &sum_xg);
                &(&dj * &gy) + &(&jx * &chain)
            })
            .collect()
    })
}
