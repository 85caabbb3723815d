//! One-dimensional Gauss rules and product rules on the unit sphere.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::special::gamma;
use crate::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on the three-term recurrence).
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; count];
    let mut w = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(count, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(count, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[count - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[count - 1 - i] = wi;
    }
    if count % 2 == 1 {
        x[count / 2] = 0.0;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss rule for the weight `(1 - t^2)^a` on `[-1, 1]` (Golub-Welsch).
pub fn gauss_gegenbauer(count: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; count];
    let mut off = vec![0.0; count];
    for k in 1..count {
        let kf = k as f64;
        let b2 = kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0));
        off[k] = libm::sqrt(b2);
    }
    let mu0 = libm::sqrt(PI) * gamma(a + 1.0) / gamma(a + 1.5);
    let mut z = vec![0.0; count * count];
    for i in 0..count {
        z[i * count + i] = 1.0;
    }
    tridiagonal_ql(&mut diag, &mut off, &mut z, count);
    let mut pairs: Vec<(f64, f64)> = (0..count)
        .map(|j| (diag[j], mu0 * z[j] * z[j]))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    // symmetrize against rounding
    for i in 0..count / 2 {
        let j = count - 1 - i;
        let t = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-t, w);
        pairs[j] = (t, w);
    }
    if count % 2 == 1 {
        pairs[count / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

// Implicit QL on a symmetric tridiagonal matrix; `off[k]` couples rows k-1 and k.
// Eigenvectors accumulate in the columns of `z` (row-major, only row 0 is used).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Product rule on `S^{n-1}`, exact for polynomials of degree `<= level`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    dim: usize,
    level: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Circle: `level + 1` equispaced points. Higher spheres: `omega = (t, sqrt(1-t^2) omega')`
/// with Gauss-Gegenbauer in `t` for the weight `(1-t^2)^{(n-3)/2}`.
pub fn sphere_rule(n: usize, level: usize) -> Result<SphereRule> {
    crate::algebra::check_dim(n)?;
    if level < 1 {
        return Err(Error::Config("sphere rule level must be at least 1".into()));
    }
    let m = level + 1;
    let mut nodes = Vec::with_capacity(2 * m);
    let mut weights = Vec::with_capacity(m);
    for k in 0..m {
        let th = 2.0 * PI * k as f64 / m as f64;
        nodes.push(libm::cos(th));
        nodes.push(libm::sin(th));
        weights.push(2.0 * PI / m as f64);
    }
    let mut rule = SphereRule {
        dim: 2,
        level,
        nodes,
        weights,
    };
    let count = level / 2 + 1;
    for d in 3..=n {
        let (t, wt) = gauss_gegenbauer(count, (d as f64 - 3.0) / 2.0);
        let mut nodes = Vec::with_capacity(d * t.len() * rule.len());
        let mut weights = Vec::with_capacity(t.len() * rule.len());
        for (ti, wi) in t.iter().zip(&wt) {
            let s = libm::sqrt((1.0 - ti * ti).max(0.0));
            for k in 0..rule.len() {
                nodes.push(*ti);
                nodes.extend(rule.node(k).iter().map(|v| s * v));
                weights.push(wi * rule.weights[k]);
            }
        }
        rule = SphereRule {
            dim: d,
            level,
            nodes,
            weights,
        };
    }
    Ok(rule)
}
