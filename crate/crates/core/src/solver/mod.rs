//! Discrete weighted minimal-norm solutions of `Du = f` and `Laplace u = f`.
//!
//! The minimal `W`-norm solution of `A u = f` is `u = W^{-1} A^T lambda` with
//! `(A W^{-1} A^T) lambda = f`, solved by Jacobi-preconditioned CG.

mod grid;
mod operator;
mod sharpness;

pub use grid::{Grid, GridShape};
pub use operator::{
    compact_laplacian, discretize_dirac, sample, sample_dirac, wide_laplacian, DiscreteDirac, Mass,
};
pub use sharpness::{cutoff, sharpness_sequence, x_norm_closed_form, SharpnessReport};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::Multivector;
use crate::fields::{CliffordField, Weight, WeightKind};
use crate::sum::pairwise;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// `||A u - f||_W / ||f||_W` over the rows
    pub residual: f64,
    /// `||u||_W^2 / ||f||_W^2`
    pub norm_ratio: f64,
    pub iterations: usize,
    pub h: f64,
    pub bound_expected: Option<f64>,
    pub converged: bool,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative residual target of the dual CG.
    pub tol: f64,
    /// Iteration cap; `None` means ten times the unknown count.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

/// The continuous constant `C` in `||u||^2 <= C ||f||^2` for the built-in weights.
pub fn bound_for_weight(w: &Weight) -> Option<f64> {
    match w.kind() {
        WeightKind::RadialPower { m } if *m == 2.0 => Some(0.25),
        WeightKind::SingleQuadratic => Some(0.5),
        WeightKind::AnisoQuadratic { .. } => Some(1.0 / 3.0),
        _ => None,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let t: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise(&t)
}

/// Minimal `W`-norm solution of `A u = f`; `f` lives on the rows of `A`.
pub fn minimal_norm_solve(
    a: &DiscreteDirac,
    f: &[f64],
    mass: &Mass,
    bound_expected: Option<f64>,
    opts: SolveOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let rows = a.row_len();
    let cols = a.col_len();
    if f.len() != rows {
        return Err(Error::DimensionMismatch { left: rows, right: f.len() });
    }
    if mass.values().len() * a.width() != cols {
        return Err(Error::DimensionMismatch {
            left: cols,
            right: mass.values().len() * a.width(),
        });
    }
    let w = a.width();
    let inv_mass: Vec<f64> = mass.values().iter().map(|m| 1.0 / m).collect();
    let h = a.grid().spacing();
    let report = |residual, norm_ratio, iterations, converged, diagnostic| SolveReport {
        residual,
        norm_ratio,
        iterations,
        h,
        bound_expected,
        converged,
        diagnostic,
    };

    let f_norm = libm::sqrt(dot(f, f));
    if f_norm == 0.0 {
        return Ok((vec![0.0; cols], report(0.0, 0.0, 0, true, None)));
    }

    // Jacobi diagonal of A W^{-1} A^T
    let g = a.grid();
    let c = 0.25 / (h * h);
    let mut diag = Vec::with_capacity(rows);
    for &k in a.rows() {
        let mut d = 0.0;
        for j in 0..g.dim() {
            d += inv_mass[g.neighbor(k, j, 1).unwrap()] + inv_mass[g.neighbor(k, j, -1).unwrap()];
        }
        diag.extend(core::iter::repeat(c * d).take(w));
    }

    let mut u = vec![0.0; cols];
    let apply_m = |p: &[f64], out: &mut [f64], u: &mut Vec<f64>| {
        a.apply_transpose(p, u);
        for (k, im) in inv_mass.iter().enumerate() {
            for v in &mut u[k * w..(k + 1) * w] {
                *v *= im;
            }
        }
        a.apply(u, out);
    };

    let max_iter = opts.max_iter.unwrap_or(10 * rows);
    let target = opts.tol * f_norm;
    let mut lambda = vec![0.0; rows];
    let mut r = f.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut mp = vec![0.0; rows];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let mut converged = false;
    let mut diagnostic = None;
    while iterations < max_iter {
        if libm::sqrt(dot(&r, &r)) <= target {
            converged = true;
            break;
        }
        apply_m(&p, &mut mp, &mut u);
        let pmp = dot(&p, &mp);
        if !(pmp > 0.0) {
            diagnostic = Some(format!("CG breakdown at iteration {iterations}: p^T M p = {pmp:e}"));
            break;
        }
        let alpha = rz / pmp;
        for i in 0..rows {
            lambda[i] += alpha * p[i];
            r[i] -= alpha * mp[i];
        }
        for i in 0..rows {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..rows {
            p[i] = z[i] + beta * p[i];
        }
        iterations += 1;
    }
    if !converged && libm::sqrt(dot(&r, &r)) <= target {
        converged = true;
    }
    if !converged && diagnostic.is_none() {
        diagnostic = Some(format!(
            "CG stagnated after {iterations} iterations, relative residual {:e}",
            libm::sqrt(dot(&r, &r)) / f_norm
        ));
    }

    a.apply_transpose(&lambda, &mut u);
    for (k, im) in inv_mass.iter().enumerate() {
        for v in &mut u[k * w..(k + 1) * w] {
            *v *= im;
        }
    }
    let mut au = vec![0.0; rows];
    a.apply(&u, &mut au);
    let diff: Vec<f64> = au.iter().zip(f).map(|(x, y)| x - y).collect();
    let f_w = mass.row_norm_sq(a, f);
    let residual = libm::sqrt(mass.row_norm_sq(a, &diff) / f_w);
    let ratio = mass.norm_sq(&u) / f_w;
    Ok((u, report(residual, ratio, iterations, converged, diagnostic)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReport {
    pub first: SolveReport,
    pub second: SolveReport,
    /// `||u||_W^2 / ||f||_W^2`
    pub norm_ratio: f64,
    pub bound_expected: f64,
    /// `||-A^2 u - f|| / ||f||` on cells two steps inside the mask
    pub laplacian_residual: f64,
    /// Same cells with the compact `2n+1`-point Laplacian.
    pub compact_laplacian_residual: f64,
}

/// `v = A^+ f`, `u = A^+ (-v)`, so `-A^2 u = f` away from the mask boundary.
pub fn poisson_solve(
    a: &DiscreteDirac,
    f: &[f64],
    mass: &Mass,
    opts: SolveOptions,
) -> Result<(Vec<f64>, PoissonReport)> {
    let (v, first) = minimal_norm_solve(a, f, mass, Some(0.25), opts)?;
    let minus_v: Vec<f64> = a.restrict(&v).iter().map(|x| -x).collect();
    let (u, second) = minimal_norm_solve(a, &minus_v, mass, Some(0.25), opts)?;
    let f_w = mass.row_norm_sq(a, f);
    let norm_ratio = if f_w == 0.0 { 0.0 } else { mass.norm_sq(&u) / f_w };

    let wdt = a.width();
    let (cells, lap) = wide_laplacian(a, &u);
    let row_of = row_index(a);
    let mut num = Vec::with_capacity(lap.len());
    let mut den = Vec::with_capacity(lap.len());
    for (i, &k) in cells.iter().enumerate() {
        let r = row_of[k];
        for c in 0..wdt {
            let fv = f[r * wdt + c];
            num.push((lap[i * wdt + c] - fv) * (lap[i * wdt + c] - fv));
            den.push(fv * fv);
        }
    }
    let laplacian_residual = rel(pairwise(&num), pairwise(&den));
    let compact = compact_laplacian(a, &u);
    let mut cnum = Vec::with_capacity(lap.len());
    for &k in &cells {
        let r = row_of[k];
        for c in 0..wdt {
            let d = compact[r * wdt + c] - f[r * wdt + c];
            cnum.push(d * d);
        }
    }
    let compact_laplacian_residual = rel(pairwise(&cnum), pairwise(&den));
    Ok((
        u,
        PoissonReport {
            first,
            second,
            norm_ratio,
            bound_expected: 1.0 / 16.0,
            laplacian_residual,
            compact_laplacian_residual,
        },
    ))
}

fn rel(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        libm::sqrt(num)
    } else {
        libm::sqrt(num / den)
    }
}

fn row_index(a: &DiscreteDirac) -> Vec<usize> {
    let mut idx = vec![usize::MAX; a.grid().active_count()];
    for (r, &k) in a.rows().iter().enumerate() {
        idx[k] = r;
    }
    idx
}

/// `||A g - (Dg)_h||_W / ||(Dg)_h||_W` over the rows.
pub fn consistency_error(a: &DiscreteDirac, mass: &Mass, g: &CliffordField) -> Result<f64> {
    let gs = sample(a.grid(), g)?;
    let exact = sample_dirac(a, g)?;
    let mut ag = vec![0.0; a.row_len()];
    a.apply(&gs, &mut ag);
    let diff: Vec<f64> = ag.iter().zip(&exact).map(|(x, y)| x - y).collect();
    Ok(rel(mass.row_norm_sq(a, &diff), mass.row_norm_sq(a, &exact)))
}

/// Max-norm error of `A g` against `D g` over the rows.
pub fn max_consistency_error(a: &DiscreteDirac, g: &CliffordField) -> Result<f64> {
    let gs = sample(a.grid(), g)?;
    let exact = sample_dirac(a, g)?;
    let mut ag = vec![0.0; a.row_len()];
    a.apply(&gs, &mut ag);
    Ok(ag.iter().zip(&exact).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// `g(x) = e^{-|x - c|^2} (1 + x_1 e_2)`, smooth and rapidly decaying.
pub fn gaussian_packet(center: &[f64]) -> Result<CliffordField> {
    let n = center.len();
    crate::algebra::check_dim(n)?;
    let c: Vec<f64> = center.to_vec();
    let c2 = c.clone();
    let env = move |c: &[f64], x: &[f64]| -> f64 {
        libm::exp(-x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
    };
    let amp = move |x: &[f64]| {
        let mut m = Multivector::scalar(n, 1.0);
        m += &Multivector::e(n, 2).scale(x[0]);
        m
    };
    Ok(CliffordField::new(n, move |x| amp(x).scale(env(&c, x))).with_partials(move |x| {
        let e = env(&c2, x);
        (0..n)
            .map(|j| {
                let mut d = amp(x).scale(-2.0 * (x[j] - c2[j]) * e);
                if j == 0 {
                    d += &Multivector::e(n, 2).scale(e);
                }
                d
            })
            .collect()
    }))
}

/// Observed orders `log2(e_k / e_{k+1})` over successive halvings of `h`.
pub fn convergence_orders(grid: &Grid, g: &CliffordField, levels: usize) -> Result<Vec<f64>> {
    let mut errs = Vec::with_capacity(levels);
    let mut gr = grid.clone();
    for l in 0..levels {
        if l > 0 {
            gr = gr.refined()?;
        }
        errs.push(max_consistency_error(&discretize_dirac(&gr), g)?);
    }
    Ok(errs.windows(2).map(|e| libm::log2(e[0] / e[1])).collect())
}

/// One refinement level of [`refinement_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub cells_per_axis: usize,
    pub active_cells: usize,
    pub delta_h: f64,
    pub solve: SolveReport,
    pub poisson: Option<PoissonReport>,
    /// `||u||_W <= ||g||_W` for the generating field `g`
    pub minimal: bool,
}

/// Solves `A u = A g` on `levels` successive halvings of `grid`.
pub fn refinement_study(
    grid: &Grid,
    w: &Weight,
    g: &CliffordField,
    levels: usize,
    poisson: bool,
    opts: SolveOptions,
) -> Result<Vec<LevelReport>> {
    if levels == 0 {
        return Err(Error::Parameter("at least one refinement level is needed".into()));
    }
    let bound = bound_for_weight(w);
    let mut out = Vec::with_capacity(levels);
    let mut gr = grid.clone();
    for l in 0..levels {
        if l > 0 {
            gr = gr.refined()?;
        }
        let a = discretize_dirac(&gr);
        let mass = Mass::new(&gr, w);
        let gs = sample(&gr, g)?;
        let mut f = vec![0.0; a.row_len()];
        a.apply(&gs, &mut f);
        let delta_h = consistency_error(&a, &mass, g)?;
        let (u, solve) = minimal_norm_solve(&a, &f, &mass, bound, opts)?;
        let minimal = mass.norm_sq(&u) <= mass.norm_sq(&gs) * (1.0 + 1e-12);
        let poisson = if poisson {
            Some(poisson_solve(&a, &f, &mass, opts)?.1)
        } else {
            None
        };
        let cells_per_axis = match gr.shape() {
            GridShape::Annulus { r1, .. } => libm::round(2.0 * r1 / gr.spacing()) as usize,
            GridShape::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| libm::round((b - a) / gr.spacing()) as usize)
                .max()
                .unwrap_or(0),
        };
        out.push(LevelReport {
            cells_per_axis,
            active_cells: gr.active_count(),
            delta_h,
            solve,
            poisson,
            minimal,
        });
    }
    Ok(out)
}
