//! Central-difference Dirac operator on grid fields.
//!
//! A grid field stores `2^n` coefficients per active cell, cell-major.
//! Rows live on interior cells (all `2n` neighbours active); columns on all
//! active cells.

use alloc::vec;
use alloc::vec::Vec;

use super::grid::Grid;
use crate::algebra::{product_sign, Multivector};
use crate::fields::{dirac, CliffordField, Weight};
use crate::sum::pairwise;
use crate::Result;

#[derive(Debug, Clone)]
pub struct DiscreteDirac {
    grid: Grid,
    rows: Vec<usize>,
    /// `2n` active neighbours per row: `(plus, minus)` for each axis
    stencil: Vec<u32>,
    /// `sign[j][a] = product_sign(e_j, a)`
    sign: Vec<Vec<f64>>,
}

pub fn discretize_dirac(grid: &Grid) -> DiscreteDirac {
    let n = grid.dim();
    let rows = grid.interior();
    let mut stencil = Vec::with_capacity(rows.len() * 2 * n);
    for &k in &rows {
        for j in 0..n {
            stencil.push(grid.neighbor(k, j, 1).unwrap() as u32);
            stencil.push(grid.neighbor(k, j, -1).unwrap() as u32);
        }
    }
    let sign = (0..n)
        .map(|j| (0..1u16 << n).map(|a| product_sign(1 << j, a)).collect())
        .collect();
    DiscreteDirac {
        grid: grid.clone(),
        rows,
        stencil,
        sign,
    }
}

impl DiscreteDirac {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn width(&self) -> usize {
        1 << self.grid.dim()
    }

    /// Active-cell indices of the rows.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn row_len(&self) -> usize {
        self.rows.len() * self.width()
    }

    pub fn col_len(&self) -> usize {
        self.grid.active_count() * self.width()
    }

    /// `(A u)` on the rows.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let w = self.width();
        let inv = 0.5 / self.grid.spacing();
        for (r, nb) in self.stencil.chunks_exact(2 * n).enumerate() {
            let o = &mut out[r * w..(r + 1) * w];
            o.fill(0.0);
            for j in 0..n {
                let p = &u[nb[2 * j] as usize * w..][..w];
                let m = &u[nb[2 * j + 1] as usize * w..][..w];
                let bit = 1 << j;
                let s = &self.sign[j];
                for a in 0..w {
                    o[a ^ bit] += s[a] * (p[a] - m[a]) * inv;
                }
            }
        }
    }

    /// `A^T y` on all active cells.
    pub fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let w = self.width();
        let inv = 0.5 / self.grid.spacing();
        out.fill(0.0);
        for (r, nb) in self.stencil.chunks_exact(2 * n).enumerate() {
            let yr = &y[r * w..(r + 1) * w];
            for j in 0..n {
                let bit = 1 << j;
                let s = &self.sign[j];
                let (p, m) = (nb[2 * j] as usize * w, nb[2 * j + 1] as usize * w);
                for a in 0..w {
                    let v = s[a] * yr[a ^ bit] * inv;
                    out[p + a] += v;
                    out[m + a] -= v;
                }
            }
        }
    }

    /// `A u` on every active cell; one-sided second-order differences where a
    /// neighbour is missing, zero where neither side has two cells.
    pub fn apply_full(&self, u: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let n = g.dim();
        let w = self.width();
        let h = g.spacing();
        let mut out = vec![0.0; g.active_count() * w];
        let cell = |k: usize| &u[k * w..(k + 1) * w];
        for k in 0..g.active_count() {
            for j in 0..n {
                let mut d = vec![0.0; w];
                let p1 = g.neighbor(k, j, 1);
                let m1 = g.neighbor(k, j, -1);
                match (p1, m1) {
                    (Some(p), Some(m)) => {
                        for a in 0..w {
                            d[a] = (cell(p)[a] - cell(m)[a]) / (2.0 * h);
                        }
                    }
                    (Some(p), None) => {
                        if let Some(p2) = g.neighbor(p, j, 1) {
                            for a in 0..w {
                                d[a] = (-3.0 * cell(k)[a] + 4.0 * cell(p)[a] - cell(p2)[a]) / (2.0 * h);
                            }
                        }
                    }
                    (None, Some(m)) => {
                        if let Some(m2) = g.neighbor(m, j, -1) {
                            for a in 0..w {
                                d[a] = (3.0 * cell(k)[a] - 4.0 * cell(m)[a] + cell(m2)[a]) / (2.0 * h);
                            }
                        }
                    }
                    (None, None) => {}
                }
                let bit = 1 << j;
                for a in 0..w {
                    out[k * w + (a ^ bit)] += self.sign[j][a] * d[a];
                }
            }
        }
        out
    }

    /// Restriction of a column field to the rows.
    pub fn restrict(&self, u: &[f64]) -> Vec<f64> {
        let w = self.width();
        let mut out = Vec::with_capacity(self.row_len());
        for &k in &self.rows {
            out.extend_from_slice(&u[k * w..(k + 1) * w]);
        }
        out
    }

    /// Zero-extension of a row field to all active cells.
    pub fn extend(&self, y: &[f64]) -> Vec<f64> {
        let w = self.width();
        let mut out = vec![0.0; self.col_len()];
        for (r, &k) in self.rows.iter().enumerate() {
            out[k * w..(k + 1) * w].copy_from_slice(&y[r * w..(r + 1) * w]);
        }
        out
    }
}

/// `W = h^n e^{-phi}` per active cell.
#[derive(Debug, Clone)]
pub struct Mass {
    values: Vec<f64>,
    width: usize,
}

impl Mass {
    pub fn new(grid: &Grid, w: &Weight) -> Self {
        let hn = libm::pow(grid.spacing(), grid.dim() as f64);
        let values = (0..grid.active_count())
            .map(|k| hn * libm::exp(-w.phi(&grid.center(k))))
            .collect();
        Mass {
            values,
            width: 1 << grid.dim(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// `u^T W v` over all active cells.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let w = self.width;
        let terms: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, m)| m * u[k * w..(k + 1) * w].iter().zip(&v[k * w..(k + 1) * w]).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        pairwise(&terms)
    }

    pub fn norm_sq(&self, u: &[f64]) -> f64 {
        self.inner(u, u)
    }

    /// `y^T W y` for a row field.
    pub fn row_norm_sq(&self, a: &DiscreteDirac, y: &[f64]) -> f64 {
        let w = self.width;
        let terms: Vec<f64> = a
            .rows()
            .iter()
            .enumerate()
            .map(|(r, &k)| self.values[k] * y[r * w..(r + 1) * w].iter().map(|v| v * v).sum::<f64>())
            .collect();
        pairwise(&terms)
    }
}

/// Samples a field at the active cell centres.
pub fn sample(grid: &Grid, u: &CliffordField) -> Result<Vec<f64>> {
    let w = 1 << grid.dim();
    let mut out = Vec::with_capacity(grid.active_count() * w);
    for k in 0..grid.active_count() {
        out.extend_from_slice(u.try_eval(&grid.center(k))?.coeffs());
    }
    Ok(out)
}

/// Samples `D u` at the row centres.
pub fn sample_dirac(a: &DiscreteDirac, u: &CliffordField) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(a.row_len());
    for &k in a.rows() {
        let d: Multivector = dirac(u, &a.grid().center(k))?;
        out.extend_from_slice(d.coeffs());
    }
    Ok(out)
}

/// Wide-stencil Laplacian `-A^2 u`, valid on rows whose neighbours are rows.
///
/// Returns `(cells, values)` for those depth-two cells.
pub fn wide_laplacian(a: &DiscreteDirac, u: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let w = a.width();
    let mut au = vec![0.0; a.row_len()];
    a.apply(u, &mut au);
    let mut full = a.extend(&au);
    for v in &mut full {
        *v = -*v;
    }
    let mut a2 = vec![0.0; a.row_len()];
    a.apply(&full, &mut a2);
    let is_row = row_flags(a);
    let g = a.grid();
    let mut cells = Vec::new();
    let mut vals = Vec::new();
    for (r, &k) in a.rows().iter().enumerate() {
        let deep = (0..g.dim()).all(|j| {
            is_row[g.neighbor(k, j, 1).unwrap()] && is_row[g.neighbor(k, j, -1).unwrap()]
        });
        if deep {
            cells.push(k);
            vals.extend_from_slice(&a2[r * w..(r + 1) * w]);
        }
    }
    (cells, vals)
}

/// Compact `2n+1`-point Laplacian on the rows.
pub fn compact_laplacian(a: &DiscreteDirac, u: &[f64]) -> Vec<f64> {
    let g = a.grid();
    let w = a.width();
    let h2 = g.spacing() * g.spacing();
    let mut out = vec![0.0; a.row_len()];
    for (r, &k) in a.rows().iter().enumerate() {
        for j in 0..g.dim() {
            let p = g.neighbor(k, j, 1).unwrap();
            let m = g.neighbor(k, j, -1).unwrap();
            for c in 0..w {
                out[r * w + c] += (u[p * w + c] - 2.0 * u[k * w + c] + u[m * w + c]) / h2;
            }
        }
    }
    out
}

fn row_flags(a: &DiscreteDirac) -> Vec<bool> {
    let mut f = vec![false; a.grid().active_count()];
    for &k in a.rows() {
        f[k] = true;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Multivector;

    fn grid3() -> Grid {
        Grid::cube(vec![-1.0; 3], vec![1.0; 3], 8).unwrap()
    }

    #[test]
    fn transpose_is_adjoint() {
        let g = grid3();
        let a = discretize_dirac(&g);
        let u: Vec<f64> = (0..a.col_len()).map(|i| libm::sin(i as f64 * 0.37)).collect();
        let y: Vec<f64> = (0..a.row_len()).map(|i| libm::cos(i as f64 * 0.11)).collect();
        let mut au = vec![0.0; a.row_len()];
        a.apply(&u, &mut au);
        let mut aty = vec![0.0; a.col_len()];
        a.apply_transpose(&y, &mut aty);
        let l: f64 = au.iter().zip(&y).map(|(p, q)| p * q).sum();
        let r: f64 = u.iter().zip(&aty).map(|(p, q)| p * q).sum();
        assert!((l - r).abs() < 1e-12 * l.abs().max(1.0));
    }

    #[test]
    fn linear_and_constant_fields() {
        let g = grid3();
        let a = discretize_dirac(&g);
        let c = sample(&g, &CliffordField::constant(Multivector::e(3, 2).scale(2.5))).unwrap();
        let full = a.apply_full(&c);
        assert!(full.iter().all(|v| v.abs() < 1e-12));
        let x = sample(&g, &CliffordField::position(3)).unwrap();
        let full = a.apply_full(&x);
        for k in 0..g.active_count() {
            assert!((full[k * 8] + 3.0).abs() < 1e-12);
            assert!(full[k * 8 + 1..k * 8 + 8].iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn mass_is_positive() {
        let g = Grid::annulus(2, 0.5, 2.0, 16).unwrap();
        let m = Mass::new(&g, &Weight::gaussian(2).unwrap());
        assert!(m.values().iter().all(|&v| v > 0.0));
    }
}
