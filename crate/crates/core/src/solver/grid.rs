//! Cell-centred grids with an active-cell mask.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::check_dim;
use crate::fields::norm;
use crate::{Error, Result};

const INACTIVE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub enum GridShape {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `r0 <= |x| <= r1` inside the box `[-r1, r1]^n`
    Annulus { r0: f64, r1: f64 },
}

#[derive(Debug, Clone)]
pub struct Grid {
    dim: usize,
    shape: GridShape,
    h: f64,
    origin: Vec<f64>,
    counts: Vec<usize>,
    /// box cell -> active index or `INACTIVE`
    index: Vec<u32>,
    /// active index -> box cell
    cells: Vec<usize>,
}

impl Grid {
    /// `cells` cells along the longest box side; the spacing is uniform.
    pub fn new(n: usize, shape: GridShape, cells: usize) -> Result<Self> {
        check_dim(n)?;
        let (lo, hi) = match &shape {
            GridShape::Box { lo, hi } => {
                if lo.len() != n || hi.len() != n {
                    return Err(Error::DimensionMismatch { left: n, right: lo.len().min(hi.len()) });
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return Err(Error::Parameter("grid box needs lo < hi".into()));
                }
                (lo.clone(), hi.clone())
            }
            GridShape::Annulus { r0, r1 } => {
                if !(*r0 >= 0.0 && r0 < r1) {
                    return Err(Error::Parameter(format!("annulus grid needs 0 <= r0 < r1, got ({r0}, {r1})")));
                }
                (vec![-r1; n], vec![*r1; n])
            }
        };
        let side = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
        let h = side / cells as f64;
        let counts: Vec<usize> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| libm::round((b - a) / h).max(1.0) as usize)
            .collect();
        let total: usize = counts.iter().product();
        if total > u32::MAX as usize / 2 {
            return Err(Error::Config(format!("grid with {total} cells is too large")));
        }
        let mut grid = Grid {
            dim: n,
            shape,
            h,
            origin: lo,
            counts,
            index: vec![INACTIVE; total],
            cells: Vec::new(),
        };
        let mut x = vec![0.0; n];
        for c in 0..total {
            grid.center_into(c, &mut x);
            let active = match &grid.shape {
                GridShape::Box { .. } => true,
                GridShape::Annulus { r0, r1 } => {
                    let r = norm(&x);
                    r >= *r0 && r <= *r1
                }
            };
            if active {
                grid.index[c] = grid.cells.len() as u32;
                grid.cells.push(c);
            }
        }
        for axis in 0..n {
            if grid.max_run(axis) < 3 {
                return Err(Error::Config(format!(
                    "fewer than 3 active cells along axis {}",
                    axis + 1
                )));
            }
        }
        Ok(grid)
    }

    pub fn annulus(n: usize, r0: f64, r1: f64, cells: usize) -> Result<Self> {
        Self::new(n, GridShape::Annulus { r0, r1 }, cells)
    }

    pub fn cube(lo: Vec<f64>, hi: Vec<f64>, cells: usize) -> Result<Self> {
        let n = lo.len();
        Self::new(n, GridShape::Box { lo, hi }, cells)
    }

    /// Same shape with half the spacing.
    pub fn refined(&self) -> Result<Self> {
        let cells = self.counts.iter().copied().max().unwrap_or(1) * 2;
        Self::new(self.dim, self.shape.clone(), cells)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn active_count(&self) -> usize {
        self.cells.len()
    }

    fn max_run(&self, axis: usize) -> usize {
        let mut best = 0;
        for &c in &self.cells {
            let mut len = 1;
            let mut cur = c;
            while let Some(nb) = self.step(cur, axis, 1) {
                if self.index[nb] == INACTIVE {
                    break;
                }
                len += 1;
                cur = nb;
                if len >= 3 {
                    return 3;
                }
            }
            best = best.max(len);
        }
        best
    }

    /// Box cell one step along `axis` (`dir = +-1`), if inside the box.
    fn step(&self, cell: usize, axis: usize, dir: i32) -> Option<usize> {
        let mut stride = 1;
        for a in (axis + 1)..self.dim {
            stride *= self.counts[a];
        }
        let i = (cell / stride) % self.counts[axis];
        if dir > 0 && i + 1 < self.counts[axis] {
            Some(cell + stride)
        } else if dir < 0 && i > 0 {
            Some(cell - stride)
        } else {
            None
        }
    }

    fn center_into(&self, cell: usize, x: &mut [f64]) {
        let mut rem = cell;
        for a in (0..self.dim).rev() {
            let i = rem % self.counts[a];
            rem /= self.counts[a];
            x[a] = self.origin[a] + (i as f64 + 0.5) * self.h;
        }
    }

    /// Centre of active cell `k`.
    pub fn center(&self, k: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        self.center_into(self.cells[k], &mut x);
        x
    }

    /// Active index of the neighbour of active cell `k` along `axis`.
    pub fn neighbor(&self, k: usize, axis: usize, dir: i32) -> Option<usize> {
        let nb = self.step(self.cells[k], axis, dir)?;
        let i = self.index[nb];
        if i == INACTIVE {
            None
        } else {
            Some(i as usize)
        }
    }

    /// Active cells with all `2n` neighbours active.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.active_count())
            .filter(|&k| (0..self.dim).all(|a| self.neighbor(k, a, 1).is_some() && self.neighbor(k, a, -1).is_some()))
            .collect()
    }
}
