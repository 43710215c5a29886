//! Cell-mean storage.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Per-cell values at one time level, row-major (`k = j * nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl CellField {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self::constant(nx, ny, 0.0)
    }

    pub fn constant(nx: usize, ny: usize, value: f64) -> Self {
        Self {
            nx,
            ny,
            data: vec![value; nx * ny],
        }
    }

    pub fn from_vec(nx: usize, ny: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nx * ny {
            return Err(Error::ShapeMismatch {
                expected: (nx, ny),
                got: (data.len(), 1),
            });
        }
        Ok(Self { nx, ny, data })
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.num_cells());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                data.push(f(i, j));
            }
        }
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            data,
        }
    }

    pub fn on_grid(grid: &Grid, value: f64) -> Self {
        Self::constant(grid.nx(), grid.ny(), value)
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[j * self.nx + i] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.shape() != grid.shape() {
            return Err(Error::ShapeMismatch {
                expected: grid.shape(),
                got: self.shape(),
            });
        }
        Ok(())
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ ū_K |K|`, summed in storage order.
    pub fn mass(&self, grid: &Grid) -> f64 {
        self.data.iter().sum::<f64>() * grid.cell_area()
    }

    /// `self + scale * other`, elementwise.
    pub fn axpy(&self, scale: f64, other: &CellField) -> CellField {
        debug_assert_eq!(self.shape(), other.shape());
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + scale * b).collect();
        CellField {
            nx: self.nx,
            ny: self.ny,
            data,
        }
    }

    /// `wa * a + wb * b`, elementwise.
    pub fn combine(wa: f64, a: &CellField, wb: f64, b: &CellField) -> CellField {
        debug_assert_eq!(a.shape(), b.shape());
        let data = a.data.iter().zip(&b.data).map(|(x, y)| wa * x + wb * y).collect();
        CellField {
            nx: a.nx,
            ny: a.ny,
            data,
        }
    }
}

impl std::ops::Index<usize> for CellField {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.data[k]
    }
}

impl std::ops::IndexMut<usize> for CellField {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.data[k]
    }
}
