use std::ops::{Index, IndexMut};

use crate::geometry::GridSpec;

/// Scalar values on every node of the computational square.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: GridSpec, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.side() {
            for j in 0..grid.side() {
                let [x, y] = grid.coords(i, j);
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "grid function size mismatch");
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    pub fn fill(&mut self, v: f64) {
        self.values.fill(v);
    }

    /// Largest absolute value over the nodes selected by `keep`.
    pub fn max_abs_where<F: Fn(usize) -> bool>(&self, keep: F) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(k, _)| keep(*k))
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_where(|_| true)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &GridFunction) {
        assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }
}

impl Index<usize> for GridFunction {
    type Output = f64;
    #[inline]
    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

impl IndexMut<usize> for GridFunction {
    #[inline]
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.values[k]
    }
}
