use crate::error::{Error, Result};

/// Vertex-centered uniform grid on the square `[-1, 1]^2` with `N` cells per axis.
///
/// Node `(i, j)` sits at `(x, y) = (-1 + j h, -1 + i h)`: `i` runs along `y`,
/// `j` along `x`. Values are stored row-major in `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    h: f64,
}

pub fn build_grid(n: usize) -> Result<GridSpec> {
    GridSpec::new(n)
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "grid size N must be even and at least 4, got {n}"
            )));
        }
        Ok(Self {
            n,
            h: 2.0 / n as f64,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Nodes per axis, `N + 1`.
    #[inline]
    pub fn side(&self) -> usize {
        self.n + 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.side() + j
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx / self.side(), idx % self.side())
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -1.0 + j as f64 * self.h
    }

    #[inline]
    pub fn y(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.h
    }

    #[inline]
    pub fn coords(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x(j), self.y(i)]
    }

    #[inline]
    pub fn coords_of(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.ij(idx);
        self.coords(i, j)
    }

    /// Flat index of `(i + di, j + dj)`, or `None` when it falls off the grid.
    #[inline]
    pub fn offset(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<(usize, usize)> {
        let ii = i as isize + di;
        let jj = j as isize + dj;
        let last = self.n as isize;
        if ii < 0 || jj < 0 || ii > last || jj > last {
            None
        } else {
            Some((ii as usize, jj as usize))
        }
    }

    #[inline]
    pub fn is_on_edge(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n || j == self.n
    }

    /// The grid with spacing `2h`; its nodes are the even-indexed nodes of `self`.
    pub fn coarse(&self) -> Result<GridSpec> {
        GridSpec::new(self.n / 2)
    }

    /// The on-grid part of the 3x3 neighborhood of `(i, j)`, lexicographic.
    pub fn lexicographic_neighborhood(
        &self,
        i: usize,
        j: usize,
    ) -> impl Iterator<Item = (usize, usize)> + '_ {
        (-1isize..=1)
            .flat_map(move |dj| (-1isize..=1).map(move |di| (di, dj)))
            .filter_map(move |(di, dj)| self.offset(i, j, di, dj))
    }

    /// Node indices in lexicographic order: `x` major, then `y`.
    pub fn lexicographic(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let side = self.side();
        (0..side).flat_map(move |j| (0..side).map(move |i| (i, j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing() {
        assert_eq!(build_grid(64).unwrap().h(), 0.03125);
        assert_eq!(build_grid(8).unwrap().h(), 0.25);
        for n in [4, 8, 16, 32, 64, 128, 256, 1024] {
            let g = build_grid(n).unwrap();
            assert_eq!(g.h() * n as f64, 2.0);
            assert_eq!(g.x(n), 1.0);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(build_grid(7), Err(Error::InvalidArgument(_))));
        assert!(build_grid(2).is_err());
        assert!(build_grid(0).is_err());
    }

    #[test]
    fn coarse_nodes_are_even_fine_nodes() {
        let fine = build_grid(32).unwrap();
        let coarse = fine.coarse().unwrap();
        for i in 0..coarse.side() {
            for j in 0..coarse.side() {
                assert_eq!(coarse.coords(i, j), fine.coords(2 * i, 2 * j));
            }
        }
    }

    #[test]
    fn lexicographic_is_x_major() {
        let g = build_grid(4).unwrap();
        let order: Vec<_> = g.lexicographic().take(6).collect();
        assert_eq!(order, vec![(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (0, 1)]);
    }
}
