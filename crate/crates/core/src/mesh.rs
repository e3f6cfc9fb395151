use crate::error::{Error, Result};
use crate::real::Real;

/// Uniform Cartesian mesh of a rectangle.
///
/// Cells are numbered `c = b * nx + a` with `a` the column (x) index and `b` the
/// row (y) index, both zero based.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh<T> {
    x_left: T,
    x_right: T,
    y_bottom: T,
    y_top: T,
    nx: usize,
    ny: usize,
}

impl<T: Real> SpatialMesh<T> {
    pub fn new(x_left: T, x_right: T, y_bottom: T, y_top: T, nx: usize, ny: usize) -> Result<Self> {
        if !(x_left < x_right) || !(y_bottom < y_top) {
            return Err(Error::InvalidArgument("mesh bounds must satisfy x_L < x_R and y_B < y_T".into()));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("mesh needs at least one cell per direction".into()));
        }
        Ok(Self { x_left, x_right, y_bottom, y_top, nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn bounds(&self) -> (T, T, T, T) {
        (self.x_left, self.x_right, self.y_bottom, self.y_top)
    }

    pub fn dx(&self) -> T {
        (self.x_right - self.x_left) / T::from_count(self.nx)
    }

    pub fn dy(&self) -> T {
        (self.y_top - self.y_bottom) / T::from_count(self.ny)
    }

    #[inline]
    pub fn cell_index(&self, a: usize, b: usize) -> usize {
        b * self.nx + a
    }

    #[inline]
    pub fn cell_coords(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    /// x coordinate of the vertical grid line `i` (`0..=nx`).
    pub fn x_face(&self, i: usize) -> T {
        if i == self.nx {
            self.x_right
        } else {
            self.x_left + self.dx() * T::from_count(i)
        }
    }

    /// y coordinate of the horizontal grid line `i` (`0..=ny`).
    pub fn y_face(&self, i: usize) -> T {
        if i == self.ny {
            self.y_top
        } else {
            self.y_bottom + self.dy() * T::from_count(i)
        }
    }

    /// Cell `c` as `(x0, x1, y0, y1)`.
    pub fn cell_bounds(&self, c: usize) -> (T, T, T, T) {
        let (a, b) = self.cell_coords(c);
        (self.x_face(a), self.x_face(a + 1), self.y_face(b), self.y_face(b + 1))
    }

    pub fn cell_center(&self, c: usize) -> (T, T) {
        let (x0, x1, y0, y1) = self.cell_bounds(c);
        let half = T::lit(0.5);
        ((x0 + x1) * half, (y0 + y1) * half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_tile_domain() {
        let m = SpatialMesh::new(-1.0, 1.0, 0.0, 5.0, 7, 3).unwrap();
        let area: f64 = (0..m.n_cells())
            .map(|c| {
                let (x0, x1, y0, y1) = m.cell_bounds(c);
                (x1 - x0) * (y1 - y0)
            })
            .sum();
        assert!((area - 10.0).abs() < 1e-12);
        assert_eq!(m.x_face(7), 1.0);
        for c in 0..m.n_cells() {
            let (a, b) = m.cell_coords(c);
            assert_eq!(m.cell_index(a, b), c);
        }
    }

    #[test]
    fn rejects_degenerate() {
        assert!(SpatialMesh::new(1.0, 1.0, 0.0, 1.0, 2, 2).is_err());
        assert!(SpatialMesh::new(0.0, 1.0, 0.0, 1.0, 0, 2).is_err());
    }
}
