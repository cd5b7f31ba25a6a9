use serde::{Deserialize, Serialize};

use super::FieldError;

/// Uniform periodic grid on the unit cube `(-1/2, 1/2)^d`.
///
/// Node `j ∈ {0,…,n−1}^d` sits at `x = −1/2 + j·h` with `h = 1/n`. Values are
/// stored row-major with the last index fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    d: usize,
    n: usize,
}

impl GridSpec {
    pub const MAX_DIM: usize = 3;
    pub const MIN_POINTS: usize = 8;

    pub fn new(d: usize, n: usize) -> Result<Self, FieldError> {
        if !(1..=Self::MAX_DIM).contains(&d) {
            return Err(FieldError::Config(format!("dimension {d} outside 1..=3")));
        }
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(FieldError::Config(format!(
                "points per dimension must be a power of two ≥ 8, got {n}"
            )));
        }
        Ok(Self { d, n })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing; `h·n == 1` exactly because `n` is a power of two.
    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Quadrature weight `h^d` of one node.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The grid with twice as many points per dimension.
    pub fn refined(&self) -> Self {
        Self { d: self.d, n: 2 * self.n }
    }

    /// Stride of axis `axis` in the flat layout.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.d - 1 - axis) as u32)
    }

    /// Multi-index of the flat index `flat`.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.d).rev() {
            idx[axis] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx[..self.d]
            .iter()
            .fold(0, |acc, &i| acc * self.n + (i % self.n))
    }

    /// Physical coordinates of a node.
    pub fn coords(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let h = self.h();
        let mut x = [0.0; 3];
        for axis in 0..self.d {
            x[axis] = -0.5 + idx[axis] as f64 * h;
        }
        x
    }

    /// Signed integer wavenumber of FFT slot `j` (−n/2 ≤ m < n/2).
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Wavenumber vector of a flat spectral index.
    pub fn mode(&self, flat: usize) -> [i64; 3] {
        let idx = self.unravel(flat);
        let mut m = [0i64; 3];
        for axis in 0..self.d {
            m[axis] = self.wavenumber(idx[axis]);
        }
        m
    }

    /// FFT slot of wavenumber `m` (taken modulo n).
    #[inline]
    pub fn slot(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<(), FieldError> {
        if self != other {
            return Err(FieldError::GridMismatch {
                expected: *self,
                found: *other,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(0, 16).is_err());
        assert!(GridSpec::new(4, 16).is_err());
        assert!(GridSpec::new(2, 12).is_err());
        assert!(GridSpec::new(2, 4).is_err());
        assert!(GridSpec::new(3, 8).is_ok());
    }

    #[test]
    fn layout_and_coordinates() {
        let g = GridSpec::new(3, 8).unwrap();
        assert_eq!(g.len(), 512);
        assert_eq!(g.h() * g.n() as f64, 1.0);
        let flat = g.ravel(&[1, 2, 3]);
        assert_eq!(flat, 64 + 2 * 8 + 3);
        assert_eq!(g.unravel(flat), [1, 2, 3]);
        let x = g.coords(flat);
        assert_eq!(x, [-0.5 + 0.125, -0.5 + 0.25, -0.5 + 0.375]);
        assert_eq!(g.stride(2), 1);
        assert_eq!(g.stride(0), 64);
    }

    #[test]
    fn wavenumbers_cover_symmetric_band() {
        let g = GridSpec::new(1, 8).unwrap();
        let ms: Vec<i64> = (0..8).map(|j| g.wavenumber(j)).collect();
        assert_eq!(ms, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for m in -4..4 {
            assert_eq!(g.wavenumber(g.slot(m)), m);
        }
    }
}
