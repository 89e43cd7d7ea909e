//! Uniform periodic grids on the unit torus `[0,1)^n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest supported torus dimension.
pub const MAX_DIM: usize = 4;

/// A point of the torus; only the first `n` entries are meaningful.
pub type Point<T> = [T; MAX_DIM];

/// Sampling of the flat torus `T^n` with `size` nodes per axis.
///
/// Nodes sit at `x_j = i_j / size`. Flat node indices are row-major with
/// axis 0 varying slowest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    size: usize,
}

impl GridSpec {
    pub fn new(n: usize, size: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension {n} outside 2..=4")));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "samples per axis {size} must be a power of two >= 8"
            )));
        }
        Ok(Self { n, size })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Samples per axis.
    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    /// Total node count `size^n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.size.pow(self.n as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid with twice as many samples per axis.
    pub fn refined(&self) -> Self {
        Self {
            n: self.n,
            size: self.size * 2,
        }
    }

    /// Stride of `axis` in the flat layout.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.size.pow((self.n - 1 - axis) as u32)
    }

    /// Multi-index of a flat node index.
    #[inline]
    pub fn unravel(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for axis in (0..self.n).rev() {
            out[axis] = idx % self.size;
            idx /= self.size;
        }
        out
    }

    #[inline]
    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi[..self.n]
            .iter()
            .fold(0, |acc, &i| acc * self.size + i % self.size)
    }

    /// Coordinates of a node.
    pub fn node<T: Real>(&self, idx: usize) -> Point<T> {
        let multi = self.unravel(idx);
        let h = T::one() / T::from_usize_lossy(self.size);
        let mut p = [T::zero(); MAX_DIM];
        for axis in 0..self.n {
            p[axis] = T::from_usize_lossy(multi[axis]) * h;
        }
        p
    }

    /// Signed frequency of a spectral index along one axis, `None` at Nyquist.
    #[inline]
    pub fn frequency(&self, k: usize) -> Option<i64> {
        let half = self.size / 2;
        match k.cmp(&half) {
            std::cmp::Ordering::Less => Some(k as i64),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(k as i64 - self.size as i64),
        }
    }

    /// Signed multi-frequency of a flat spectral index, `None` if any axis
    /// sits at the Nyquist frequency.
    pub fn mode(&self, idx: usize) -> Option<[i64; MAX_DIM]> {
        let multi = self.unravel(idx);
        let mut out = [0i64; MAX_DIM];
        for axis in 0..self.n {
            out[axis] = self.frequency(multi[axis])?;
        }
        Some(out)
    }

    /// Flat spectral index of a signed multi-frequency (wrapped).
    pub fn mode_index(&self, mode: &[i64]) -> usize {
        let s = self.size as i64;
        mode[..self.n]
            .iter()
            .fold(0, |acc, &m| acc * self.size + m.rem_euclid(s) as usize)
    }

    /// Flat index of the mode `-m`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let multi = self.unravel(idx);
        let mut out = [0usize; MAX_DIM];
        for axis in 0..self.n {
            out[axis] = (self.size - multi[axis]) % self.size;
        }
        self.ravel(&out)
    }

    /// `conjugate_index` for every flat index, built without divisions.
    pub fn conjugate_table(&self) -> Vec<usize> {
        let mut table = vec![0usize];
        for _ in 0..self.n {
            let prev = std::mem::take(&mut table);
            table.reserve(prev.len() * self.size);
            for k in 0..self.size {
                let c = (self.size - k) % self.size;
                let offset = c * prev.len();
                table.extend(prev.iter().map(|&p| offset + p));
            }
        }
        table
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "T^{} @ {}^{}", self.n, self.size, self.n)
    }
}

/// Wraps a coordinate into `[0, 1)`.
#[inline]
pub fn wrap<T: Real>(x: T) -> T {
    let w = x - x.floor();
    if w >= T::one() {
        T::zero()
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1, 16).is_err());
        assert!(GridSpec::new(5, 16).is_err());
        assert!(GridSpec::new(2, 12).is_err());
        assert!(GridSpec::new(2, 4).is_err());
        assert!(GridSpec::new(4, 8).is_ok());
    }

    #[test]
    fn ravel_roundtrip() {
        let g = GridSpec::new(3, 8).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.ravel(&g.unravel(idx)), idx);
        }
        assert_eq!(g.stride(0), 64);
        assert_eq!(g.stride(2), 1);
    }

    #[test]
    fn frequencies_and_conjugates() {
        let g = GridSpec::new(2, 8).unwrap();
        assert_eq!(g.frequency(3), Some(3));
        assert_eq!(g.frequency(4), None);
        assert_eq!(g.frequency(5), Some(-3));
        let idx = g.mode_index(&[2, -1]);
        assert_eq!(g.mode(idx).unwrap()[..2], [2, -1]);
        assert_eq!(g.mode(g.conjugate_index(idx)).unwrap()[..2], [-2, 1]);
        let g = GridSpec::new(3, 8).unwrap();
        let table = g.conjugate_table();
        assert!((0..g.len()).all(|i| table[i] == g.conjugate_index(i)));
    }

    #[test]
    fn wrap_into_unit_interval() {
        assert_eq!(wrap(1.25f64), 0.25);
        assert_eq!(wrap(-0.25f64), 0.75);
        assert!(wrap(-1e-18f64) < 1.0);
    }
}
