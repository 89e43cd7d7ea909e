//! Real scalar fields sampled on a torus grid.

use std::sync::{Arc, OnceLock};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Point};
use crate::scalar::Real;
use crate::spectral;

/// A real function on the torus, stored by node values. The spectrum is
/// computed on demand and cached until the values are mutated.
#[derive(Debug)]
pub struct ScalarField<T: Real> {
    grid: GridSpec,
    values: Vec<T>,
    spectrum: OnceLock<Arc<Vec<Complex<T>>>>,
}

impl<T: Real> Clone for ScalarField<T> {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(Arc::clone(s));
        }
        Self {
            grid: self.grid,
            values: self.values.clone(),
            spectrum,
        }
    }
}

impl<T: Real> ScalarField<T> {
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} node values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self::from_values_unchecked(grid, values))
    }

    pub(crate) fn from_values_unchecked(grid: GridSpec, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid,
            values,
            spectrum: OnceLock::new(),
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_values_unchecked(grid, vec![T::zero(); grid.len()])
    }

    pub fn constant(grid: GridSpec, c: T) -> Self {
        Self::from_values_unchecked(grid, vec![c; grid.len()])
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&Point<T>) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.node(i))).collect();
        Self::from_values_unchecked(grid, values)
    }

    /// Builds a field from Fourier coefficients; the Hermitian part is used.
    pub fn from_spectrum(grid: GridSpec, spectrum: &[Complex<T>]) -> Self {
        let sym = spectral::hermitian_part(&grid, spectrum);
        let values = spectral::inverse_real(&grid, &sym);
        let field = Self::from_values_unchecked(grid, values);
        let _ = field.spectrum.set(Arc::new(sym));
        field
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Mutable node access; invalidates the cached spectrum.
    pub fn values_mut(&mut self) -> &mut [T] {
        self.spectrum = OnceLock::new();
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn spectrum(&self) -> &[Complex<T>] {
        self.spectrum
            .get_or_init(|| Arc::new(spectral::forward(&self.grid, &self.values)))
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::from_usize_lossy(self.values.len())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Root-mean-square norm (L2 norm on the unit-volume torus).
    pub fn norm(&self) -> T {
        (self.values.iter().map(|v| *v * *v).sum::<T>() / T::from_usize_lossy(self.values.len())).sqrt()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_values_unchecked(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_values_unchecked(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Nodewise product (collocation).
    pub fn mul_nodal(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    /// Spectral partial derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let k = spectral::axis_wavenumbers::<T>(&self.grid, axis);
        let spec: Vec<Complex<T>> = self
            .spectrum()
            .iter()
            .zip(&k)
            .map(|(c, kk)| Complex::new(-c.im * *kk, c.re * *kk))
            .collect();
        Self::from_spectrum(self.grid, &spec)
    }

    /// Per-axis bandwidth of the resolved spectrum.
    pub fn bandwidth(&self, rel_cutoff: T) -> [usize; crate::grid::MAX_DIM] {
        spectral::bandwidth(&self.grid, self.spectrum(), rel_cutoff)
    }

    /// Trigonometric interpolation at an arbitrary point.
    pub fn eval_at(&self, point: &[T]) -> T {
        spectral::interpolate(&self.grid, self.spectrum(), point)
    }

    /// Component of the field with zero mean.
    pub fn mean_free(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_single_mode() {
        let g = GridSpec::new(2, 16).unwrap();
        let tau = std::f64::consts::TAU;
        let f = ScalarField::from_fn(g, |p: &Point<f64>| (tau * p[0]).sin());
        let df = f.derivative(0);
        let expect = ScalarField::from_fn(g, |p: &Point<f64>| tau * (tau * p[0]).cos());
        assert!(df.sub(&expect).unwrap().max_abs() < 1e-12);
        assert!(f.derivative(1).max_abs() < 1e-13);
    }

    #[test]
    fn spectrum_cache_invalidated_on_mutation() {
        let g = GridSpec::new(2, 8).unwrap();
        let mut f = ScalarField::constant(g, 1.0f64);
        assert!((f.spectrum()[0].re - 1.0).abs() < 1e-15);
        f.values_mut()[0] = 65.0;
        assert!((f.spectrum()[0].re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inner_product_of_sine_is_half() {
        let g = GridSpec::new(2, 16).unwrap();
        let f = ScalarField::from_fn(g, |p: &Point<f64>| (std::f64::consts::TAU * p[0]).sin());
        // Independent quadrature: midpoint rule on a finer 1D grid.
        let m = 4096;
        let quad: f64 = (0..m)
            .map(|i| ((i as f64 + 0.5) / m as f64 * std::f64::consts::TAU).sin().powi(2))
            .sum::<f64>()
            / m as f64;
        assert!((f.norm().powi(2) - quad).abs() < 1e-12);
        assert!((quad - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eval_at_quarter_period() {
        let g = GridSpec::new(3, 8).unwrap();
        let f = ScalarField::from_fn(g, |p: &Point<f64>| (std::f64::consts::TAU * p[0]).sin());
        assert!((f.eval_at(&[0.25, 0.4, 0.9]) - 1.0).abs() < 1e-14);
    }
}
