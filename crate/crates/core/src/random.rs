//! Random band-limited fields and forms for property sweeps.

use num_complex::Complex;
use rand::Rng;

use crate::field::ScalarField;
use crate::form::{basis, DiffForm};
use crate::grid::GridSpec;
use crate::lichnerowicz::LeeForm;
use crate::scalar::Real;

/// Real field whose Fourier modes satisfy `|m_j| <= bandwidth` on every axis,
/// with coefficients uniform in the unit square.
pub fn random_field<T: Real, R: Rng + ?Sized>(grid: GridSpec, bandwidth: usize, rng: &mut R) -> ScalarField<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut spec = vec![zero; grid.len()];
    for (idx, c) in spec.iter_mut().enumerate() {
        let Some(m) = grid.mode(idx) else { continue };
        if m[..grid.dim()].iter().all(|v| v.unsigned_abs() as usize <= bandwidth) {
            *c = Complex::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0)));
        }
    }
    ScalarField::from_spectrum(grid, &spec)
}

pub fn random_form<T: Real, R: Rng + ?Sized>(
    grid: GridSpec,
    degree: usize,
    bandwidth: usize,
    rng: &mut R,
) -> DiffForm<T> {
    let comps = (0..basis::binomial(grid.dim(), degree))
        .map(|_| random_field(grid, bandwidth, rng))
        .collect();
    DiffForm::from_components(grid, degree, comps).expect("component count matches degree")
}

/// Closed 1-form: random constant coefficients plus `d g` for a random
/// mean-free band-limited `g`.
pub fn random_lee<T: Real, R: Rng + ?Sized>(grid: GridSpec, bandwidth: usize, rng: &mut R) -> LeeForm<T> {
    let harmonic: Vec<T> = (0..grid.dim()).map(|_| T::lit(rng.random_range(-2.0..2.0))).collect();
    let g = random_field(grid, bandwidth, rng).mean_free().scale(T::lit(0.1));
    LeeForm::from_parts(&harmonic, g).expect("potential on the same grid")
}
