//! Differential forms and vector fields on the flat torus.
//!
//! A `k`-form stores one scalar field per strictly increasing index set
//! `S = {s_1 < ... < s_k}` (lexicographic order); the component multiplies
//! `dx_{s_1} ^ ... ^ dx_{s_k}`. Index sets are encoded as bitmasks over the
//! axes `0..n`, axis `j` standing for `dx_{j+1}`.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{GridSpec, Point};
use crate::scalar::Real;

/// Combinatorics of the exterior algebra of `R^n`.
pub mod basis {
    /// Index sets of size `k` among `n` axes, in lexicographic order of their
    /// sorted element lists.
    pub fn index_sets(n: usize, k: usize) -> Vec<u8> {
        fn rec(start: usize, n: usize, k: usize, acc: u8, out: &mut Vec<u8>) {
            if k == 0 {
                out.push(acc);
                return;
            }
            for j in start..n {
                rec(j + 1, n, k - 1, acc | (1 << j), out);
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(0, n, k, 0, &mut out);
        }
        out
    }

    /// Position of an index set within `index_sets(n, popcount)`.
    pub fn position(n: usize, mask: u8) -> usize {
        index_sets(n, mask.count_ones() as usize)
            .iter()
            .position(|&m| m == mask)
            .expect("mask within dimension")
    }

    /// Lookup table mask -> position for all masks of `n` axes.
    pub fn position_table(n: usize) -> Vec<usize> {
        let mut table = vec![usize::MAX; 1 << n];
        for k in 0..=n {
            for (p, m) in index_sets(n, k).into_iter().enumerate() {
                table[m as usize] = p;
            }
        }
        table
    }

    pub fn axes(mask: u8) -> Vec<usize> {
        (0..8).filter(|j| mask & (1 << j) != 0).collect()
    }

    pub fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Sign `s` with `dx_j ^ dx_S = s dx_{S+j}`; zero when `j` is in `S`.
    pub fn insert_sign(j: usize, mask: u8) -> i32 {
        if mask & (1 << j) != 0 {
            return 0;
        }
        let below = (mask & ((1u8 << j) - 1)).count_ones();
        if below.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Sign `s` with `dx_S ^ dx_T = s dx_{S+T}`; zero when they overlap.
    pub fn wedge_sign(s: u8, t: u8) -> i32 {
        if s & t != 0 {
            return 0;
        }
        let mut inversions = 0;
        for a in axes(s) {
            inversions += (t & ((1u8 << a) - 1)).count_ones();
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// A differential `k`-form with one scalar field per component.
#[derive(Clone, Debug)]
pub struct DiffForm<T: Real> {
    grid: GridSpec,
    degree: usize,
    components: Vec<ScalarField<T>>,
}

impl<T: Real> DiffForm<T> {
    pub fn zero(grid: GridSpec, degree: usize) -> Result<Self> {
        if degree > grid.dim() {
            return Err(Error::DegreeOverflow {
                degree,
                dim: grid.dim(),
            });
        }
        let count = basis::binomial(grid.dim(), degree);
        Ok(Self {
            grid,
            degree,
            components: vec![ScalarField::zeros(grid); count],
        })
    }

    pub fn from_components(grid: GridSpec, degree: usize, components: Vec<ScalarField<T>>) -> Result<Self> {
        if degree > grid.dim() {
            return Err(Error::DegreeOverflow {
                degree,
                dim: grid.dim(),
            });
        }
        let count = basis::binomial(grid.dim(), degree);
        if components.len() != count {
            return Err(Error::InvalidGrid(format!(
                "degree-{degree} form needs {count} components, got {}",
                components.len()
            )));
        }
        for c in &components {
            grid.check_same(c.grid())?;
        }
        Ok(Self {
            grid,
            degree,
            components,
        })
    }

    /// Degree-0 form from a function.
    pub fn function(f: ScalarField<T>) -> Self {
        Self {
            grid: *f.grid(),
            degree: 0,
            components: vec![f],
        }
    }

    /// `coeff * dx_{a_1} ^ ... ^ dx_{a_k}` for 0-based axes (any order).
    pub fn monomial(coeff: ScalarField<T>, axes: &[usize]) -> Result<Self> {
        let grid = *coeff.grid();
        let mut mask = 0u8;
        let mut sign = 1;
        for &a in axes {
            if a >= grid.dim() {
                return Err(Error::DegreeOverflow {
                    degree: a + 1,
                    dim: grid.dim(),
                });
            }
            let s = basis::insert_sign(a, mask);
            if s == 0 {
                return Self::zero(grid, axes.len());
            }
            // dx_S ^ dx_a = (-1)^{|S|} dx_a ^ dx_S
            sign *= s * if mask.count_ones().is_multiple_of(2) { 1 } else { -1 };
            mask |= 1 << a;
        }
        let mut out = Self::zero(grid, axes.len())?;
        let pos = basis::position(grid.dim(), mask);
        out.components[pos] = if sign > 0 { coeff } else { coeff.scale(-T::one()) };
        Ok(out)
    }

    /// Constant-coefficient basis form `dx_{a_1} ^ ... ^ dx_{a_k}`.
    pub fn basis_form(grid: GridSpec, axes: &[usize]) -> Result<Self> {
        Self::monomial(ScalarField::constant(grid, T::one()), axes)
    }

    /// Constant 1-form `sum_j c_j dx_j`.
    pub fn constant_one_form(grid: GridSpec, coeffs: &[T]) -> Self {
        let comps = (0..grid.dim())
            .map(|j| ScalarField::constant(grid, coeffs.get(j).copied().unwrap_or_else(T::zero)))
            .collect();
        Self {
            grid,
            degree: 1,
            components: comps,
        }
    }

    /// Builds a form by evaluating `f(point, component_position)` at nodes.
    pub fn from_fn(grid: GridSpec, degree: usize, f: impl Fn(&Point<T>, usize) -> T) -> Result<Self> {
        let count = basis::binomial(grid.dim(), degree);
        let comps = (0..count).map(|c| ScalarField::from_fn(grid, |p| f(p, c))).collect();
        Self::from_components(grid, degree, comps)
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [ScalarField<T>] {
        &mut self.components
    }

    pub fn into_components(self) -> Vec<ScalarField<T>> {
        self.components
    }

    /// Index sets of the components, aligned with `components()`.
    pub fn index_sets(&self) -> Vec<u8> {
        basis::index_sets(self.grid.dim(), self.degree)
    }

    /// Component for a set of 0-based axes given in increasing order.
    pub fn component(&self, axes: &[usize]) -> &ScalarField<T> {
        let mask = axes.iter().fold(0u8, |m, &a| m | (1 << a));
        &self.components[basis::position(self.grid.dim(), mask)]
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&ScalarField<T>, &ScalarField<T>) -> Result<ScalarField<T>>,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid,
            degree: self.degree,
            components: comps,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            grid: self.grid,
            degree: self.degree,
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Multiplication by a function, evaluated at the nodes. Conformal factors
    /// are exponentials and never band-limited, so no truncation is applied.
    pub fn mul_function(&self, f: &ScalarField<T>) -> Result<Self> {
        self.grid.check_same(f.grid())?;
        Ok(Self {
            grid: self.grid,
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|c| c.mul_nodal(f))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// L2 norm on the unit-volume torus.
    pub fn norm(&self) -> T {
        self.components
            .iter()
            .map(|c| {
                let n = c.norm();
                n * n
            })
            .sum::<T>()
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.components.iter().map(|c| c.max_abs()).fold(T::zero(), T::max)
    }

    /// Constant (mode-zero) coefficients of each component.
    pub fn mean_coefficients(&self) -> Vec<T> {
        self.components.iter().map(|c| c.mean()).collect()
    }

    /// Component values at one node, in component order.
    pub fn node_values(&self, node: usize) -> Vec<T> {
        self.components.iter().map(|c| c.values()[node]).collect()
    }
}

/// A vector field in the coordinate frame.
#[derive(Clone, Debug)]
pub struct VectorField<T: Real> {
    grid: GridSpec,
    components: Vec<ScalarField<T>>,
}

impl<T: Real> VectorField<T> {
    pub fn new(grid: GridSpec, components: Vec<ScalarField<T>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::InvalidGrid(format!(
                "vector field needs {} components, got {}",
                grid.dim(),
                components.len()
            )));
        }
        for c in &components {
            grid.check_same(c.grid())?;
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            components: vec![ScalarField::zeros(grid); grid.dim()],
        }
    }

    pub fn constant(grid: GridSpec, v: &[T]) -> Self {
        Self {
            grid,
            components: (0..grid.dim())
                .map(|j| ScalarField::constant(grid, v.get(j).copied().unwrap_or_else(T::zero)))
                .collect(),
        }
    }

    /// Metric dual of a 1-form; the identity on components for the flat metric.
    pub fn sharp(form: &DiffForm<T>) -> Result<Self> {
        if form.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: form.degree(),
            });
        }
        Self::new(*form.grid(), form.components().to_vec())
    }

    pub fn flat(&self) -> DiffForm<T> {
        DiffForm {
            grid: self.grid,
            degree: 1,
            components: self.components.clone(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.components
    }

    pub fn max_norm(&self) -> T {
        (0..self.grid.len())
            .map(|i| {
                self.components
                    .iter()
                    .map(|c| c.values()[i] * c.values()[i])
                    .sum::<T>()
                    .sqrt()
            })
            .fold(T::zero(), T::max)
    }
}
