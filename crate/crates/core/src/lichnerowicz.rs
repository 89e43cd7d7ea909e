//! Twisted differential `d_theta b = db - theta ^ b`, its adjoint and
//! Laplacian, Lee-form extraction and conformal gauge changes, and the
//! per-mode Hodge theory for constant Lee forms.
//!
//! On the flat torus with constant `theta = sum_j c_j dx_j`, a Fourier mode
//! `m` turns `d_theta` into `mu ^` and `d_theta^*` into `i_{conj(mu)}` with
//! `mu_j = 2 pi i m_j - c_j`, so `Delta_theta = |mu|^2` on that mode. Modes
//! carrying a Nyquist index are not resolved by spectral differentiation and
//! are left out of the discrete complex.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{self, codifferential, contract, ext_d, wedge};
use crate::field::ScalarField;
use crate::form::{basis, DiffForm, VectorField};
use crate::grid::{GridSpec, MAX_DIM};
use crate::linalg;
use crate::scalar::Real;
use crate::spectral;

/// Relative size of a Lee potential below which it is treated as zero.
const CONSTANT_LEE_TOL: f64 = 1e-12;

/// Closed 1-form `theta = theta_h + dg` split into its constant (harmonic)
/// coefficients and a mean-free potential.
#[derive(Clone, Debug)]
pub struct LeeForm<T: Real> {
    harmonic: [T; MAX_DIM],
    potential: ScalarField<T>,
    closedness_residual: T,
}

impl<T: Real> LeeForm<T> {
    /// Constant Lee form `sum_j c_j dx_j`.
    pub fn constant(grid: GridSpec, coeffs: &[T]) -> Self {
        let mut harmonic = [T::zero(); MAX_DIM];
        for (h, c) in harmonic.iter_mut().zip(coeffs).take(grid.dim()) {
            *h = *c;
        }
        Self {
            harmonic,
            potential: ScalarField::zeros(grid),
            closedness_residual: T::zero(),
        }
    }

    pub fn zero(grid: GridSpec) -> Self {
        Self::constant(grid, &[])
    }

    /// `theta_h + dg`; the mean of `g` is discarded.
    pub fn from_parts(harmonic: &[T], potential: ScalarField<T>) -> Result<Self> {
        let mut lee = Self::constant(*potential.grid(), harmonic);
        lee.potential = potential.mean_free();
        Ok(lee)
    }

    /// Splits a closed 1-form; see [`split_harmonic_exact`].
    pub fn from_one_form(theta: &DiffForm<T>, tol: T) -> Result<Self> {
        split_harmonic_exact(theta, tol)
    }

    pub fn grid(&self) -> &GridSpec {
        self.potential.grid()
    }

    /// Harmonic coefficients `c_1..c_n`.
    pub fn harmonic(&self) -> &[T] {
        &self.harmonic[..self.grid().dim()]
    }

    pub fn potential(&self) -> &ScalarField<T> {
        &self.potential
    }

    pub fn closedness_residual(&self) -> T {
        self.closedness_residual
    }

    /// True when the potential is negligible against the harmonic part.
    pub fn is_constant(&self) -> bool {
        self.potential_norm() <= T::lit(CONSTANT_LEE_TOL) * (T::one() + self.harmonic_norm())
    }

    pub fn harmonic_norm(&self) -> T {
        self.harmonic().iter().map(|c| *c * *c).sum::<T>().sqrt()
    }

    pub fn potential_norm(&self) -> T {
        self.potential.norm()
    }

    /// The 1-form `theta_h + dg`.
    pub fn one_form(&self) -> DiffForm<T> {
        let grid = *self.grid();
        let comps = (0..grid.dim())
            .map(|j| {
                let h = self.harmonic[j];
                if self.potential.max_abs() == T::zero() {
                    ScalarField::constant(grid, h)
                } else {
                    self.potential.derivative(j).map(|v| v + h)
                }
            })
            .collect();
        DiffForm::from_components(grid, 1, comps).expect("one component per axis")
    }

    /// `theta^sharp`.
    pub fn vector(&self) -> VectorField<T> {
        VectorField::sharp(&self.one_form()).expect("degree one")
    }

    /// `theta(X)` evaluated at the nodes.
    pub fn apply(&self, x: &VectorField<T>) -> Result<ScalarField<T>> {
        let theta = self.one_form();
        let mut out = ScalarField::zeros(*self.grid());
        for (t, xc) in theta.components().iter().zip(x.components()) {
            out = out.add(&t.mul_nodal(xc)?)?;
        }
        Ok(out)
    }

    fn require_constant(&self) -> Result<()> {
        if self.is_constant() {
            Ok(())
        } else {
            Err(Error::NonConstantLee {
                potential_norm: self.potential_norm().to_f64_lossy(),
            })
        }
    }
}

/// Thresholds applied when validating an lcs form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LcsOptions {
    /// Smallest admissible `min |Pf(omega)|`.
    pub nondeg_threshold: f64,
    /// Largest admissible `|d omega - theta ^ omega| / |omega|`.
    pub lcs_tolerance: f64,
}

impl Default for LcsOptions {
    fn default() -> Self {
        Self {
            nondeg_threshold: 1e-8,
            lcs_tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LcsDiagnostics {
    pub lcs_residual: f64,
    pub nondeg_margin: f64,
    pub closedness_residual: f64,
}

/// A nondegenerate 2-form together with its Lee form.
#[derive(Clone, Debug)]
pub struct LcsForm<T: Real> {
    omega: DiffForm<T>,
    lee: LeeForm<T>,
    diagnostics: LcsDiagnostics,
}

impl<T: Real> LcsForm<T> {
    pub fn omega(&self) -> &DiffForm<T> {
        &self.omega
    }

    pub fn lee(&self) -> &LeeForm<T> {
        &self.lee
    }

    pub fn diagnostics(&self) -> &LcsDiagnostics {
        &self.diagnostics
    }

    pub fn grid(&self) -> &GridSpec {
        self.omega.grid()
    }

    pub fn into_parts(self) -> (DiffForm<T>, LeeForm<T>) {
        (self.omega, self.lee)
    }
}

/// Outcome of a twisted Poisson solve `d_theta alpha = target`.
#[derive(Clone, Debug)]
pub struct HodgeSolveResult<T: Real> {
    /// The primitive in the image of `d_theta^*`.
    pub primitive: DiffForm<T>,
    /// `|d_theta alpha - target| / |target|`.
    pub residual: T,
    /// Norm of the harmonic component of the target.
    pub harmonic_part_norm: T,
}

/// Orthogonal splitting `a = harmonic + exact + coexact (+ unresolved)`.
#[derive(Clone, Debug)]
pub struct HodgeDecomposition<T: Real> {
    pub harmonic: DiffForm<T>,
    pub exact: DiffForm<T>,
    pub coexact: DiffForm<T>,
    /// Content on Nyquist modes, outside the discrete complex.
    pub unresolved: DiffForm<T>,
}

/// `d_theta b = db - theta ^ b`.
pub fn d_theta<T: Real>(b: &DiffForm<T>, lee: &LeeForm<T>) -> Result<DiffForm<T>> {
    b.grid().check_same(lee.grid())?;
    ext_d(b)?.sub(&wedge(&lee.one_form(), b)?)
}

/// `d_theta` with the wedge taken node by node. Used for residuals of
/// identities that hold at the nodes, where de-aliasing the product would
/// only add the projection error of a non-band-limited factor.
pub fn d_theta_nodal<T: Real>(b: &DiffForm<T>, lee: &LeeForm<T>) -> Result<DiffForm<T>> {
    b.grid().check_same(lee.grid())?;
    ext_d(b)?.sub(&exterior::wedge_nodal(&lee.one_form(), b)?)
}

/// Formal adjoint `d_theta^* b = d^* b - i_{theta^sharp} b`.
pub fn d_theta_star<T: Real>(b: &DiffForm<T>, lee: &LeeForm<T>) -> Result<DiffForm<T>> {
    b.grid().check_same(lee.grid())?;
    codifferential(b)?.sub(&contract(&lee.vector(), b)?)
}

/// `Delta_theta = d_theta d_theta^* + d_theta^* d_theta`.
pub fn laplacian_theta<T: Real>(b: &DiffForm<T>, lee: &LeeForm<T>) -> Result<DiffForm<T>> {
    let n = b.grid().dim();
    let down = if b.degree() > 0 {
        Some(d_theta(&d_theta_star(b, lee)?, lee)?)
    } else {
        None
    };
    let up = if b.degree() < n {
        Some(d_theta_star(&d_theta(b, lee)?, lee)?)
    } else {
        None
    };
    match (down, up) {
        (Some(a), Some(c)) => a.add(&c),
        (Some(a), None) => Ok(a),
        (None, Some(c)) => Ok(c),
        (None, None) => Ok(b.clone()),
    }
}

/// Minimum over nodes of `|Pf(omega)|` (n = 4) or `|omega_12|` (n = 2).
/// Odd dimensions carry no nondegenerate 2-forms and give zero.
pub fn nondeg_margin<T: Real>(omega: &DiffForm<T>) -> Result<T> {
    check_two_form(omega)?;
    let grid = omega.grid();
    let c = omega.components();
    Ok(match grid.dim() {
        2 => c[0].values().iter().fold(T::infinity(), |m, v| m.min(v.abs())),
        4 => (0..grid.len())
            .map(|i| {
                // components: 12 13 14 23 24 34
                let v = |k: usize| c[k].values()[i];
                (v(0) * v(5) - v(1) * v(4) + v(2) * v(3)).abs()
            })
            .fold(T::infinity(), T::min),
        _ => T::zero(),
    })
}

fn check_two_form<T: Real>(omega: &DiffForm<T>) -> Result<()> {
    if omega.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: omega.degree(),
        });
    }
    Ok(())
}

fn check_nondegenerate<T: Real>(omega: &DiffForm<T>, opts: &LcsOptions) -> Result<T> {
    let margin = nondeg_margin(omega)?;
    let m = margin.to_f64_lossy();
    if !(m >= opts.nondeg_threshold) {
        return Err(Error::DegenerateForm {
            margin: m,
            threshold: opts.nondeg_threshold,
        });
    }
    Ok(margin)
}

/// Pointwise least-squares Lee form of `omega`: at each node the
/// overdetermined system `theta ^ omega = d omega` is solved, and the result
/// is split into harmonic and exact parts. In dimension two every 1-form
/// satisfies the relation and the zero form is returned.
pub fn lee_form<T: Real>(omega: &DiffForm<T>, opts: &LcsOptions) -> Result<LeeForm<T>> {
    check_nondegenerate(omega, opts)?;
    let grid = *omega.grid();
    let n = grid.dim();
    if n == 2 {
        return Ok(LeeForm::zero(grid));
    }
    lee_from_derivative(omega, &ext_d(omega)?)
}

fn lee_from_derivative<T: Real>(omega: &DiffForm<T>, d_omega: &DiffForm<T>) -> Result<LeeForm<T>> {
    let theta = pointwise_lee_solve(omega, d_omega)?;
    Ok(split_unchecked(&theta, true))
}

/// Solves `theta ^ omega = rhs` for a 1-form `theta` node by node in the
/// least-squares sense (`n >= 4`).
fn pointwise_lee_solve<T: Real>(omega: &DiffForm<T>, rhs: &DiffForm<T>) -> Result<DiffForm<T>> {
    let grid = *omega.grid();
    let n = grid.dim();
    let table = basis::position_table(n);
    let pairs = basis::index_sets(n, 2);
    // (row, column j, omega component, sign) for theta_j dx_j ^ omega_T dx_T
    let mut entries = Vec::new();
    for (p, &t) in pairs.iter().enumerate() {
        for j in 0..n {
            let s = basis::insert_sign(j, t);
            if s != 0 {
                entries.push((table[(t | (1 << j)) as usize], j, p, T::from_i32(s).unwrap()));
            }
        }
    }
    let rows = basis::binomial(n, 3);
    let solved: Vec<[T; MAX_DIM]> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            if rows == n {
                // n = 4: the system is square.
                let mut a = [[T::zero(); MAX_DIM]; MAX_DIM];
                for &(r, j, p, s) in &entries {
                    a[r][j] += s * omega.components()[p].values()[i];
                }
                let mut b = [T::zero(); MAX_DIM];
                for (bv, c) in b.iter_mut().zip(rhs.components()) {
                    *bv = c.values()[i];
                }
                return linalg::solve(&a, &b, n).unwrap_or([T::zero(); MAX_DIM]);
            }
            let mut a = vec![vec![T::zero(); n]; rows];
            for &(r, j, p, s) in &entries {
                a[r][j] += s * omega.components()[p].values()[i];
            }
            let b: Vec<T> = rhs.components().iter().map(|c| c.values()[i]).collect();
            let mut out = [T::zero(); MAX_DIM];
            if let Some((x, _)) = linalg::least_squares(&a, &b, n) {
                out[..n].copy_from_slice(&x);
            }
            out
        })
        .collect();
    let comps = (0..n)
        .map(|j| ScalarField::from_values_unchecked(grid, solved.iter().map(|v| v[j]).collect()))
        .collect();
    DiffForm::from_components(grid, 1, comps)
}

/// Time derivative of the Lee form along a family, from the linearized
/// relation `theta' ^ omega = d omega' - theta ^ omega'`. Zero in dimension
/// two.
pub fn lee_derivative<T: Real>(omega: &DiffForm<T>, lee: &LeeForm<T>, omega_dot: &DiffForm<T>) -> Result<DiffForm<T>> {
    check_two_form(omega)?;
    omega.check_compatible(omega_dot)?;
    let grid = *omega.grid();
    if grid.dim() < 4 {
        return DiffForm::zero(grid, 1);
    }
    let rhs = ext_d(omega_dot)?.sub(&exterior::wedge_nodal(&lee.one_form(), omega_dot)?)?;
    pointwise_lee_solve(omega, &rhs)
}

/// Coefficients of the harmonic projection of `a` for a constant Lee form:
/// the mean coefficients when `theta = 0`, nothing otherwise.
pub fn harmonic_coefficients<T: Real>(a: &DiffForm<T>, lee: &LeeForm<T>) -> Result<Vec<T>> {
    lee.require_constant()?;
    if lee.harmonic_norm() == T::zero() {
        Ok(a.mean_coefficients())
    } else {
        Ok(vec![T::zero(); a.components().len()])
    }
}

/// `|d omega - theta ^ omega| / |omega|` at the nodes.
pub fn lcs_residual<T: Real>(omega: &DiffForm<T>, lee: &LeeForm<T>) -> Result<T> {
    check_two_form(omega)?;
    if omega.grid().dim() < 3 {
        return Ok(T::zero());
    }
    residual_with_derivative(omega, &ext_d(omega)?, lee)
}

fn residual_with_derivative<T: Real>(omega: &DiffForm<T>, d_omega: &DiffForm<T>, lee: &LeeForm<T>) -> Result<T> {
    let scale = omega.norm();
    if scale == T::zero() {
        return Ok(T::zero());
    }
    let defect = d_omega.sub(&exterior::wedge_nodal(&lee.one_form(), omega)?)?;
    Ok(defect.norm() / scale)
}

/// Extracts and checks the Lee form of `omega`.
pub fn validate_lcs<T: Real>(omega: &DiffForm<T>, opts: &LcsOptions) -> Result<LcsForm<T>> {
    let margin = check_nondegenerate(omega, opts)?;
    if omega.grid().dim() < 3 {
        let lee = LeeForm::zero(*omega.grid());
        return with_lee(omega.clone(), lee, margin, T::zero(), opts);
    }
    let d_omega = ext_d(omega)?;
    let lee = lee_from_derivative(omega, &d_omega)?;
    let residual = residual_with_derivative(omega, &d_omega, &lee)?;
    with_lee(omega.clone(), lee, margin, residual, opts)
}

/// Checks a 2-form against a Lee form supplied by the caller.
pub fn validate_with_lee<T: Real>(omega: DiffForm<T>, lee: LeeForm<T>, opts: &LcsOptions) -> Result<LcsForm<T>> {
    omega.grid().check_same(lee.grid())?;
    let margin = check_nondegenerate(&omega, opts)?;
    let residual = lcs_residual(&omega, &lee)?;
    with_lee(omega, lee, margin, residual, opts)
}

fn with_lee<T: Real>(
    omega: DiffForm<T>,
    lee: LeeForm<T>,
    margin: T,
    residual: T,
    opts: &LcsOptions,
) -> Result<LcsForm<T>> {
    let residual = residual.to_f64_lossy();
    let closed = lee.closedness_residual.to_f64_lossy();
    let worst = residual.max(closed);
    if !(worst <= opts.lcs_tolerance) {
        return Err(Error::NotLcs {
            residual: worst,
            tolerance: opts.lcs_tolerance,
        });
    }
    Ok(LcsForm {
        omega,
        lee,
        diagnostics: LcsDiagnostics {
            lcs_residual: residual,
            nondeg_margin: margin.to_f64_lossy(),
            closedness_residual: closed,
        },
    })
}

fn refresh<T: Real>(omega: DiffForm<T>, lee: LeeForm<T>) -> Result<LcsForm<T>> {
    let margin = nondeg_margin(&omega)?.to_f64_lossy();
    let residual = lcs_residual(&omega, &lee)?.to_f64_lossy();
    let closed = lee.closedness_residual.to_f64_lossy();
    Ok(LcsForm {
        omega,
        lee,
        diagnostics: LcsDiagnostics {
            lcs_residual: residual,
            nondeg_margin: margin,
            closedness_residual: closed,
        },
    })
}

/// `f omega` with Lee form `theta + d ln f`.
pub fn conformal_rescale<T: Real>(form: &LcsForm<T>, f: &ScalarField<T>) -> Result<LcsForm<T>> {
    let min = f.min();
    if !(min > T::zero()) {
        return Err(Error::NonPositiveFunction {
            min: min.to_f64_lossy(),
        });
    }
    let omega = form.omega.mul_function(f)?;
    let log_f = f.map(T::ln);
    let lee = LeeForm {
        harmonic: form.lee.harmonic,
        potential: form.lee.potential.add(&log_f)?.mean_free(),
        closedness_residual: form.lee.closedness_residual,
    };
    refresh(omega, lee)
}

/// Rescales by `f = e^{-g}` so that the Lee form becomes its harmonic part.
pub fn gauge_normalize<T: Real>(form: &LcsForm<T>) -> Result<(LcsForm<T>, ScalarField<T>)> {
    let f = form.lee.potential.map(|g| (-g).exp());
    let omega = form.omega.mul_function(&f)?;
    let lee = LeeForm {
        harmonic: form.lee.harmonic,
        potential: ScalarField::zeros(*form.grid()),
        closedness_residual: form.lee.closedness_residual,
    };
    Ok((refresh(omega, lee)?, f))
}

fn closedness<T: Real>(theta: &DiffForm<T>) -> T {
    if theta.grid().dim() < 2 {
        return T::zero();
    }
    let d = ext_d(theta).expect("degree two fits").norm();
    d / theta.norm().max(T::one())
}

fn split_unchecked<T: Real>(theta: &DiffForm<T>, check_closed: bool) -> LeeForm<T> {
    let grid = *theta.grid();
    let n = grid.dim();
    let zero = Complex::new(T::zero(), T::zero());
    let mut harmonic = [T::zero(); MAX_DIM];
    let mut g = vec![zero; grid.len()];
    let mut norm2 = vec![T::zero(); grid.len()];
    for j in 0..n {
        let spec = theta.components()[j].spectrum();
        harmonic[j] = spec[0].re;
        let k = spectral::axis_wavenumbers::<T>(&grid, j);
        for (((gv, t), kk), q) in g.iter_mut().zip(spec).zip(&k).zip(norm2.iter_mut()) {
            // conj(2 pi i m_j) theta_j
            *gv += Complex::new(t.im * *kk, -t.re * *kk);
            *q += *kk * *kk;
        }
    }
    for ((gv, q), resolved) in g.iter_mut().zip(&norm2).zip(spectral::resolved_mask(&grid)) {
        *gv = if !resolved || *q == T::zero() { zero } else { *gv / *q };
    }
    LeeForm {
        harmonic,
        potential: ScalarField::from_spectrum(grid, &g),
        closedness_residual: if check_closed { closedness(theta) } else { T::zero() },
    }
}

/// Splits a closed 1-form into constant coefficients and a mean-free
/// potential, `theta = theta_h + dg`. An infinite `tol` skips the
/// closedness check, and the reported residual is then zero.
pub fn split_harmonic_exact<T: Real>(theta: &DiffForm<T>, tol: T) -> Result<LeeForm<T>> {
    if theta.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: theta.degree(),
        });
    }
    let lee = split_unchecked(theta, tol.is_finite());
    if !(lee.closedness_residual <= tol) {
        return Err(Error::NotClosed {
            residual: lee.closedness_residual.to_f64_lossy(),
            tolerance: tol.to_f64_lossy(),
        });
    }
    Ok(lee)
}

/// Per-mode exterior algebra maps `mu ^` and `i_{conj(mu)}` on `k`-forms.
struct ModeOps {
    n: usize,
    degree: usize,
    /// (out, axis, in, sign) for `mu ^ : Lambda^k -> Lambda^{k+1}`.
    up: Vec<(usize, usize, usize, i32)>,
    /// (out, axis, in, sign) for `i_{conj mu} : Lambda^{k+1} -> Lambda^k`.
    down: Vec<(usize, usize, usize, i32)>,
}

impl ModeOps {
    fn new(n: usize, degree: usize) -> Self {
        let table = basis::position_table(n);
        let mut up = Vec::new();
        let mut down = Vec::new();
        for (p, &s) in basis::index_sets(n, degree).iter().enumerate() {
            for j in 0..n {
                let sign = basis::insert_sign(j, s);
                if sign != 0 {
                    let q = table[(s | (1 << j)) as usize];
                    up.push((q, j, p, sign));
                    down.push((p, j, q, sign));
                }
            }
        }
        Self { n, degree, up, down }
    }

    fn wedge<T: Real>(&self, mu: &[Complex<T>], v: &[Complex<T>], out: &mut [Complex<T>]) {
        out.iter_mut().for_each(|o| *o = Complex::new(T::zero(), T::zero()));
        for &(q, j, p, s) in &self.up {
            out[q] += mu[j] * v[p] * T::from_i32(s).unwrap();
        }
    }

    fn interior_conj<T: Real>(&self, mu: &[Complex<T>], v: &[Complex<T>], out: &mut [Complex<T>]) {
        out.iter_mut().for_each(|o| *o = Complex::new(T::zero(), T::zero()));
        for &(p, j, q, s) in &self.down {
            out[p] += mu[j].conj() * v[q] * T::from_i32(s).unwrap();
        }
    }

    fn lower_len(&self) -> usize {
        basis::binomial(self.n, self.degree)
    }

    fn upper_len(&self) -> usize {
        basis::binomial(self.n, self.degree + 1)
    }
}

/// `mu(m) = 2 pi i m - c` for the mode at `idx`, or `None` on a Nyquist mode.
fn mode_mu<T: Real>(grid: &GridSpec, idx: usize, c: &[T]) -> Option<[Complex<T>; MAX_DIM]> {
    let m = grid.mode(idx)?;
    let mut mu = [Complex::new(T::zero(), T::zero()); MAX_DIM];
    for j in 0..grid.dim() {
        mu[j] = Complex::new(-c[j], T::two_pi() * T::from_i64(m[j]).unwrap());
    }
    Some(mu)
}

fn norm_sqr<T: Real>(mu: &[Complex<T>]) -> T {
    mu.iter().map(|z| z.norm_sqr()).sum()
}

fn spectra<T: Real>(a: &DiffForm<T>) -> Vec<&[Complex<T>]> {
    a.components().iter().map(|c| c.spectrum()).collect()
}

fn assemble<T: Real>(grid: GridSpec, degree: usize, spec: Vec<Vec<Complex<T>>>) -> DiffForm<T> {
    let comps = spec.iter().map(|s| ScalarField::from_spectrum(grid, s)).collect();
    DiffForm::from_components(grid, degree, comps).expect("component count matches degree")
}

/// Hodge decomposition of `a` for a constant Lee form.
pub fn hodge_decompose<T: Real>(a: &DiffForm<T>, lee: &LeeForm<T>) -> Result<HodgeDecomposition<T>> {
    a.grid().check_same(lee.grid())?;
    lee.require_constant()?;
    let grid = *a.grid();
    let n = grid.dim();
    let k = a.degree();
    let len = basis::binomial(n, k);
    let zero = Complex::new(T::zero(), T::zero());
    let specs = spectra(a);
    let mut parts = vec![vec![vec![zero; grid.len()]; len]; 4];
    let lower = (k > 0).then(|| ModeOps::new(n, k - 1));
    let upper = (k < n).then(|| ModeOps::new(n, k));
    let mut v = vec![zero; len];
    let mut tmp_lo = vec![zero; lower.as_ref().map_or(0, |o| o.lower_len())];
    let mut tmp_hi = vec![zero; upper.as_ref().map_or(0, |o| o.upper_len())];
    let mut ex = vec![zero; len];
    let mut co = vec![zero; len];
    for idx in 0..grid.len() {
        for (c, s) in specs.iter().enumerate() {
            v[c] = s[idx];
        }
        let Some(mu) = mode_mu(&grid, idx, lee.harmonic()) else {
            for c in 0..len {
                parts[3][c][idx] = v[c];
            }
            continue;
        };
        let lambda = norm_sqr(&mu[..n]);
        if lambda == T::zero() {
            for c in 0..len {
                parts[0][c][idx] = v[c];
            }
            continue;
        }
        ex.iter_mut().for_each(|z| *z = zero);
        co.iter_mut().for_each(|z| *z = zero);
        if let Some(ops) = &lower {
            ops.interior_conj(&mu, &v, &mut tmp_lo);
            ops.wedge(&mu, &tmp_lo, &mut ex);
        }
        if let Some(ops) = &upper {
            ops.wedge(&mu, &v, &mut tmp_hi);
            ops.interior_conj(&mu, &tmp_hi, &mut co);
        }
        for c in 0..len {
            parts[1][c][idx] = ex[c] / lambda;
            parts[2][c][idx] = co[c] / lambda;
        }
    }
    let mut it = parts.into_iter().map(|p| assemble(grid, k, p));
    Ok(HodgeDecomposition {
        harmonic: it.next().unwrap(),
        exact: it.next().unwrap(),
        coexact: it.next().unwrap(),
        unresolved: it.next().unwrap(),
    })
}

/// The primitive `alpha = d_theta^* Delta_theta^{-1} target` of a
/// `d_theta`-exact form, computed mode by mode for constant `theta`.
pub fn solve_primitive<T: Real>(target: &DiffForm<T>, lee: &LeeForm<T>) -> Result<HodgeSolveResult<T>> {
    target.grid().check_same(lee.grid())?;
    lee.require_constant()?;
    if target.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let grid = *target.grid();
    let n = grid.dim();
    let k = target.degree();
    let ops = ModeOps::new(n, k - 1);
    let zero = Complex::new(T::zero(), T::zero());
    let specs = spectra(target);
    let mut alpha = vec![vec![zero; grid.len()]; ops.lower_len()];
    let mut v = vec![zero; ops.upper_len()];
    let mut out = vec![zero; ops.lower_len()];
    let mut harmonic2 = T::zero();
    for idx in 0..grid.len() {
        let Some(mu) = mode_mu(&grid, idx, lee.harmonic()) else {
            continue;
        };
        for (c, s) in specs.iter().enumerate() {
            v[c] = s[idx];
        }
        let lambda = norm_sqr(&mu[..n]);
        if lambda == T::zero() {
            harmonic2 += v.iter().map(|z| z.norm_sqr()).sum::<T>();
            continue;
        }
        ops.interior_conj(&mu, &v, &mut out);
        for (a, o) in alpha.iter_mut().zip(&out) {
            a[idx] = *o / lambda;
        }
    }
    let primitive = assemble(grid, k - 1, alpha);
    let scale = target.norm();
    let residual = if scale == T::zero() {
        T::zero()
    } else {
        d_theta(&primitive, lee)?.sub(target)?.norm() / scale
    };
    Ok(HodgeSolveResult {
        primitive,
        residual,
        harmonic_part_norm: harmonic2.sqrt(),
    })
}

/// Dimensions of the twisted cohomology of `T^n` for a constant Lee form:
/// each resolved mode with `mu(m) = 0` contributes a full exterior algebra,
/// every other mode is Koszul-acyclic.
pub fn torus_twisted_betti<T: Real>(harmonic: &[T], grid: &GridSpec) -> Vec<usize> {
    let n = grid.dim();
    let kernel_modes = (0..grid.len())
        .filter(|&idx| mode_mu(grid, idx, harmonic).is_some_and(|mu| norm_sqr(&mu[..n]) == T::zero()))
        .count();
    (0..=n).map(|k| kernel_modes * basis::binomial(n, k)).collect()
}
