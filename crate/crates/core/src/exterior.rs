//! Spectral exterior calculus on the flat torus: wedge, d, Hodge star,
//! interior products, the L2 pairing and point evaluation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::form::{basis, DiffForm, VectorField};
use crate::grid::{GridSpec, MAX_DIM};
use crate::scalar::Real;
use crate::spectral;

/// Relative coefficient level below which a mode counts as empty when
/// deciding whether a product can be formed at the nodes without aliasing.
const BANDWIDTH_CUTOFF: f64 = 1e-13;

/// One term `out += sign * left[l] * right[r]` of a bilinear pointwise map.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Term {
    pub out: usize,
    pub sign: i32,
    pub left: usize,
    pub right: usize,
}

fn joint_bandwidth<T: Real>(fields: &[&ScalarField<T>]) -> [usize; MAX_DIM] {
    let mut bw = [0usize; MAX_DIM];
    if fields.is_empty() {
        return bw;
    }
    let grid = *fields[0].grid();
    let scale = fields
        .iter()
        .flat_map(|f| f.spectrum().iter().map(|c| c.norm_sqr()))
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return bw;
    }
    let cut = scale * T::lit(BANDWIDTH_CUTOFF * BANDWIDTH_CUTOFF);
    for f in fields {
        for (idx, c) in f.spectrum().iter().enumerate() {
            if c.norm_sqr() <= cut {
                continue;
            }
            let multi = grid.unravel(idx);
            for axis in 0..grid.dim() {
                let m = grid
                    .frequency(multi[axis])
                    .map(|m| m.unsigned_abs() as usize)
                    .unwrap_or(grid.size() / 2);
                bw[axis] = bw[axis].max(m);
            }
        }
    }
    bw
}

/// Evaluates a bilinear pointwise map with de-aliasing: products are formed
/// on the twice-refined grid and truncated back. When the combined bandwidth
/// of the inputs is already resolved by the grid the nodal product is exact
/// and is used directly.
pub(crate) fn bilinear<T: Real>(
    grid: &GridSpec,
    left: &[&ScalarField<T>],
    right: &[&ScalarField<T>],
    terms: &[Term],
    outputs: usize,
) -> Vec<ScalarField<T>> {
    let used_left: Vec<&ScalarField<T>> = dedup_used(left, terms.iter().map(|t| t.left));
    let used_right: Vec<&ScalarField<T>> = dedup_used(right, terms.iter().map(|t| t.right));
    let bl = joint_bandwidth(&used_left);
    let br = joint_bandwidth(&used_right);
    let resolved = (0..grid.dim()).all(|a| bl[a] + br[a] < grid.size() / 2);
    if resolved {
        let mut out = vec![vec![T::zero(); grid.len()]; outputs];
        for t in terms {
            let (l, r) = (left[t.left].values(), right[t.right].values());
            let s = T::from_i32(t.sign).unwrap();
            for ((o, a), b) in out[t.out].iter_mut().zip(l).zip(r) {
                *o += s * *a * *b;
            }
        }
        return out
            .into_iter()
            .map(|v| ScalarField::from_values_unchecked(*grid, v))
            .collect();
    }
    let fine = grid.refined();
    let mut up_left: Vec<Option<Vec<T>>> = vec![None; left.len()];
    let mut up_right: Vec<Option<Vec<T>>> = vec![None; right.len()];
    for t in terms {
        if up_left[t.left].is_none() {
            up_left[t.left] = Some(spectral::upsample(grid, left[t.left].spectrum()));
        }
        if up_right[t.right].is_none() {
            up_right[t.right] = Some(spectral::upsample(grid, right[t.right].spectrum()));
        }
    }
    let mut out = vec![vec![T::zero(); fine.len()]; outputs];
    for t in terms {
        let l = up_left[t.left].as_ref().unwrap();
        let r = up_right[t.right].as_ref().unwrap();
        let s = T::from_i32(t.sign).unwrap();
        for ((o, a), b) in out[t.out].iter_mut().zip(l).zip(r) {
            *o += s * *a * *b;
        }
    }
    out.into_iter()
        .map(|v| {
            let coarse = spectral::downsample(grid, &spectral::forward(&fine, &v));
            ScalarField::from_spectrum(*grid, &coarse)
        })
        .collect()
}

fn dedup_used<'a, T: Real>(
    fields: &[&'a ScalarField<T>],
    indices: impl Iterator<Item = usize>,
) -> Vec<&'a ScalarField<T>> {
    let mut seen = vec![false; fields.len()];
    for i in indices {
        seen[i] = true;
    }
    fields.iter().zip(seen).filter_map(|(f, s)| s.then_some(*f)).collect()
}

fn wedge_terms(n: usize, k: usize, l: usize) -> Vec<Term> {
    let table = basis::position_table(n);
    let mut terms = Vec::new();
    for (i, &s) in basis::index_sets(n, k).iter().enumerate() {
        for (j, &t) in basis::index_sets(n, l).iter().enumerate() {
            let sign = basis::wedge_sign(s, t);
            if sign != 0 {
                terms.push(Term {
                    out: table[(s | t) as usize],
                    sign,
                    left: i,
                    right: j,
                });
            }
        }
    }
    terms
}

/// Terms of `(i_X b)_S = sum_j insert_sign(j, S) X^j b_{S+j}` with the vector
/// on the left and the `k`-form on the right.
fn interior_terms(n: usize, k: usize) -> Vec<Term> {
    let table = basis::position_table(n);
    let mut terms = Vec::new();
    for (o, &s) in basis::index_sets(n, k - 1).iter().enumerate() {
        for j in 0..n {
            let sign = basis::insert_sign(j, s);
            if sign != 0 {
                terms.push(Term {
                    out: o,
                    sign,
                    left: j,
                    right: table[(s | (1 << j)) as usize],
                });
            }
        }
    }
    terms
}

/// Exterior product `a ^ b`.
pub fn wedge<T: Real>(a: &DiffForm<T>, b: &DiffForm<T>) -> Result<DiffForm<T>> {
    a.grid().check_same(b.grid())?;
    let grid = *a.grid();
    let degree = a.degree() + b.degree();
    if degree > grid.dim() {
        return Err(Error::DegreeOverflow {
            degree,
            dim: grid.dim(),
        });
    }
    let terms = wedge_terms(grid.dim(), a.degree(), b.degree());
    let left: Vec<&ScalarField<T>> = a.components().iter().collect();
    let right: Vec<&ScalarField<T>> = b.components().iter().collect();
    let comps = bilinear(&grid, &left, &right, &terms, basis::binomial(grid.dim(), degree));
    DiffForm::from_components(grid, degree, comps)
}

/// Nodewise (collocation) exterior product, used for residual diagnostics of
/// equations that are posed at the nodes.
pub fn wedge_nodal<T: Real>(a: &DiffForm<T>, b: &DiffForm<T>) -> Result<DiffForm<T>> {
    a.grid().check_same(b.grid())?;
    let grid = *a.grid();
    let degree = a.degree() + b.degree();
    if degree > grid.dim() {
        return Err(Error::DegreeOverflow {
            degree,
            dim: grid.dim(),
        });
    }
    let mut out = vec![vec![T::zero(); grid.len()]; basis::binomial(grid.dim(), degree)];
    for t in wedge_terms(grid.dim(), a.degree(), b.degree()) {
        let (l, r) = (a.components()[t.left].values(), b.components()[t.right].values());
        let s = T::from_i32(t.sign).unwrap();
        for ((o, x), y) in out[t.out].iter_mut().zip(l).zip(r) {
            *o += s * *x * *y;
        }
    }
    DiffForm::from_components(
        grid,
        degree,
        out.into_iter()
            .map(|v| ScalarField::from_values_unchecked(grid, v))
            .collect(),
    )
}

/// Exterior derivative by spectral differentiation.
pub fn ext_d<T: Real>(a: &DiffForm<T>) -> Result<DiffForm<T>> {
    let grid = *a.grid();
    let n = grid.dim();
    let degree = a.degree() + 1;
    if degree > n {
        return Err(Error::DegreeOverflow { degree, dim: n });
    }
    let table = basis::position_table(n);
    let ks: Vec<Vec<T>> = (0..n).map(|j| spectral::axis_wavenumbers(&grid, j)).collect();
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![vec![zero; grid.len()]; basis::binomial(n, degree)];
    for (c, &s) in a.index_sets().iter().enumerate() {
        let spec = a.components()[c].spectrum();
        for j in 0..n {
            let sign = basis::insert_sign(j, s);
            if sign == 0 {
                continue;
            }
            let target = &mut out[table[(s | (1 << j)) as usize]];
            let sg = T::from_i32(sign).unwrap();
            for ((o, v), kj) in target.iter_mut().zip(spec).zip(&ks[j]) {
                let kk = *kj * sg;
                *o += Complex::new(-v.im * kk, v.re * kk);
            }
        }
    }
    DiffForm::from_components(
        grid,
        degree,
        out.iter().map(|s| ScalarField::from_spectrum(grid, s)).collect(),
    )
}

/// Flat-torus codifferential `d* b = -sum_j i_{e_j} d_j b`.
pub fn codifferential<T: Real>(b: &DiffForm<T>) -> Result<DiffForm<T>> {
    let grid = *b.grid();
    let n = grid.dim();
    if b.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let table = basis::position_table(n);
    let ks: Vec<Vec<T>> = (0..n).map(|j| spectral::axis_wavenumbers(&grid, j)).collect();
    let zero = Complex::new(T::zero(), T::zero());
    let out_sets = basis::index_sets(n, b.degree() - 1);
    let mut out = vec![vec![zero; grid.len()]; out_sets.len()];
    for (o, &s) in out_sets.iter().enumerate() {
        for j in 0..n {
            let sign = basis::insert_sign(j, s);
            if sign == 0 {
                continue;
            }
            let spec = b.components()[table[(s | (1 << j)) as usize]].spectrum();
            let sg = -T::from_i32(sign).unwrap();
            for ((t, v), kj) in out[o].iter_mut().zip(spec).zip(&ks[j]) {
                let kk = *kj * sg;
                *t += Complex::new(-v.im * kk, v.re * kk);
            }
        }
    }
    DiffForm::from_components(
        grid,
        b.degree() - 1,
        out.iter().map(|s| ScalarField::from_spectrum(grid, s)).collect(),
    )
}

/// Hodge star for the flat metric and orientation `dx_1 ^ ... ^ dx_n`.
pub fn hodge_star<T: Real>(a: &DiffForm<T>) -> DiffForm<T> {
    let grid = *a.grid();
    let n = grid.dim();
    let full = ((1u16 << n) - 1) as u8;
    let table = basis::position_table(n);
    let mut comps = vec![ScalarField::zeros(grid); basis::binomial(n, n - a.degree())];
    for (c, &s) in a.index_sets().iter().enumerate() {
        let comp = full & !s;
        let sign = basis::wedge_sign(s, comp);
        comps[table[comp as usize]] = a.components()[c].scale(T::from_i32(sign).unwrap());
    }
    DiffForm::from_components(grid, n - a.degree(), comps).expect("complementary degree")
}

/// Interior product `i_X a`.
pub fn contract<T: Real>(x: &VectorField<T>, a: &DiffForm<T>) -> Result<DiffForm<T>> {
    x.grid().check_same(a.grid())?;
    if a.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let grid = *a.grid();
    let n = grid.dim();
    let terms = interior_terms(n, a.degree());
    let left: Vec<&ScalarField<T>> = x.components().iter().collect();
    let right: Vec<&ScalarField<T>> = a.components().iter().collect();
    let comps = bilinear(&grid, &left, &right, &terms, basis::binomial(n, a.degree() - 1));
    DiffForm::from_components(grid, a.degree() - 1, comps)
}

/// Nodewise interior product.
pub fn contract_nodal<T: Real>(x: &VectorField<T>, a: &DiffForm<T>) -> Result<DiffForm<T>> {
    x.grid().check_same(a.grid())?;
    if a.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let grid = *a.grid();
    let n = grid.dim();
    let mut out = vec![vec![T::zero(); grid.len()]; basis::binomial(n, a.degree() - 1)];
    for t in interior_terms(n, a.degree()) {
        let (l, r) = (x.components()[t.left].values(), a.components()[t.right].values());
        let s = T::from_i32(t.sign).unwrap();
        for ((o, u), v) in out[t.out].iter_mut().zip(l).zip(r) {
            *o += s * *u * *v;
        }
    }
    DiffForm::from_components(
        grid,
        a.degree() - 1,
        out.into_iter()
            .map(|v| ScalarField::from_values_unchecked(grid, v))
            .collect(),
    )
}

/// Interior product with a constant vector.
pub fn contract_constant<T: Real>(v: &[T], a: &DiffForm<T>) -> Result<DiffForm<T>> {
    if a.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let grid = *a.grid();
    let n = grid.dim();
    let mut out = vec![vec![T::zero(); grid.len()]; basis::binomial(n, a.degree() - 1)];
    for t in interior_terms(n, a.degree()) {
        let c = v[t.left] * T::from_i32(t.sign).unwrap();
        if c == T::zero() {
            continue;
        }
        for (o, x) in out[t.out].iter_mut().zip(a.components()[t.right].values()) {
            *o += c * *x;
        }
    }
    DiffForm::from_components(
        grid,
        a.degree() - 1,
        out.into_iter()
            .map(|v| ScalarField::from_values_unchecked(grid, v))
            .collect(),
    )
}

/// `integral_M <a, b> dvol`, the mean over nodes of the component dot product.
pub fn l2_inner<T: Real>(a: &DiffForm<T>, b: &DiffForm<T>) -> Result<T> {
    a.check_compatible(b)?;
    let len = T::from_usize_lossy(a.grid().len());
    Ok(a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| x.values().iter().zip(y.values()).map(|(p, q)| *p * *q).sum::<T>())
        .sum::<T>()
        / len)
}

/// Evaluates every component of `a` at each point by trigonometric
/// interpolation; coordinates are wrapped into the unit cube.
pub fn eval_at<T: Real>(a: &DiffForm<T>, points: &[Vec<T>]) -> Vec<Vec<T>> {
    points
        .iter()
        .map(|p| a.components().iter().map(|c| c.eval_at(p)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Point;
    use std::f64::consts::TAU;

    fn g2() -> GridSpec {
        GridSpec::new(2, 16).unwrap()
    }

    fn g4() -> GridSpec {
        GridSpec::new(4, 8).unwrap()
    }

    #[test]
    fn wedge_of_coordinate_forms() {
        let g = g4();
        let dx1 = DiffForm::<f64>::basis_form(g, &[0]).unwrap();
        let dx2 = DiffForm::<f64>::basis_form(g, &[1]).unwrap();
        let w = wedge(&dx1, &dx2).unwrap();
        for (c, &s) in w.index_sets().iter().enumerate() {
            let expect = if s == 0b11 { 1.0 } else { 0.0 };
            assert!((w.components()[c].values()[5] - expect).abs() < 1e-15);
        }
        assert!(wedge(&dx1, &dx1).unwrap().max_abs() < 1e-15);
        let vol = DiffForm::<f64>::basis_form(g, &[0, 1, 2, 3]).unwrap();
        assert!(matches!(wedge(&dx1, &vol), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn wedge_matches_pointwise_product() {
        let g = g2();
        let a = DiffForm::monomial(ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[0]).sin()), &[0]).unwrap();
        let b = DiffForm::monomial(ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[1]).cos()), &[1]).unwrap();
        let w = wedge(&a, &b).unwrap();
        let oracle = ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[0]).sin() * (TAU * p[1]).cos());
        assert!(w.components()[0].sub(&oracle).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn dealiased_product_truncates_high_modes() {
        // Product of two mode-5 waves on N = 16 has mode 10 > 8, which must be
        // removed rather than aliased onto mode 6.
        let g = g2();
        let f = ScalarField::from_fn(g, |p: &Point<f64>| (TAU * 5.0 * p[0]).cos());
        let a = DiffForm::function(f.clone());
        let w = wedge(&a, &a).unwrap();
        let expect = ScalarField::constant(g, 0.5);
        assert!(w.components()[0].sub(&expect).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn d_of_sine_and_constant() {
        let g = g4();
        let f = DiffForm::function(ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[0]).sin()));
        let df = ext_d(&f).unwrap();
        let expect = ScalarField::from_fn(g, |p: &Point<f64>| TAU * (TAU * p[0]).cos());
        assert!(df.component(&[0]).sub(&expect).unwrap().max_abs() < 1e-12);
        assert!(df.component(&[1]).max_abs() < 1e-12);
        let c = DiffForm::function(ScalarField::constant(g, 3.0));
        assert!(ext_d(&c).unwrap().max_abs() < 1e-14);
        let vol = DiffForm::<f64>::basis_form(g, &[0, 1, 2, 3]).unwrap();
        assert!(ext_d(&vol).is_err());
    }

    #[test]
    fn star_conventions() {
        let g = g4();
        let a = DiffForm::<f64>::basis_form(g, &[0, 1]).unwrap();
        let s = hodge_star(&a);
        assert_eq!(s.component(&[2, 3]).values()[0], 1.0);
        let one = DiffForm::function(ScalarField::constant(g, 1.0));
        assert_eq!(hodge_star(&one).component(&[0, 1, 2, 3]).values()[0], 1.0);
        let b = DiffForm::<f64>::basis_form(g, &[1]).unwrap();
        // *dx2 = -dx1^dx3^dx4 in dimension 4
        assert_eq!(hodge_star(&b).component(&[0, 2, 3]).values()[0], -1.0);
    }

    #[test]
    fn codifferential_matches_star_d_star() {
        let g = GridSpec::new(3, 8).unwrap();
        let b = DiffForm::from_fn(g, 2, |p: &Point<f64>, c| {
            ((c + 1) as f64 * TAU * p[c % 3]).sin() + (TAU * p[2]).cos()
        })
        .unwrap();
        let direct = codifferential(&b).unwrap();
        // d* = (-1)^{n(k+1)+1} * d * on k-forms
        let (n, k) = (3, 2);
        let sign = if (n * (k + 1) + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let via_star = hodge_star(&ext_d(&hodge_star(&b)).unwrap()).scale(sign);
        assert!(direct.sub(&via_star).unwrap().max_abs() < 1e-12);
        let f = DiffForm::monomial(ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[0]).sin()), &[0]).unwrap();
        let expect = ScalarField::from_fn(g, |p: &Point<f64>| -TAU * (TAU * p[0]).cos());
        assert!(
            codifferential(&f).unwrap().components()[0]
                .sub(&expect)
                .unwrap()
                .max_abs()
                < 1e-12
        );
    }

    #[test]
    fn interior_products() {
        let g = g4();
        let e1 = VectorField::constant(g, &[1.0, 0.0, 0.0, 0.0]);
        let a = DiffForm::<f64>::basis_form(g, &[0, 1]).unwrap();
        let i = contract(&e1, &a).unwrap();
        assert_eq!(i.component(&[1]).values()[3], 1.0);
        assert_eq!(i.component(&[0]).values()[3], 0.0);
        let f = ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[2]).cos());
        let x = VectorField::new(
            g,
            vec![ScalarField::zeros(g), f, ScalarField::zeros(g), ScalarField::zeros(g)],
        )
        .unwrap();
        let dx1 = DiffForm::<f64>::basis_form(g, &[0]).unwrap();
        assert!(contract(&x, &dx1).unwrap().max_abs() < 1e-15);
        assert!(contract(&x, &DiffForm::function(ScalarField::zeros(g))).is_err());
    }

    #[test]
    fn inner_products_of_coframe() {
        let g = g4();
        let dx1 = DiffForm::<f64>::basis_form(g, &[0]).unwrap();
        let dx2 = DiffForm::<f64>::basis_form(g, &[1]).unwrap();
        assert!((l2_inner(&dx1, &dx1).unwrap() - 1.0).abs() < 1e-15);
        assert!(l2_inner(&dx1, &dx2).unwrap().abs() < 1e-15);
        let s = DiffForm::function(ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[0]).sin()));
        assert!((l2_inner(&s, &s).unwrap() - 0.5).abs() < 1e-14);
        assert!(l2_inner(&dx1, &s).is_err());
    }

    #[test]
    fn point_evaluation() {
        let g = g4();
        let c = DiffForm::<f64>::basis_form(g, &[0, 2]).unwrap().scale(2.5);
        let v = eval_at(&c, &[vec![0.3, 0.7, 0.1, 0.9]]);
        assert!((v[0][1] - 2.5).abs() < 1e-14);
        let s = DiffForm::function(ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[0]).sin()));
        assert!((eval_at(&s, &[vec![0.25, 0.0, 0.0, 0.0]])[0][0] - 1.0).abs() < 1e-14);
        assert!((eval_at(&s, &[vec![1.25, 0.0, 0.0, 0.0]])[0][0] - 1.0).abs() < 1e-14);
    }
}
