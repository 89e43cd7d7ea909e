//! Pullbacks along flows, conformal comparison of 2-forms and the
//! infinitesimal Moser identity.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::contract_nodal;
use crate::field::ScalarField;
use crate::form::{basis, DiffForm, VectorField};
use crate::lichnerowicz::{d_theta_nodal, LeeForm};
use crate::linalg::Mat4;
use crate::scalar::Real;
use crate::spectral::SpectralBundle;

use super::flow::FlowState;

const BUNDLE_CUTOFF: f64 = 1e-13;
/// Components below this fraction of the largest one are ignored by
/// [`conformal_compare`].
pub const RATIO_THRESHOLD: f64 = 1e-6;

/// `(phi_t^* omega)(x) = J^T Omega(phi_t(x)) J` on the seed grid.
pub fn pullback_form<T: Real>(omega: &DiffForm<T>, flow: &FlowState<T>) -> Result<DiffForm<T>> {
    if omega.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: omega.degree(),
        });
    }
    let grid = *omega.grid();
    let n = grid.dim();
    let sets = basis::index_sets(n, 2);
    let pairs: Vec<(usize, usize)> = sets
        .iter()
        .map(|&m| {
            let a = basis::axes(m);
            (a[0], a[1])
        })
        .collect();
    let spectra: Vec<_> = omega.components().iter().map(|c| c.spectrum()).collect();
    let bundle = SpectralBundle::new(&grid, &spectra, T::lit(BUNDLE_CUTOFF));
    let values: Vec<Vec<T>> = flow
        .positions
        .par_iter()
        .zip(flow.jacobians.par_iter())
        .map_init(
            || (vec![T::zero(); pairs.len()], Vec::new()),
            |(buf, powers), (x, j)| {
                bundle.eval_into(x, buf, powers);
                let mut w: Mat4<T> = [[T::zero(); 4]; 4];
                for (&(a, b), v) in pairs.iter().zip(buf.iter()) {
                    w[a][b] = *v;
                    w[b][a] = -*v;
                }
                // lower triangle of J^T W J, negated into the upper one
                pairs
                    .iter()
                    .map(|&(a, b)| {
                        let mut s = T::zero();
                        for p in 0..n {
                            for q in 0..n {
                                s += j[p][b] * w[p][q] * j[q][a];
                            }
                        }
                        -s
                    })
                    .collect()
            },
        )
        .collect();
    let comps = (0..pairs.len())
        .map(|c| ScalarField::new(grid, values.iter().map(|v| v[c]).collect()))
        .collect::<Result<Vec<_>>>()?;
    DiffForm::from_components(grid, 2, comps)
}

#[derive(Clone, Debug)]
pub struct ConformalComparison<T: Real> {
    /// Weighted mean of the component ratios `a_S / b_S`.
    pub factor: ScalarField<T>,
    /// `max_x (max_S r_S - min_S r_S) / |factor|`.
    pub consistency_error: T,
    pub min_factor: T,
    pub positive: bool,
}

/// Extracts `f` with `a = f b` from component ratios, weighting each valid
/// component by `|b_S|`.
pub fn conformal_compare<T: Real>(a: &DiffForm<T>, b: &DiffForm<T>) -> Result<ConformalComparison<T>> {
    a.check_compatible(b)?;
    let grid = *a.grid();
    let scale = b.max_abs();
    let threshold = T::lit(RATIO_THRESHOLD) * scale;
    let mut factor = vec![T::zero(); grid.len()];
    let mut consistency = T::zero();
    for (i, f) in factor.iter_mut().enumerate() {
        let mut wsum = T::zero();
        let mut acc = T::zero();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for (ca, cb) in a.components().iter().zip(b.components()) {
            let bv = cb.values()[i];
            if bv.abs() < threshold || bv == T::zero() {
                continue;
            }
            let r = ca.values()[i] / bv;
            acc += bv.abs() * r;
            wsum += bv.abs();
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if wsum == T::zero() {
            return Err(Error::NoValidComponents { node: i });
        }
        *f = acc / wsum;
        let spread = (hi - lo) / f.abs();
        consistency = consistency.max(if spread.is_nan() { T::infinity() } else { spread });
    }
    let field = ScalarField::new(grid, factor)?;
    let min_factor = field.min();
    Ok(ConformalComparison {
        factor: field,
        consistency_error: consistency,
        min_factor,
        positive: min_factor > T::zero(),
    })
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Eq1Residuals {
    /// `|w' + d_w(i_X w) + w(X) w| / max term` for the rescaled family.
    pub eq1: f64,
    /// `|d/dt(f w) + d_{w + d ln f}(f i_X w)| / max term` with `f = e^E`.
    pub necessity: f64,
}

fn relative<T: Real>(defect: &DiffForm<T>, terms: &[T]) -> T {
    let scale = terms.iter().copied().fold(T::zero(), T::max);
    if scale == T::zero() {
        T::zero()
    } else {
        defect.norm() / scale
    }
}

/// Evaluates the infinitesimal Moser identity for the family
/// `w_t = e^{-lambda} omega_t`, whose Lee form is `theta - d lambda`, along
/// the field `X`; `lambda` is the Eulerian log factor with rate
/// `lambda_dot`, so that `phi_t^* w_t = w_0`. The necessity bookkeeping uses
/// `f = e^E` with `E' = (theta - d lambda)(X)`.
pub fn verify_eq1<T: Real>(
    omega: &DiffForm<T>,
    lee: &LeeForm<T>,
    omega_dot: &DiffForm<T>,
    x: &VectorField<T>,
    lambda: &ScalarField<T>,
    lambda_dot: &ScalarField<T>,
    lee_integral: &ScalarField<T>,
) -> Result<Eq1Residuals> {
    let decay = lambda.map(|v| (-v).exp());
    let w = omega.mul_function(&decay)?;
    let lee_w = LeeForm::from_parts(lee.harmonic(), lee.potential().sub(lambda)?)?;
    let w_dot = omega_dot.sub(&omega.mul_function(lambda_dot)?)?.mul_function(&decay)?;
    let beta = contract_nodal(x, &w)?;
    let lee_x = lee_w.apply(x)?;
    let a = &w_dot;
    let b = d_theta_nodal(&beta, &lee_w)?;
    let c = w.mul_function(&lee_x)?;
    let eq1 = relative(&a.add(&b)?.add(&c)?, &[a.norm(), b.norm(), c.norm()]);

    let f = lee_integral.map(T::exp);
    let lhs = w.mul_function(&lee_x)?.add(&w_dot)?.mul_function(&f)?;
    let lee_f = LeeForm::from_parts(lee_w.harmonic(), lee_w.potential().add(lee_integral)?)?;
    let rhs = d_theta_nodal(&beta.mul_function(&f)?, &lee_f)?.scale(-T::one());
    let necessity = relative(&lhs.sub(&rhs)?, &[lhs.norm(), rhs.norm()]);
    Ok(Eq1Residuals {
        eq1: eq1.to_f64_lossy(),
        necessity: necessity.to_f64_lossy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, Point};
    use std::f64::consts::TAU;

    #[test]
    fn ratio_examples() {
        let g = GridSpec::new(4, 8).unwrap();
        let b = DiffForm::<f64>::basis_form(g, &[0, 1])
            .unwrap()
            .add(&DiffForm::basis_form(g, &[2, 3]).unwrap())
            .unwrap();
        let c = conformal_compare(&b.scale(2.0), &b).unwrap();
        assert!(c.consistency_error < 1e-12 && (c.factor.values()[5] - 2.0).abs() < 1e-15);
        let f = ScalarField::from_fn(g, |p: &Point<f64>| (TAU * p[0]).sin().exp());
        let c = conformal_compare(&b.mul_function(&f).unwrap(), &b).unwrap();
        assert!(c.factor.sub(&f).unwrap().max_abs() < 1e-12);
        let bad = b.add(&DiffForm::basis_form(g, &[0, 2]).unwrap()).unwrap();
        let c = conformal_compare(
            &bad,
            &b.add(&DiffForm::basis_form(g, &[0, 2]).unwrap().scale(1e-3)).unwrap(),
        )
        .unwrap();
        assert!(c.consistency_error > 1.0);
        let z = DiffForm::zero(g, 2).unwrap();
        assert!(matches!(
            conformal_compare(&b, &z),
            Err(Error::NoValidComponents { .. })
        ));
    }

    #[test]
    fn identity_pullback() {
        let g = GridSpec::new(2, 8).unwrap();
        let w = DiffForm::monomial(
            ScalarField::from_fn(g, |p: &Point<f64>| 2.0 + (TAU * p[1]).cos()),
            &[0, 1],
        )
        .unwrap();
        let p = pullback_form(&w, &FlowState::identity(&g)).unwrap();
        assert!(p.sub(&w).unwrap().max_abs() < 1e-13);
    }
}
