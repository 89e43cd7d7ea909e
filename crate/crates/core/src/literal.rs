//! Serializable form literals: Fourier coefficients per component.
//!
//! Axes are 1-based, matching `dx1 .. dxn`. Coefficients use the
//! normalization `f(x) = sum_m c_m exp(2 pi i m.x)`. A mode listed without
//! its conjugate partner receives the conjugate coefficient at load time.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::form::{basis, DiffForm};
use crate::grid::GridSpec;
use crate::scalar::Real;

/// Tolerance for an explicitly listed conjugate pair to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeLiteral {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentLiteral {
    pub component: Vec<usize>,
    pub modes: Vec<ModeLiteral>,
}

/// A differential form as a list of components; unlisted components vanish.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FormLiteral(pub Vec<ComponentLiteral>);

impl FormLiteral {
    /// Degree implied by the components; `None` for an empty literal.
    pub fn degree(&self) -> Option<usize> {
        self.0.first().map(|c| c.component.len())
    }

    /// Builds the form on `grid`. An empty literal is the zero form of
    /// degree `default_degree`.
    pub fn to_form<T: Real>(&self, grid: GridSpec, default_degree: usize) -> Result<DiffForm<T>> {
        let n = grid.dim();
        let degree = self.degree().unwrap_or(default_degree);
        if degree > n {
            return Err(Error::DegreeOverflow { degree, dim: n });
        }
        let mut comps: Vec<Option<ScalarField<T>>> = vec![None; basis::binomial(n, degree)];
        for c in &self.0 {
            if c.component.len() != degree {
                return Err(Error::Literal(format!(
                    "component {:?} has degree {}, expected {degree}",
                    c.component,
                    c.component.len()
                )));
            }
            let mut mask = 0u8;
            let mut last = 0;
            for &axis in &c.component {
                if axis == 0 || axis > n || axis <= last {
                    return Err(Error::Literal(format!(
                        "component {:?} must list strictly increasing axes in 1..={n}",
                        c.component
                    )));
                }
                last = axis;
                mask |= 1 << (axis - 1);
            }
            let pos = basis::position(n, mask);
            if comps[pos].is_some() {
                return Err(Error::Literal(format!("component {:?} listed twice", c.component)));
            }
            comps[pos] = Some(ScalarField::from_spectrum(grid, &hermitian_spectrum(grid, &c.modes)?));
        }
        let comps = comps
            .into_iter()
            .map(|c| c.unwrap_or_else(|| ScalarField::zeros(grid)))
            .collect();
        DiffForm::from_components(grid, degree, comps)
    }
}

fn hermitian_spectrum<T: Real>(grid: GridSpec, modes: &[ModeLiteral]) -> Result<Vec<Complex<T>>> {
    let n = grid.dim();
    let half = (grid.size() / 2) as i64;
    let mut given: BTreeMap<Vec<i64>, Complex<f64>> = BTreeMap::new();
    for m in modes {
        if m.k.len() != n {
            return Err(Error::Literal(format!("mode {:?} needs {n} entries", m.k)));
        }
        if m.k.iter().any(|v| v.abs() >= half) {
            return Err(Error::Literal(format!(
                "mode {:?} is not resolved: entries must satisfy |m| < {half}",
                m.k
            )));
        }
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::Literal(format!("mode {:?} has a non-finite coefficient", m.k)));
        }
        if given.insert(m.k.clone(), Complex::new(m.re, m.im)).is_some() {
            return Err(Error::Literal(format!("mode {:?} listed twice", m.k)));
        }
    }
    let mut full = given.clone();
    for (k, c) in &given {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        match given.get(&neg) {
            Some(partner) => {
                let gap = (partner - c.conj()).norm();
                if gap > HERMITIAN_TOL * (1.0 + c.norm()) {
                    return Err(Error::Literal(format!(
                        "modes {k:?} and {neg:?} are not complex conjugates"
                    )));
                }
            }
            None => {
                full.insert(neg, c.conj());
            }
        }
    }
    let mut spec = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for (k, c) in full {
        spec[grid.mode_index(&k)] = Complex::new(T::lit(c.re), T::lit(c.im));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn literal(json: &str) -> FormLiteral {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn single_mode_sine() {
        let g = GridSpec::new(2, 8).unwrap();
        let f = literal(r#"[{"component": [], "modes": [{"k": [1, 0], "re": 0.0, "im": -0.5}]}]"#)
            .to_form::<f64>(g, 0)
            .unwrap();
        assert!((f.components()[0].eval_at(&[0.25, 0.7]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn components_and_conjugate_pairs() {
        let g = GridSpec::new(4, 8).unwrap();
        let lit = literal(
            r#"[{"component": [1, 2], "modes": [{"k": [0,0,0,0], "re": 1.0}]},
                {"component": [3, 4], "modes": [{"k": [0,1,0,0], "re": 0.5, "im": 0.0},
                                                {"k": [0,-1,0,0], "re": 0.5, "im": 0.0}]}]"#,
        );
        let w = lit.to_form::<f64>(g, 2).unwrap();
        assert_eq!(w.degree(), 2);
        assert!((w.component(&[0, 1]).mean() - 1.0).abs() < 1e-15);
        let v = w.component(&[2, 3]).eval_at(&[0.0, 0.0, 0.0, 0.0]);
        assert!((v - 1.0).abs() < 1e-14);
        assert_eq!(w.component(&[0, 2]).max_abs(), 0.0);
    }

    #[test]
    fn rejects_malformed_literals() {
        let g = GridSpec::new(2, 8).unwrap();
        let bad = [
            r#"[{"component": [1], "modes": [{"k": [4, 0], "re": 1.0}]}]"#,
            r#"[{"component": [1], "modes": [{"k": [1], "re": 1.0}]}]"#,
            r#"[{"component": [2, 1], "modes": []}]"#,
            r#"[{"component": [3], "modes": []}]"#,
            r#"[{"component": [1], "modes": []}, {"component": [1, 2], "modes": []}]"#,
            r#"[{"component": [1], "modes": [{"k": [1, 0], "re": 1.0}, {"k": [-1, 0], "re": 2.0}]}]"#,
            r#"[{"component": [1], "modes": [{"k": [0, 0], "re": 0.0, "im": 1.0}]}]"#,
        ];
        for json in bad {
            assert!(
                matches!(literal(json).to_form::<f64>(g, 1), Err(Error::Literal(_))),
                "{json}"
            );
        }
        assert!(serde_json::from_str::<FormLiteral>(r#"[{"component": [1], "modes": [], "x": 1}]"#).is_err());
        let empty = FormLiteral::default().to_form::<f64>(g, 1).unwrap();
        assert_eq!((empty.degree(), empty.norm()), (1, 0.0));
    }
}
