//! Built-in families.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::form::{basis, DiffForm};
use crate::grid::{GridSpec, Point};
use crate::scalar::Real;

use super::family::{ExactPrimitive, FamilyGenerator};

/// Builds a form from a closure filling all component values at a node.
pub fn form_from_nodes<T: Real>(grid: GridSpec, degree: usize, f: impl Fn(&Point<T>, &mut [T])) -> DiffForm<T> {
    let count = basis::binomial(grid.dim(), degree);
    let mut values = vec![vec![T::zero(); grid.len()]; count];
    let mut buf = vec![T::zero(); count];
    for i in 0..grid.len() {
        f(&grid.node(i), &mut buf);
        for (v, b) in values.iter_mut().zip(&buf) {
            v[i] = *b;
        }
    }
    let comps = values
        .into_iter()
        .map(|v| ScalarField::new(grid, v).expect("node count"))
        .collect();
    DiffForm::from_components(grid, degree, comps).expect("component count")
}

fn require_dim(grid: &GridSpec, n: usize, name: &str) -> Result<()> {
    if grid.dim() != n {
        return Err(Error::InvalidFamily(format!(
            "{name} needs n = {n}, got n = {}",
            grid.dim()
        )));
    }
    Ok(())
}

/// Rotating contact form times a circle on `T^4`.
///
/// With `u = 2 pi x1 + s t`, `c_t = c + c_rate t` and
/// `eta_t = cos u dx2 + sin u dx3 + eps t cos(2 pi x3) dx4`, the family is
/// `omega_t = e^{t b h} (d eta_t - c_t dx4 ^ eta_t)` with `h = sin(2 pi x2)`.
/// Its Lee form is `c_t dx4 + t b dh`; the class drifts iff `c_rate != 0`.
#[derive(Clone, Debug)]
pub struct ContactCircle<T> {
    pub grid: GridSpec,
    pub c: T,
    pub speed: T,
    pub c_rate: T,
    pub eps: T,
    pub twist: T,
}

impl<T: Real> ContactCircle<T> {
    pub fn new(grid: GridSpec, c: T, speed: T) -> Result<Self> {
        require_dim(&grid, 4, "contact_circle")?;
        Ok(Self {
            grid,
            c,
            speed,
            c_rate: T::zero(),
            eps: T::zero(),
            twist: T::zero(),
        })
    }

    pub fn with_c_rate(mut self, rate: T) -> Self {
        self.c_rate = rate;
        self
    }

    pub fn with_eps(mut self, eps: T) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_twist(mut self, b: T) -> Self {
        self.twist = b;
        self
    }

    fn u(&self, p: &Point<T>, t: T) -> T {
        T::two_pi() * p[0] + self.speed * t
    }

    fn h(&self, p: &Point<T>) -> T {
        (T::two_pi() * p[1]).sin()
    }

    /// Untwisted form and its derivative at one node, components
    /// `12 13 14 23 24 34`.
    fn base(&self, p: &Point<T>, t: T) -> ([T; 6], [T; 6]) {
        let tau = T::two_pi();
        let (su, cu) = self.u(p, t).sin_cos();
        let ct = self.c + self.c_rate * t;
        let s3 = (tau * p[2]).sin();
        let w = [
            -tau * su,
            tau * cu,
            T::zero(),
            T::zero(),
            ct * cu,
            ct * su - tau * self.eps * t * s3,
        ];
        let s = self.speed;
        let wd = [
            -tau * s * cu,
            -tau * s * su,
            T::zero(),
            T::zero(),
            self.c_rate * cu - ct * s * su,
            self.c_rate * su + ct * s * cu - tau * self.eps * s3,
        ];
        (w, wd)
    }

    fn eta(&self, p: &Point<T>, t: T) -> ([T; 4], [T; 4]) {
        let (su, cu) = self.u(p, t).sin_cos();
        let c3 = (T::two_pi() * p[2]).cos();
        let s = self.speed;
        (
            [T::zero(), cu, su, self.eps * t * c3],
            [T::zero(), -s * su, s * cu, self.eps * c3],
        )
    }
}

impl<T: Real> FamilyGenerator<T> for ContactCircle<T> {
    fn name(&self) -> &str {
        "contact_circle"
    }

    fn grid(&self) -> GridSpec {
        self.grid
    }

    fn omega(&self, t: T) -> DiffForm<T> {
        form_from_nodes(self.grid, 2, |p, out| {
            let (w, _) = self.base(p, t);
            let f = (t * self.twist * self.h(p)).exp();
            for (o, v) in out.iter_mut().zip(w) {
                *o = f * v;
            }
        })
    }

    fn omega_dot(&self, t: T) -> Option<DiffForm<T>> {
        Some(form_from_nodes(self.grid, 2, |p, out| {
            let (w, wd) = self.base(p, t);
            let bh = self.twist * self.h(p);
            let f = (t * bh).exp();
            for ((o, v), d) in out.iter_mut().zip(w).zip(wd) {
                *o = f * (bh * v + d);
            }
        }))
    }

    fn exact_data(&self) -> Option<&dyn ExactPrimitive<T>> {
        (self.c_rate == T::zero()).then_some(self as &dyn ExactPrimitive<T>)
    }
}

impl<T: Real> ExactPrimitive<T> for ContactCircle<T> {
    fn alpha(&self, t: T) -> DiffForm<T> {
        form_from_nodes(self.grid, 1, |p, out| {
            let (e, _) = self.eta(p, t);
            let f = (t * self.twist * self.h(p)).exp();
            for (o, v) in out.iter_mut().zip(e) {
                *o = f * v;
            }
        })
    }

    fn alpha_dot(&self, t: T) -> DiffForm<T> {
        form_from_nodes(self.grid, 1, |p, out| {
            let (e, ed) = self.eta(p, t);
            let bh = self.twist * self.h(p);
            let f = (t * bh).exp();
            for ((o, v), d) in out.iter_mut().zip(e).zip(ed) {
                *o = f * (bh * v + d);
            }
        })
    }

    fn h(&self, _t: T) -> ScalarField<T> {
        ScalarField::from_fn(self.grid, |p| self.twist * self.h(p))
    }
}

/// Area forms on `T^2`:
/// `omega_t = (1 + t (eps (sin(2 pi x1) sin(2 pi x2) - kappa) + sigma)) dx1 ^ dx2`,
/// where `kappa` is the mean of the bump (zero), so the total area changes
/// only through `sigma`.
#[derive(Clone, Debug)]
pub struct AreaInterpolation<T> {
    pub grid: GridSpec,
    pub eps: T,
    pub sigma: T,
    kappa: T,
}

impl<T: Real> AreaInterpolation<T> {
    pub fn new(grid: GridSpec, eps: T, sigma: T) -> Result<Self> {
        require_dim(&grid, 2, "area_interpolation")?;
        let kappa = ScalarField::from_fn(grid, |p: &Point<T>| Self::bump(p)).mean();
        Ok(Self {
            grid,
            eps,
            sigma,
            kappa,
        })
    }

    fn bump(p: &Point<T>) -> T {
        (T::two_pi() * p[0]).sin() * (T::two_pi() * p[1]).sin()
    }

    fn rate(&self, p: &Point<T>) -> T {
        self.eps * (Self::bump(p) - self.kappa) + self.sigma
    }
}

impl<T: Real> FamilyGenerator<T> for AreaInterpolation<T> {
    fn name(&self) -> &str {
        "area_interpolation"
    }

    fn grid(&self) -> GridSpec {
        self.grid
    }

    fn omega(&self, t: T) -> DiffForm<T> {
        form_from_nodes(self.grid, 2, |p, out| out[0] = T::one() + t * self.rate(p))
    }

    fn omega_dot(&self, _t: T) -> Option<DiffForm<T>> {
        Some(form_from_nodes(self.grid, 2, |p, out| out[0] = self.rate(p)))
    }
}

/// Globally conformally symplectic family on `T^4`:
/// `omega_t = e^{a t sin(2 pi x2)} (dx1 ^ dx2 + dx3 ^ dx4 - 2 pi eps t cos(2 pi x3) dx1 ^ dx3)`.
#[derive(Clone, Debug)]
pub struct GcsRescale<T> {
    pub grid: GridSpec,
    pub a: T,
    pub eps: T,
}

impl<T: Real> GcsRescale<T> {
    pub fn new(grid: GridSpec, a: T, eps: T) -> Result<Self> {
        require_dim(&grid, 4, "gcs_rescale")?;
        Ok(Self { grid, a, eps })
    }

    fn parts(&self, p: &Point<T>, t: T) -> (T, T, [T; 6], [T; 6]) {
        let tau = T::two_pi();
        let g = self.a * (tau * p[1]).sin();
        let c3 = (tau * p[2]).cos();
        let b = [
            T::one(),
            -tau * self.eps * t * c3,
            T::zero(),
            T::zero(),
            T::zero(),
            T::one(),
        ];
        let bd = [
            T::zero(),
            -tau * self.eps * c3,
            T::zero(),
            T::zero(),
            T::zero(),
            T::zero(),
        ];
        ((t * g).exp(), g, b, bd)
    }
}

impl<T: Real> FamilyGenerator<T> for GcsRescale<T> {
    fn name(&self) -> &str {
        "gcs_rescale"
    }

    fn grid(&self) -> GridSpec {
        self.grid
    }

    fn omega(&self, t: T) -> DiffForm<T> {
        form_from_nodes(self.grid, 2, |p, out| {
            let (f, _, b, _) = self.parts(p, t);
            for (o, v) in out.iter_mut().zip(b) {
                *o = f * v;
            }
        })
    }

    fn omega_dot(&self, t: T) -> Option<DiffForm<T>> {
        Some(form_from_nodes(self.grid, 2, |p, out| {
            let (f, g, b, bd) = self.parts(p, t);
            for ((o, v), d) in out.iter_mut().zip(b).zip(bd) {
                *o = f * (g * v + d);
            }
        }))
    }
}

/// Straight-line family `(1 - t) omega_0 + t omega_1`.
#[derive(Clone, Debug)]
pub struct LinearFamily<T: Real> {
    start: DiffForm<T>,
    delta: DiffForm<T>,
}

impl<T: Real> LinearFamily<T> {
    pub fn new(start: DiffForm<T>, end: DiffForm<T>) -> Result<Self> {
        if start.degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: start.degree(),
            });
        }
        let delta = end.sub(&start)?;
        Ok(Self { start, delta })
    }

    pub fn constant(omega: DiffForm<T>) -> Result<Self> {
        Self::new(omega.clone(), omega)
    }
}

impl<T: Real> FamilyGenerator<T> for LinearFamily<T> {
    fn name(&self) -> &str {
        "linear"
    }

    fn grid(&self) -> GridSpec {
        *self.start.grid()
    }

    fn omega(&self, t: T) -> DiffForm<T> {
        self.start.add(&self.delta.scale(t)).expect("same grid")
    }

    fn omega_dot(&self, _t: T) -> Option<DiffForm<T>> {
        Some(self.delta.clone())
    }
}

/// Family given by samples at `t_i = i / M`. Values between samples come
/// from local degree-four Lagrange interpolation; derivatives at the samples
/// from fourth-order differences, interpolated the same way.
#[derive(Clone, Debug)]
pub struct Tabulated<T: Real> {
    samples: Vec<DiffForm<T>>,
    derivatives: Vec<DiffForm<T>>,
}

impl<T: Real> Tabulated<T> {
    pub fn new(samples: Vec<DiffForm<T>>) -> Result<Self> {
        if samples.len() < 5 {
            return Err(Error::InvalidFamily(format!(
                "tabulated family needs at least 5 samples, got {}",
                samples.len()
            )));
        }
        for s in &samples {
            s.check_compatible(&samples[0])?;
        }
        if samples[0].degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: samples[0].degree(),
            });
        }
        let m = samples.len() - 1;
        let inv12h = T::from_usize_lossy(m) / T::lit(12.0);
        let derivatives = (0..=m)
            .map(|i| {
                let (offsets, weights): (Vec<isize>, [f64; 5]) = if i >= 2 && i + 2 <= m {
                    (vec![-2, -1, 0, 1, 2], [1.0, -8.0, 0.0, 8.0, -1.0])
                } else if i < 2 {
                    let base = -(i as isize);
                    ((0..5).map(|k| base + k).collect(), one_sided(i))
                } else {
                    let base = (m - i) as isize;
                    let w = one_sided(m - i);
                    ((0..5).map(|k| base - k).collect(), w.map(|v| -v))
                };
                let mut acc = DiffForm::zero(*samples[0].grid(), 2).expect("degree two");
                for (o, w) in offsets.iter().zip(weights) {
                    if w != 0.0 {
                        let j = (i as isize + o) as usize;
                        acc = acc.add(&samples[j].scale(T::lit(w) * inv12h)).expect("same grid");
                    }
                }
                acc
            })
            .collect();
        Ok(Self { samples, derivatives })
    }

    fn interpolate(table: &[DiffForm<T>], t: T) -> DiffForm<T> {
        let m = table.len() - 1;
        let x = t.max(T::zero()).min(T::one()) * T::from_usize_lossy(m);
        let centre = x.round().to_usize().unwrap_or(0);
        let first = centre.saturating_sub(2).min(m - 4);
        let nodes: Vec<usize> = (first..first + 5).collect();
        let mut acc = DiffForm::zero(*table[0].grid(), table[0].degree()).expect("valid degree");
        for &j in &nodes {
            let mut w = T::one();
            for &k in &nodes {
                if k != j {
                    w *= (x - T::from_usize_lossy(k)) / (T::from_usize_lossy(j) - T::from_usize_lossy(k));
                }
            }
            acc = acc.add(&table[j].scale(w)).expect("same grid");
        }
        acc
    }
}

/// Five-point forward stencil for the derivative at offset `i` (0 or 1)
/// from the first sample, scaled by 12.
fn one_sided(i: usize) -> [f64; 5] {
    if i == 0 {
        [-25.0, 48.0, -36.0, 16.0, -3.0]
    } else {
        [-3.0, -10.0, 18.0, -6.0, 1.0]
    }
}

impl<T: Real> FamilyGenerator<T> for Tabulated<T> {
    fn name(&self) -> &str {
        "tabulated"
    }

    fn grid(&self) -> GridSpec {
        *self.samples[0].grid()
    }

    fn omega(&self, t: T) -> DiffForm<T> {
        Self::interpolate(&self.samples, t)
    }

    fn omega_dot(&self, t: T) -> Option<DiffForm<T>> {
        Some(Self::interpolate(&self.derivatives, t))
    }
}

/// A family multiplied by a fixed positive function `f`; the Lee forms
/// shift by `d ln f` and primitives scale by `f`.
#[derive(Clone)]
pub struct Rescaled<T: Real> {
    inner: Arc<dyn FamilyGenerator<T>>,
    factor: ScalarField<T>,
    name: String,
}

impl<T: Real> Rescaled<T> {
    pub fn new(inner: Arc<dyn FamilyGenerator<T>>, factor: ScalarField<T>) -> Result<Self> {
        inner.grid().check_same(factor.grid())?;
        let min = factor.min();
        if min <= T::zero() {
            return Err(Error::NonPositiveFunction {
                min: min.to_f64_lossy(),
            });
        }
        let name = format!("rescaled_{}", inner.name());
        Ok(Self { inner, factor, name })
    }
}

impl<T: Real> FamilyGenerator<T> for Rescaled<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn grid(&self) -> GridSpec {
        self.inner.grid()
    }

    fn omega(&self, t: T) -> DiffForm<T> {
        self.inner.omega(t).mul_function(&self.factor).expect("same grid")
    }

    fn omega_dot(&self, t: T) -> Option<DiffForm<T>> {
        self.inner
            .omega_dot(t)
            .map(|w| w.mul_function(&self.factor).expect("same grid"))
    }

    fn exact_data(&self) -> Option<&dyn ExactPrimitive<T>> {
        self.inner.exact_data().map(|_| self as &dyn ExactPrimitive<T>)
    }
}

impl<T: Real> ExactPrimitive<T> for Rescaled<T> {
    fn alpha(&self, t: T) -> DiffForm<T> {
        let inner = self.inner.exact_data().expect("checked in exact_data");
        inner.alpha(t).mul_function(&self.factor).expect("same grid")
    }

    fn alpha_dot(&self, t: T) -> DiffForm<T> {
        let inner = self.inner.exact_data().expect("checked in exact_data");
        inner.alpha_dot(t).mul_function(&self.factor).expect("same grid")
    }

    fn h(&self, t: T) -> ScalarField<T> {
        self.inner.exact_data().expect("checked in exact_data").h(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lichnerowicz::{validate_lcs, LcsOptions};
    use crate::moser::family::finite_difference;

    #[test]
    fn contact_circle_lee_form_and_margin() {
        let g = GridSpec::new(4, 8).unwrap();
        let fam = ContactCircle::new(g, 1.0, std::f64::consts::FRAC_PI_4).unwrap();
        let l = validate_lcs(&fam.omega(0.3), &LcsOptions::default()).unwrap();
        assert!((l.lee().harmonic()[3] - 1.0).abs() < 1e-12);
        assert!((l.diagnostics().nondeg_margin - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let g = GridSpec::new(4, 8).unwrap();
        let fam = ContactCircle::new(g, 1.0, 0.7)
            .unwrap()
            .with_eps(0.05)
            .with_twist(0.25)
            .with_c_rate(0.1);
        let fd = finite_difference(|s| fam.omega(s), 0.5, 1e-3).unwrap();
        assert!(fd.sub(&fam.omega_dot(0.5).unwrap()).unwrap().max_abs() < 1e-9);
        let fd = finite_difference(|s| fam.alpha(s), 0.0, 1e-3).unwrap();
        assert!(fd.sub(&fam.alpha_dot(0.0)).unwrap().max_abs() < 1e-9);
        let gcs = GcsRescale::new(g, 0.3, 0.05).unwrap();
        let fd = finite_difference(|s| gcs.omega(s), 1.0, 1e-3).unwrap();
        assert!(fd.sub(&gcs.omega_dot(1.0).unwrap()).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn tabulated_reproduces_quartic_in_time() {
        let g = GridSpec::new(2, 8).unwrap();
        let base = DiffForm::<f64>::basis_form(g, &[0, 1]).unwrap();
        let f = |t: f64| 1.0 + t + 0.5 * t * t - t.powi(3) + 0.25 * t.powi(4);
        let df = |t: f64| 1.0 + t - 3.0 * t * t + t.powi(3);
        let samples = (0..=8).map(|i| base.scale(f(i as f64 / 8.0))).collect();
        let tab = Tabulated::new(samples).unwrap();
        for &t in &[0.0, 0.13, 0.5, 0.97, 1.0] {
            let v = tab.omega(t).components()[0].values()[0];
            let d = tab.omega_dot(t).unwrap().components()[0].values()[0];
            assert!((v - f(t)).abs() < 1e-12, "value at {t}");
            assert!((d - df(t)).abs() < 1e-10, "derivative at {t}: {d} vs {}", df(t));
        }
    }
}
