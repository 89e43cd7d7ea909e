//! Time-parametrized families of 2-forms, `t` in `[0, 1]`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::form::DiffForm;
use crate::grid::GridSpec;
use crate::lichnerowicz::{validate_lcs, LcsForm, LcsOptions};
use crate::scalar::Real;

/// Source of the forms `omega_t`.
pub trait FamilyGenerator<T: Real>: Send + Sync {
    fn name(&self) -> &str;

    fn grid(&self) -> GridSpec;

    fn omega(&self, t: T) -> DiffForm<T>;

    /// Analytic time derivative, when known.
    fn omega_dot(&self, _t: T) -> Option<DiffForm<T>> {
        None
    }

    /// Primitives `alpha_t` with `omega_t = d_{theta_t} alpha_t` and the
    /// functions `h_t` with `theta_t' = d h_t`, when the family carries them.
    fn exact_data(&self) -> Option<&dyn ExactPrimitive<T>> {
        None
    }
}

/// Data for families that are exact by construction.
pub trait ExactPrimitive<T: Real>: Send + Sync {
    fn alpha(&self, t: T) -> DiffForm<T>;

    fn alpha_dot(&self, t: T) -> DiffForm<T>;

    fn h(&self, t: T) -> ScalarField<T>;
}

/// A family together with its validation thresholds and the finite
/// difference step used when no analytic derivative exists.
#[derive(Clone)]
pub struct FormFamily<T: Real> {
    generator: Arc<dyn FamilyGenerator<T>>,
    opts: LcsOptions,
    fd_step: T,
}

impl<T: Real> std::fmt::Debug for FormFamily<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FormFamily")
            .field("generator", &self.generator.name())
            .field("opts", &self.opts)
            .finish()
    }
}

impl<T: Real> FormFamily<T> {
    pub fn new(generator: Arc<dyn FamilyGenerator<T>>, opts: LcsOptions) -> Self {
        Self {
            generator,
            opts,
            fd_step: T::lit(1e-3),
        }
    }

    pub fn with_fd_step(mut self, step: T) -> Self {
        self.fd_step = step;
        self
    }

    pub fn name(&self) -> &str {
        self.generator.name()
    }

    pub fn grid(&self) -> GridSpec {
        self.generator.grid()
    }

    pub fn options(&self) -> &LcsOptions {
        &self.opts
    }

    pub fn generator(&self) -> &dyn FamilyGenerator<T> {
        self.generator.as_ref()
    }

    pub fn exact_data(&self) -> Option<&dyn ExactPrimitive<T>> {
        self.generator.exact_data()
    }

    pub fn omega(&self, t: T) -> DiffForm<T> {
        self.generator.omega(t)
    }

    /// `omega_t` validated as an lcs form.
    pub fn sample(&self, t: T) -> Result<LcsForm<T>> {
        validate_lcs(&self.generator.omega(t), &self.opts)
    }

    /// `d omega_t / dt`, analytic when available and otherwise a five-point
    /// fourth-order difference (one-sided near the ends of `[0, 1]`).
    pub fn derivative(&self, t: T) -> Result<DiffForm<T>> {
        if let Some(d) = self.generator.omega_dot(t) {
            return Ok(d);
        }
        finite_difference(|s| self.generator.omega(s), t, self.fd_step)
    }
}

/// Fourth-order finite-difference derivative of `f` at `t` on `[0, 1]`.
pub fn finite_difference<T: Real>(f: impl Fn(T) -> DiffForm<T>, t: T, step: T) -> Result<DiffForm<T>> {
    let two = T::lit(2.0);
    let twelve_h = T::lit(12.0) * step;
    let combine = |weights: &[(T, T)]| -> Result<DiffForm<T>> {
        let mut acc: Option<DiffForm<T>> = None;
        for &(offset, w) in weights {
            let term = f(t + offset).scale(w / twelve_h);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        acc.ok_or_else(|| Error::InvalidFamily("empty stencil".into()))
    };
    let h = step;
    if t - two * h >= T::zero() && t + two * h <= T::one() {
        combine(&[
            (-two * h, T::one()),
            (-h, T::lit(-8.0)),
            (h, T::lit(8.0)),
            (two * h, T::lit(-1.0)),
        ])
    } else {
        // One-sided toward the interior.
        let dir = if t - two * h < T::zero() { T::one() } else { -T::one() };
        let w = [-25.0, 48.0, -36.0, 16.0, -3.0];
        let stencil: Vec<(T, T)> = w
            .iter()
            .enumerate()
            .map(|(i, &c)| (dir * h * T::from_usize_lossy(i), dir * T::lit(c)))
            .collect();
        combine(&stencil)
    }
}
