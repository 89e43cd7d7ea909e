//! Construction and verification of Moser isotopies for lcs families.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::contract_nodal;
use crate::field::ScalarField;
use crate::form::{DiffForm, VectorField};
use crate::grid::{GridSpec, MAX_DIM};
use crate::lichnerowicz::{
    d_theta_nodal, harmonic_coefficients, lee_derivative, nondeg_margin, solve_primitive, split_harmonic_exact,
    LcsDiagnostics, LeeForm,
};
use crate::linalg;
use crate::scalar::Real;
use crate::spectral::SpectralBundle;

use super::family::FormFamily;
use super::flow::{integrate_isotopy, FieldSampler, FlowOptions, FlowState, StageField};
use super::verify::{conformal_compare, pullback_form, verify_eq1};

/// Tolerances and discretization of a pipeline run.
#[derive(Clone, Debug, Serialize)]
pub struct MoserOptions {
    pub steps: usize,
    pub checkpoints: usize,
    /// Bound on conformal consistency and factor errors.
    pub tol: f64,
    pub eq1_tol: f64,
    /// Bound on `|d_theta alpha - omega'| / |omega|` after absorption.
    pub exactness_tol: f64,
    pub lee_drift_tol: f64,
    /// Bound on the primitive and Lee-derivative checks of exact families.
    pub precondition_tol: f64,
    pub corollary_tol: f64,
    /// Absorb harmonic obstructions proportional to the class of the form.
    pub absorb: bool,
    pub cfl_safety: f64,
}

impl Default for MoserOptions {
    fn default() -> Self {
        Self {
            steps: 200,
            checkpoints: 11,
            tol: 1e-3,
            eq1_tol: 1e-6,
            exactness_tol: 1e-8,
            lee_drift_tol: 1e-8,
            precondition_tol: 1e-8,
            corollary_tol: 1e-8,
            absorb: true,
            cfl_safety: 1.0,
        }
    }
}

/// Which construction produced the vector field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Theorem,
    ExactFamily,
}

/// Diagnostics at one checkpoint time.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckpointRecord {
    pub t: f64,
    pub exactness_residual: f64,
    pub harmonic_obstruction: f64,
    pub raw_harmonic_obstruction: f64,
    pub absorption_rate: f64,
    pub conformal_consistency_error: f64,
    pub factor_error: f64,
    pub eq1_residual: f64,
    pub necessity_residual: f64,
    pub corollary_residual: Option<f64>,
    pub min_factor: f64,
    pub max_factor: f64,
    pub factor_positive: bool,
    pub min_det_jacobian: f64,
    pub nondeg_margin: f64,
    pub pullback_margin: f64,
    pub lcs_residual: f64,
    pub lee_drift: f64,
    pub max_speed: f64,
    pub field_residual: f64,
    pub transport_gap: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReportSummary {
    pub max_exactness_residual: f64,
    pub max_harmonic_obstruction: f64,
    pub max_conformal_consistency_error: f64,
    pub max_factor_error: f64,
    pub max_eq1_residual: f64,
    pub max_necessity_residual: f64,
    pub max_corollary_residual: Option<f64>,
    pub min_factor: f64,
    pub min_det_jacobian: f64,
    pub absorbed_scale: f64,
    pub success: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MoserReport {
    pub generator: String,
    pub path: PathKind,
    pub grid: GridSpec,
    pub steps: usize,
    pub lee_class: Vec<f64>,
    pub checkpoints: Vec<CheckpointRecord>,
    pub summary: ReportSummary,
}

/// Solves `i_X omega = -alpha` node by node; returns the field and the
/// largest back-substitution defect relative to `max |alpha|`.
pub fn moser_vector_field<T: Real>(omega: &DiffForm<T>, alpha: &DiffForm<T>) -> Result<(VectorField<T>, T)> {
    omega.grid().check_same(alpha.grid())?;
    if omega.degree() != 2 || alpha.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: if omega.degree() != 2 { 2 } else { 1 },
            found: if omega.degree() != 2 {
                omega.degree()
            } else {
                alpha.degree()
            },
        });
    }
    let grid = *omega.grid();
    let n = grid.dim();
    let pairs: Vec<(usize, usize)> = crate::form::basis::index_sets(n, 2)
        .iter()
        .map(|&m| {
            let a = crate::form::basis::axes(m);
            (a[0], a[1])
        })
        .collect();
    let mut xs = vec![vec![T::zero(); grid.len()]; n];
    for i in 0..grid.len() {
        // (i_X omega)_j = sum_k X^k Omega_kj, i.e. Omega^T X = -alpha
        let mut m = [[T::zero(); MAX_DIM]; MAX_DIM];
        for (&(a, b), c) in pairs.iter().zip(omega.components()) {
            let v = c.values()[i];
            m[b][a] = v;
            m[a][b] = -v;
        }
        let mut rhs = [T::zero(); MAX_DIM];
        for j in 0..n {
            rhs[j] = -alpha.components()[j].values()[i];
        }
        let sol = linalg::solve(&m, &rhs, n).ok_or(Error::DegenerateForm {
            margin: 0.0,
            threshold: 0.0,
        })?;
        for j in 0..n {
            xs[j][i] = sol[j];
        }
    }
    let x = VectorField::new(
        grid,
        xs.into_iter()
            .map(|v| ScalarField::new(grid, v))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let back = contract_nodal(&x, omega)?.add(alpha)?;
    let scale = alpha.max_abs();
    let residual = if scale == T::zero() {
        back.max_abs()
    } else {
        back.max_abs() / scale
    };
    Ok((x, residual))
}

/// One gauge-normalized sample `omega' = e^{-g} omega` with constant Lee
/// form, and its time derivative.
#[derive(Clone, Debug)]
pub struct NormalizedSample<T: Real> {
    pub t: T,
    pub omega: DiffForm<T>,
    pub omega_dot: DiffForm<T>,
    pub lee: LeeForm<T>,
    pub gauge: ScalarField<T>,
    pub diagnostics: LcsDiagnostics,
    pub lee_drift: T,
}

/// A family together with the Lee class every sample is normalized to.
#[derive(Clone, Debug)]
pub struct NormalizedFamily<T: Real> {
    family: FormFamily<T>,
    lee_class: Vec<T>,
    drift_tol: T,
}

/// Fixes the Lee class at `t = 0` and checks that it does not drift at
/// `times`.
pub fn normalize_family<T: Real>(family: &FormFamily<T>, times: &[T], drift_tol: T) -> Result<NormalizedFamily<T>> {
    let first = family.sample(T::zero())?;
    let nf = NormalizedFamily {
        family: family.clone(),
        lee_class: first.lee().harmonic().to_vec(),
        drift_tol,
    };
    for &t in times {
        nf.sample(t)?;
    }
    Ok(nf)
}

impl<T: Real> NormalizedFamily<T> {
    pub fn family(&self) -> &FormFamily<T> {
        &self.family
    }

    pub fn lee_class(&self) -> &[T] {
        &self.lee_class
    }

    pub fn grid(&self) -> GridSpec {
        self.family.grid()
    }

    fn drift(&self, harmonic: &[T]) -> T {
        harmonic
            .iter()
            .zip(&self.lee_class)
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .sum::<T>()
            .sqrt()
    }

    /// Samples and normalizes `omega_t`. With `theta_t = theta_h + d g_t`,
    /// `omega'_t = e^{-g_t} omega_t` and
    /// `d omega'_t / dt = e^{-g_t} (omega_t' - g_t' omega_t)`, where `g_t'` is
    /// the potential of the Lee derivative.
    pub fn sample(&self, t: T) -> Result<NormalizedSample<T>> {
        let form = self.family.sample(t)?;
        let drift = self.drift(form.lee().harmonic());
        if !(drift <= self.drift_tol) {
            return Err(Error::LeeClassDrift {
                t: t.to_f64_lossy(),
                drift: drift.to_f64_lossy(),
            });
        }
        let omega_dot = self.family.derivative(t)?;
        let theta_dot = lee_derivative(form.omega(), form.lee(), &omega_dot)?;
        let split = split_harmonic_exact(&theta_dot, T::infinity())?;
        let rate_drift = split.harmonic_norm();
        if !(rate_drift <= self.drift_tol) {
            return Err(Error::LeeClassDrift {
                t: t.to_f64_lossy(),
                drift: rate_drift.to_f64_lossy(),
            });
        }
        let g_dot = split.potential();
        let gauge = form.lee().potential().map(|g| (-g).exp());
        let omega = form.omega().mul_function(&gauge)?;
        let omega_dot = omega_dot
            .sub(&form.omega().mul_function(g_dot)?)?
            .mul_function(&gauge)?;
        let lee = LeeForm::constant(self.grid(), &self.lee_class);
        let margin = nondeg_margin(&omega)?.to_f64_lossy();
        let diagnostics = LcsDiagnostics {
            nondeg_margin: margin,
            ..*form.diagnostics()
        };
        Ok(NormalizedSample {
            t,
            omega,
            omega_dot,
            lee,
            gauge,
            diagnostics,
            lee_drift: drift,
        })
    }
}

/// Exactness data for one time of a normalized family.
#[derive(Clone, Debug)]
pub struct Certificate<T: Real> {
    pub sample: NormalizedSample<T>,
    /// `a(t)`: the absorbed multiple of `omega'`, `c' = -a`.
    pub absorption_rate: T,
    /// `omega'_t' - a omega'_t`.
    pub target: DiffForm<T>,
    pub primitive: DiffForm<T>,
    /// `|d_theta alpha - target| / |omega'|`.
    pub exactness_residual: T,
    /// Harmonic part of the target after absorption, relative to `|omega'|`.
    pub harmonic_obstruction: T,
    /// Harmonic part of `omega'_t'` before absorption, relative to `|omega'|`.
    pub raw_harmonic_obstruction: T,
}

/// Certifies that the normalized derivative is `d_theta`-exact at `t`,
/// after absorbing a harmonic obstruction proportional to the class of
/// `omega'_t` into a constant rescaling.
pub fn exactness_certificate<T: Real>(nf: &NormalizedFamily<T>, t: T, opts: &MoserOptions) -> Result<Certificate<T>> {
    let sample = nf.sample(t)?;
    let h_omega = harmonic_coefficients(&sample.omega, &sample.lee)?;
    let h_dot = harmonic_coefficients(&sample.omega_dot, &sample.lee)?;
    let norm2: T = h_omega.iter().map(|v| *v * *v).sum();
    let a = if opts.absorb && norm2 > T::zero() {
        h_omega.iter().zip(&h_dot).map(|(p, q)| *p * *q).sum::<T>() / norm2
    } else {
        T::zero()
    };
    let target = sample.omega_dot.sub(&sample.omega.scale(a))?;
    let solved = solve_primitive(&target, &sample.lee)?;
    let scale = sample.omega.norm();
    let raw: T = h_dot.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let cert = Certificate {
        absorption_rate: a,
        exactness_residual: solved.residual * target.norm() / scale,
        harmonic_obstruction: solved.harmonic_part_norm / scale,
        raw_harmonic_obstruction: raw / scale,
        primitive: solved.primitive,
        target,
        sample,
    };
    if !(cert.exactness_residual.to_f64_lossy() <= opts.exactness_tol) {
        return Err(Error::NotExact {
            t: t.to_f64_lossy(),
            obstruction: cert.exactness_residual.to_f64_lossy(),
        });
    }
    Ok(cert)
}

/// Stage data carried to the checkpoint observer.
#[derive(Clone, Debug)]
pub struct StageData<T: Real> {
    /// The form the flow is built for, before any scalar rescaling.
    pub omega: DiffForm<T>,
    pub omega_dot: DiffForm<T>,
    pub lee: LeeForm<T>,
    pub exactness_residual: T,
    pub harmonic_obstruction: T,
    pub raw_harmonic_obstruction: T,
    pub absorption_rate: T,
    pub field_residual: T,
    pub diagnostics: LcsDiagnostics,
    pub lee_drift: T,
    /// Corollary-path data: `alpha' - h alpha` and `h`.
    pub exact: Option<(DiffForm<T>, ScalarField<T>)>,
}

struct TheoremSampler<'a, T: Real> {
    nf: &'a NormalizedFamily<T>,
    opts: &'a MoserOptions,
}

impl<T: Real> FieldSampler<T> for TheoremSampler<'_, T> {
    type Extra = StageData<T>;

    fn grid(&self) -> GridSpec {
        self.nf.grid()
    }

    fn field(&self, t: T) -> Result<StageField<T, StageData<T>>> {
        let cert = exactness_certificate(self.nf, t, self.opts)?;
        let (x, field_residual) = moser_vector_field(&cert.sample.omega, &cert.primitive)?;
        let rate = cert.sample.lee.apply(&x)?;
        let grid = self.nf.grid();
        let data = StageData {
            omega: cert.sample.omega,
            omega_dot: cert.sample.omega_dot,
            lee: cert.sample.lee,
            exactness_residual: cert.exactness_residual,
            harmonic_obstruction: cert.harmonic_obstruction,
            raw_harmonic_obstruction: cert.raw_harmonic_obstruction,
            absorption_rate: cert.absorption_rate,
            field_residual,
            diagnostics: cert.sample.diagnostics,
            lee_drift: cert.sample.lee_drift,
            exact: None,
        };
        Ok(StageField::new(
            t,
            x,
            rate.clone(),
            rate,
            ScalarField::zeros(grid),
            -cert.absorption_rate,
            data,
        ))
    }
}

struct ExactSampler<'a, T: Real> {
    family: &'a FormFamily<T>,
    opts: &'a MoserOptions,
}

fn relative_norm<T: Real>(defect: T, scale: T) -> T {
    if scale == T::zero() {
        defect
    } else {
        defect / scale
    }
}

impl<T: Real> FieldSampler<T> for ExactSampler<'_, T> {
    type Extra = StageData<T>;

    fn grid(&self) -> GridSpec {
        self.family.grid()
    }

    fn field(&self, t: T) -> Result<StageField<T, StageData<T>>> {
        let data = self
            .family
            .exact_data()
            .ok_or_else(|| Error::InvalidFamily(format!("{} carries no primitives", self.family.name())))?;
        let form = self.family.sample(t)?;
        let omega = form.omega();
        let lee = form.lee();
        let alpha = data.alpha(t);
        let residual = relative_norm(d_theta_nodal(&alpha, lee)?.sub(omega)?.norm(), omega.norm());
        if !(residual.to_f64_lossy() <= self.opts.precondition_tol) {
            return Err(Error::NotExactFamily {
                t: t.to_f64_lossy(),
                residual: residual.to_f64_lossy(),
            });
        }
        let omega_dot = self.family.derivative(t)?;
        let h = data.h(t);
        let theta_dot = lee_derivative(omega, lee, &omega_dot)?;
        let dh = crate::exterior::ext_d(&DiffForm::function(h.clone()))?;
        let lee_residual = relative_norm(theta_dot.sub(&dh)?.norm(), dh.norm().max(T::one()));
        if !(lee_residual.to_f64_lossy() <= self.opts.precondition_tol) {
            return Err(Error::InconsistentLeeDerivative {
                t: t.to_f64_lossy(),
                residual: lee_residual.to_f64_lossy(),
            });
        }
        // i_X omega = -alpha' + h alpha
        let beta = data.alpha_dot(t).sub(&alpha.mul_function(&h)?)?;
        let (x, field_residual) = moser_vector_field(omega, &beta)?;
        let lee_rate = lee.apply(&x)?;
        let rate = lee_rate.add(&h)?;
        let aux_rate = h.scale(-T::one());
        let grid = self.family.grid();
        let stage = StageData {
            omega: omega.clone(),
            omega_dot,
            lee: lee.clone(),
            exactness_residual: residual,
            harmonic_obstruction: T::zero(),
            raw_harmonic_obstruction: T::zero(),
            absorption_rate: T::zero(),
            field_residual,
            diagnostics: *form.diagnostics(),
            lee_drift: T::zero(),
            exact: Some((beta, h)),
        };
        let _ = grid;
        Ok(StageField::new(t, x, rate, lee_rate, aux_rate, T::zero(), stage))
    }
}

/// `|d/dt(f omega) - d_{theta + dG}(f (alpha' - h alpha))|` relative, with
/// `f = e^G`.
fn corollary_residual<T: Real>(data: &StageData<T>, g: &ScalarField<T>) -> Result<T> {
    let (beta, h) = data.exact.as_ref().expect("exact path");
    let f = g.map(T::exp);
    let lhs = data.omega_dot.sub(&data.omega.mul_function(h)?)?.mul_function(&f)?;
    let lee_f = LeeForm::from_parts(data.lee.harmonic(), data.lee.potential().add(g)?)?;
    let rhs = d_theta_nodal(&beta.mul_function(&f)?, &lee_f)?;
    let scale = lhs.norm().max(rhs.norm());
    Ok(relative_norm(lhs.sub(&rhs)?.norm(), scale))
}

struct Checker<T: Real> {
    reference: Option<DiffForm<T>>,
    records: Vec<CheckpointRecord>,
    nondeg_threshold: f64,
}

impl<T: Real> Checker<T> {
    fn observe(&mut self, state: &FlowState<T>, field: &StageField<T, StageData<T>>) -> Result<()> {
        let data = &field.extra;
        let scale = state.scalar.exp();
        let omega = data.omega.scale(scale);
        let omega_dot = data
            .omega_dot
            .sub(&data.omega.scale(data.absorption_rate))?
            .scale(scale);
        let reference = self.reference.get_or_insert_with(|| omega.clone()).clone();
        let pulled = pullback_form(&omega, state)?;
        let pull_margin = nondeg_margin(&pulled)?.to_f64_lossy();
        if !(pull_margin >= self.nondeg_threshold) {
            return Err(Error::IsotopyDiverged {
                t: state.time.to_f64_lossy(),
                reason: format!("pullback nondegeneracy margin {pull_margin:e}"),
            });
        }
        let cmp = conformal_compare(&pulled, &reference)?;
        let mut factor_error = T::zero();
        for (f, l) in cmp.factor.values().iter().zip(&state.log_factor) {
            let p = l.exp();
            factor_error = factor_error.max((*f - p).abs() / p);
        }
        let lambda_dot = state.lambda_rate(field);
        let eq1 = verify_eq1(
            &omega,
            &data.lee,
            &omega_dot,
            &field.velocity,
            &state.lambda,
            &lambda_dot,
            &state.lee_integral,
        )?;
        let corollary = match data.exact {
            Some(_) => Some(corollary_residual(data, &state.aux)?.to_f64_lossy()),
            None => None,
        };
        let transport_gap = transport_gap(state);
        self.records.push(CheckpointRecord {
            t: state.time.to_f64_lossy(),
            exactness_residual: data.exactness_residual.to_f64_lossy(),
            harmonic_obstruction: data.harmonic_obstruction.to_f64_lossy(),
            raw_harmonic_obstruction: data.raw_harmonic_obstruction.to_f64_lossy(),
            absorption_rate: data.absorption_rate.to_f64_lossy(),
            conformal_consistency_error: cmp.consistency_error.to_f64_lossy(),
            factor_error: factor_error.to_f64_lossy(),
            eq1_residual: eq1.eq1,
            necessity_residual: eq1.necessity,
            corollary_residual: corollary,
            min_factor: cmp.min_factor.to_f64_lossy(),
            max_factor: cmp
                .factor
                .values()
                .iter()
                .copied()
                .fold(T::neg_infinity(), T::max)
                .to_f64_lossy(),
            factor_positive: cmp.positive,
            min_det_jacobian: state.min_det_jacobian.to_f64_lossy(),
            nondeg_margin: data.diagnostics.nondeg_margin,
            pullback_margin: pull_margin,
            lcs_residual: data.diagnostics.lcs_residual,
            lee_drift: data.lee_drift.to_f64_lossy(),
            max_speed: field.max_speed().to_f64_lossy(),
            field_residual: data.field_residual.to_f64_lossy(),
            transport_gap: transport_gap.to_f64_lossy(),
        });
        Ok(())
    }
}

/// `max_x |L(t, x) - lambda(t, phi_t(x))|`.
fn transport_gap<T: Real>(state: &FlowState<T>) -> T {
    if state.lambda.max_abs() == T::zero() {
        return state.log_factor.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    }
    let grid = *state.lambda.grid();
    let bundle = SpectralBundle::new(&grid, &[state.lambda.spectrum()], T::lit(1e-13));
    let mut powers = Vec::new();
    let mut buf = [T::zero()];
    state
        .positions
        .iter()
        .zip(&state.log_factor)
        .map(|(p, l)| {
            bundle.eval_into(p, &mut buf, &mut powers);
            (buf[0] - *l).abs()
        })
        .fold(T::zero(), T::max)
}

fn summarize(records: &[CheckpointRecord], final_scalar: f64, opts: &MoserOptions) -> ReportSummary {
    let max = |f: fn(&CheckpointRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    let corollary = records
        .iter()
        .filter_map(|r| r.corollary_residual)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let mut s = ReportSummary {
        max_exactness_residual: max(|r| r.exactness_residual),
        max_harmonic_obstruction: max(|r| r.harmonic_obstruction),
        max_conformal_consistency_error: max(|r| r.conformal_consistency_error),
        max_factor_error: max(|r| r.factor_error),
        max_eq1_residual: max(|r| r.eq1_residual),
        max_necessity_residual: max(|r| r.necessity_residual),
        max_corollary_residual: corollary,
        min_factor: records.iter().map(|r| r.min_factor).fold(f64::INFINITY, f64::min),
        min_det_jacobian: records.iter().map(|r| r.min_det_jacobian).fold(f64::INFINITY, f64::min),
        absorbed_scale: final_scalar.exp(),
        success: false,
    };
    s.success = s.max_conformal_consistency_error <= opts.tol
        && s.max_factor_error <= opts.tol
        && s.max_eq1_residual <= opts.eq1_tol
        && s.max_necessity_residual <= opts.eq1_tol
        && s.max_exactness_residual <= opts.exactness_tol
        && s.max_corollary_residual.is_none_or(|c| c <= opts.corollary_tol)
        && records.iter().all(|r| r.factor_positive && r.min_det_jacobian > 0.0);
    s
}

fn flow_options(opts: &MoserOptions) -> FlowOptions {
    let mut f = FlowOptions::new(opts.steps, opts.checkpoints);
    f.cfl_safety = opts.cfl_safety;
    f
}

fn checkpoint_times<T: Real>(flow: &FlowOptions) -> Vec<T> {
    flow.checkpoints
        .iter()
        .map(|&k| T::lit(flow.t_end) * T::from_usize_lossy(k) / T::from_usize_lossy(flow.steps))
        .collect()
}

/// Normalizes the family, certifies exactness, builds the field from the
/// `d_theta^*`-primitive at every stage time, integrates it, and compares
/// the pulled-back forms with the predicted conformal factors.
pub fn run_theorem_pipeline<T: Real>(family: &FormFamily<T>, opts: &MoserOptions) -> Result<MoserReport> {
    let flow = flow_options(opts);
    let nf = normalize_family(family, &checkpoint_times::<T>(&flow), T::lit(opts.lee_drift_tol))?;
    let sampler = TheoremSampler { nf: &nf, opts };
    let mut checker = Checker {
        reference: None,
        records: Vec::new(),
        nondeg_threshold: family.options().nondeg_threshold,
    };
    let end = integrate_isotopy(&sampler, &flow, |s, f| checker.observe(s, f))?;
    let summary = summarize(&checker.records, end.scalar.to_f64_lossy(), opts);
    Ok(MoserReport {
        generator: family.name().to_string(),
        path: PathKind::Theorem,
        grid: family.grid(),
        steps: opts.steps,
        lee_class: nf.lee_class().iter().map(|v| v.to_f64_lossy()).collect(),
        checkpoints: checker.records,
        summary,
    })
}

/// Builds the field directly from supplied primitives, `i_X omega_t =
/// -alpha_t' + h_t alpha_t`, and verifies it like the theorem pipeline.
pub fn run_exact_family<T: Real>(family: &FormFamily<T>, opts: &MoserOptions) -> Result<MoserReport> {
    if family.exact_data().is_none() {
        return Err(Error::InvalidFamily(format!("{} carries no primitives", family.name())));
    }
    let flow = flow_options(opts);
    let sampler = ExactSampler { family, opts };
    let mut checker = Checker {
        reference: None,
        records: Vec::new(),
        nondeg_threshold: family.options().nondeg_threshold,
    };
    let end = integrate_isotopy(&sampler, &flow, |s, f| checker.observe(s, f))?;
    let summary = summarize(&checker.records, end.scalar.to_f64_lossy(), opts);
    let lee0 = family.sample(T::zero())?;
    Ok(MoserReport {
        generator: family.name().to_string(),
        path: PathKind::ExactFamily,
        grid: family.grid(),
        steps: opts.steps,
        lee_class: lee0.lee().harmonic().iter().map(|v| v.to_f64_lossy()).collect(),
        checkpoints: checker.records,
        summary,
    })
}

/// Terminal errors of the theorem pipeline at several step counts.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergencePoint {
    pub steps: usize,
    pub conformal_consistency_error: f64,
    pub factor_error: f64,
}

pub fn convergence_study<T: Real>(
    family: &FormFamily<T>,
    opts: &MoserOptions,
    step_counts: &[usize],
    path: PathKind,
) -> Result<Vec<ConvergencePoint>> {
    step_counts
        .iter()
        .map(|&steps| {
            let o = MoserOptions {
                steps,
                checkpoints: 2,
                ..opts.clone()
            };
            let report = match path {
                PathKind::Theorem => run_theorem_pipeline(family, &o)?,
                PathKind::ExactFamily => run_exact_family(family, &o)?,
            };
            let last = report.checkpoints.last().cloned().unwrap_or_default();
            Ok(ConvergencePoint {
                steps,
                conformal_consistency_error: last.conformal_consistency_error,
                factor_error: last.factor_error,
            })
        })
        .collect()
}
