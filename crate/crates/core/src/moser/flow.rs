//! Fixed-step RK4 integration of time-dependent vector fields on the torus,
//! with Jacobian transport and an accumulated log conformal factor.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::form::VectorField;
use crate::grid::{wrap, GridSpec, Point, MAX_DIM};
use crate::linalg::Mat4;
use crate::scalar::Real;
use crate::spectral::{self, SpectralBundle};

/// Relative coefficient level dropped when evaluating fields off the grid.
const BUNDLE_CUTOFF: f64 = 1e-13;

/// A vector field and its companion rates at one time.
///
/// `rate` drives the log factor along trajectories and the Eulerian
/// log factor on the grid, `lee_rate` is `theta(X)` at the nodes, `aux_rate`
/// drives an auxiliary grid function and `scalar_rate` a scalar.
#[derive(Clone, Debug)]
pub struct StageField<T: Real, E = ()> {
    pub time: T,
    pub velocity: VectorField<T>,
    pub rate: ScalarField<T>,
    pub lee_rate: ScalarField<T>,
    pub aux_rate: ScalarField<T>,
    pub scalar_rate: T,
    pub extra: E,
    bundle: SpectralBundle<T>,
}

impl<T: Real, E> StageField<T, E> {
    pub fn new(
        time: T,
        velocity: VectorField<T>,
        rate: ScalarField<T>,
        lee_rate: ScalarField<T>,
        aux_rate: ScalarField<T>,
        scalar_rate: T,
        extra: E,
    ) -> Self {
        let grid = *velocity.grid();
        let n = grid.dim();
        let ks: Vec<Vec<T>> = (0..n).map(|j| spectral::axis_wavenumbers(&grid, j)).collect();
        let mut owned: Vec<Vec<Complex<T>>> = Vec::with_capacity(n * n);
        for i in 0..n {
            let spec = velocity.components()[i].spectrum();
            for k in &ks {
                owned.push(
                    spec.iter()
                        .zip(k)
                        .map(|(c, kk)| Complex::new(-c.im * *kk, c.re * *kk))
                        .collect(),
                );
            }
        }
        let mut spectra: Vec<&[Complex<T>]> = velocity.components().iter().map(|c| c.spectrum()).collect();
        spectra.extend(owned.iter().map(|v| v.as_slice()));
        spectra.push(rate.spectrum());
        let bundle = SpectralBundle::new(&grid, &spectra, T::lit(BUNDLE_CUTOFF));
        Self {
            time,
            velocity,
            rate,
            lee_rate,
            aux_rate,
            scalar_rate,
            extra,
            bundle,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.velocity.grid()
    }

    pub fn max_speed(&self) -> T {
        self.velocity.max_norm()
    }

    /// Number of Fourier modes used for off-grid evaluation.
    pub fn mode_count(&self) -> usize {
        self.bundle.mode_count()
    }

    /// `(X, DX, rate)` at an arbitrary point; `DX[i][j] = d_j X^i`.
    fn eval(&self, p: &Point<T>, buf: &mut [T], powers: &mut Vec<Complex<T>>) -> (Point<T>, Mat4<T>, T) {
        let n = self.grid().dim();
        self.bundle.eval_into(p, buf, powers);
        let mut x = [T::zero(); MAX_DIM];
        let mut dx = [[T::zero(); MAX_DIM]; MAX_DIM];
        x[..n].copy_from_slice(&buf[..n]);
        for i in 0..n {
            for j in 0..n {
                dx[i][j] = buf[n + i * n + j];
            }
        }
        (x, dx, buf[n + n * n])
    }
}

impl<T: Real> StageField<T, ()> {
    /// A bare velocity field with all rates zero.
    pub fn from_velocity(time: T, velocity: VectorField<T>) -> Self {
        let grid = *velocity.grid();
        let z = ScalarField::zeros(grid);
        Self::new(time, velocity, z.clone(), z.clone(), z, T::zero(), ())
    }

    /// A velocity field whose log-factor rate is `theta(X)` for a constant
    /// 1-form `theta`.
    pub fn with_constant_lee(time: T, velocity: VectorField<T>, theta: &[T]) -> Self {
        let grid = *velocity.grid();
        let mut rate = ScalarField::zeros(grid);
        for (c, xc) in theta.iter().zip(velocity.components()) {
            rate = rate.add(&xc.scale(*c)).expect("same grid");
        }
        let z = ScalarField::zeros(grid);
        Self::new(time, velocity, rate.clone(), rate, z, T::zero(), ())
    }
}

/// Supplies the vector field at the RK4 stage times.
pub trait FieldSampler<T: Real>: Sync {
    type Extra: Send + Sync;

    fn grid(&self) -> GridSpec;

    fn field(&self, t: T) -> Result<StageField<T, Self::Extra>>;
}

/// Sampler built from a closure.
pub struct FnSampler<F> {
    grid: GridSpec,
    f: F,
}

impl<F> FnSampler<F> {
    pub fn new(grid: GridSpec, f: F) -> Self {
        Self { grid, f }
    }
}

impl<T, F> FieldSampler<T> for FnSampler<F>
where
    T: Real,
    F: Fn(T) -> Result<StageField<T>> + Sync,
{
    type Extra = ();

    fn grid(&self) -> GridSpec {
        self.grid
    }

    fn field(&self, t: T) -> Result<StageField<T>> {
        (self.f)(t)
    }
}

/// Trajectories of all grid nodes plus the Eulerian grid functions.
///
/// `log_factor` is `L(t, x) = int_0^t rate(s, phi_s(x)) ds` along each
/// trajectory. On the grid, `lambda` solves `lambda' = rate - X . grad lambda`
/// (so `lambda(t, phi_t(x)) = L(t, x)`), `lee_integral` solves
/// `E' = theta(X) - X . grad lambda`, `aux` integrates `aux_rate` and
/// `scalar` integrates `scalar_rate`.
#[derive(Clone, Debug)]
pub struct FlowState<T: Real> {
    pub time: T,
    pub step: usize,
    pub positions: Vec<Point<T>>,
    pub jacobians: Vec<Mat4<T>>,
    pub log_factor: Vec<T>,
    pub lambda: ScalarField<T>,
    pub lee_integral: ScalarField<T>,
    pub aux: ScalarField<T>,
    pub scalar: T,
    pub min_det_jacobian: T,
}

impl<T: Real> FlowState<T> {
    pub fn identity(grid: &GridSpec) -> Self {
        let mut eye = [[T::zero(); MAX_DIM]; MAX_DIM];
        for (i, row) in eye.iter_mut().enumerate().take(grid.dim()) {
            row[i] = T::one();
        }
        Self {
            time: T::zero(),
            step: 0,
            positions: (0..grid.len()).map(|i| grid.node(i)).collect(),
            jacobians: vec![eye; grid.len()],
            log_factor: vec![T::zero(); grid.len()],
            lambda: ScalarField::zeros(*grid),
            lee_integral: ScalarField::zeros(*grid),
            aux: ScalarField::zeros(*grid),
            scalar: T::zero(),
            min_det_jacobian: T::one(),
        }
    }

    /// Eulerian rate `lambda'` on the grid for the given field.
    pub fn lambda_rate<E>(&self, field: &StageField<T, E>) -> ScalarField<T> {
        eulerian_rates(&self.lambda, field).0
    }
}

#[derive(Clone, Debug)]
pub struct FlowOptions {
    pub steps: usize,
    pub t_end: f64,
    /// Largest admissible `max|X| dt` in units of half a grid cell.
    pub cfl_safety: f64,
    /// Step indices after which the observer is called (0 = initial state).
    pub checkpoints: Vec<usize>,
}

impl FlowOptions {
    pub fn new(steps: usize, checkpoint_count: usize) -> Self {
        Self {
            steps,
            t_end: 1.0,
            cfl_safety: 1.0,
            checkpoints: checkpoint_steps(steps, checkpoint_count),
        }
    }
}

/// `count` step indices spread uniformly over `0..=steps`, rounded.
pub fn checkpoint_steps(steps: usize, count: usize) -> Vec<usize> {
    if count <= 1 {
        return vec![steps];
    }
    let mut out: Vec<usize> = (0..count)
        .map(|k| ((k * steps) as f64 / (count - 1) as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

fn det<T: Real>(m: &Mat4<T>, n: usize) -> T {
    match n {
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => {
            let mut a = *m;
            let mut d = T::one();
            for c in 0..n {
                let p = (c..n)
                    .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
                    .unwrap();
                if a[p][c] == T::zero() {
                    return T::zero();
                }
                if p != c {
                    a.swap(p, c);
                    d = -d;
                }
                d *= a[c][c];
                for r in c + 1..n {
                    let f = a[r][c] / a[c][c];
                    for k in c..n {
                        let v = a[c][k];
                        a[r][k] -= f * v;
                    }
                }
            }
            d
        }
    }
}

/// `(rate - X . grad lambda, theta(X) - X . grad lambda)` at the nodes.
fn eulerian_rates<T: Real, E>(lambda: &ScalarField<T>, field: &StageField<T, E>) -> (ScalarField<T>, ScalarField<T>) {
    let grid = *lambda.grid();
    let mut advect = vec![T::zero(); grid.len()];
    if lambda.max_abs() > T::zero() {
        for (j, xc) in field.velocity.components().iter().enumerate() {
            let dl = lambda.derivative(j);
            for ((a, x), d) in advect.iter_mut().zip(xc.values()).zip(dl.values()) {
                *a += *x * *d;
            }
        }
    }
    let l = field.rate.values().iter().zip(&advect).map(|(r, a)| *r - *a).collect();
    let e = field
        .lee_rate
        .values()
        .iter()
        .zip(&advect)
        .map(|(r, a)| *r - *a)
        .collect();
    (
        ScalarField::new(grid, l).expect("node count"),
        ScalarField::new(grid, e).expect("node count"),
    )
}

struct Derivs<T> {
    x: Point<T>,
    j: Mat4<T>,
    l: T,
}

fn particle_rhs<T: Real, E>(
    field: &StageField<T, E>,
    n: usize,
    x: &Point<T>,
    jac: &Mat4<T>,
    buf: &mut [T],
    powers: &mut Vec<Complex<T>>,
) -> Derivs<T> {
    let (v, dv, l) = field.eval(x, buf, powers);
    let mut dj = [[T::zero(); MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for k in 0..n {
            let mut s = T::zero();
            for m in 0..n {
                s += dv[i][m] * jac[m][k];
            }
            dj[i][k] = s;
        }
    }
    Derivs { x: v, j: dj, l }
}

fn advance<T: Real>(x: &Point<T>, j: &Mat4<T>, d: &Derivs<T>, h: T, n: usize) -> (Point<T>, Mat4<T>) {
    let mut x2 = *x;
    let mut j2 = *j;
    for i in 0..n {
        x2[i] += h * d.x[i];
        for k in 0..n {
            j2[i][k] += h * d.j[i][k];
        }
    }
    (x2, j2)
}

fn check_cfl<T: Real, E>(field: &StageField<T, E>, dt: T, opts: &FlowOptions) -> Result<()> {
    let grid = field.grid();
    let displacement = (field.max_speed() * dt).to_f64_lossy();
    let limit = 0.5 / grid.size() as f64 * opts.cfl_safety;
    if displacement > limit {
        return Err(Error::StepCountTooSmall { displacement, limit });
    }
    Ok(())
}

fn axpy<T: Real>(a: &ScalarField<T>, h: T, b: &ScalarField<T>) -> ScalarField<T> {
    a.zip_map(b, |x, y| x + h * y).expect("same grid")
}

/// Integrates the flow of the sampled field from `t = 0` to `opts.t_end`
/// with classic RK4. The observer is called with the state and the field at
/// every checkpoint step.
pub fn integrate_isotopy<T, S, O>(sampler: &S, opts: &FlowOptions, mut observer: O) -> Result<FlowState<T>>
where
    T: Real,
    S: FieldSampler<T>,
    O: FnMut(&FlowState<T>, &StageField<T, S::Extra>) -> Result<()>,
{
    if opts.steps == 0 {
        return Err(Error::InvalidFamily("step count must be positive".into()));
    }
    let grid = sampler.grid();
    let n = grid.dim();
    let dt = T::lit(opts.t_end) / T::from_usize_lossy(opts.steps);
    let half = dt * T::lit(0.5);
    let sixth = dt / T::lit(6.0);
    let mut state = FlowState::identity(&grid);
    let mut current = sampler.field(T::zero())?;
    check_cfl(&current, dt, opts)?;
    if opts.checkpoints.contains(&0) {
        observer(&state, &current)?;
    }
    let nfields = n + n * n + 1;
    for step in 0..opts.steps {
        let t = T::from_usize_lossy(step) * dt;
        let mid = sampler.field(t + half)?;
        let end = sampler.field(T::from_usize_lossy(step + 1) * dt)?;
        check_cfl(&mid, dt, opts)?;
        check_cfl(&end, dt, opts)?;

        let results: Vec<(Point<T>, Mat4<T>, T)> = state
            .positions
            .par_iter()
            .zip(state.jacobians.par_iter())
            .zip(state.log_factor.par_iter())
            .map_init(
                || (vec![T::zero(); nfields], Vec::new()),
                |(buf, powers), ((x, j), l)| {
                    let k1 = particle_rhs(&current, n, x, j, buf, powers);
                    let (x2, j2) = advance(x, j, &k1, half, n);
                    let k2 = particle_rhs(&mid, n, &x2, &j2, buf, powers);
                    let (x3, j3) = advance(x, j, &k2, half, n);
                    let k3 = particle_rhs(&mid, n, &x3, &j3, buf, powers);
                    let (x4, j4) = advance(x, j, &k3, dt, n);
                    let k4 = particle_rhs(&end, n, &x4, &j4, buf, powers);
                    let mut xo = *x;
                    let mut jo = *j;
                    let two = T::lit(2.0);
                    for i in 0..n {
                        xo[i] = wrap(x[i] + sixth * (k1.x[i] + two * k2.x[i] + two * k3.x[i] + k4.x[i]));
                        for k in 0..n {
                            jo[i][k] += sixth * (k1.j[i][k] + two * k2.j[i][k] + two * k3.j[i][k] + k4.j[i][k]);
                        }
                    }
                    let lo = *l + sixth * (k1.l + two * k2.l + two * k3.l + k4.l);
                    (xo, jo, lo)
                },
            )
            .collect();
        // Eulerian grid functions.
        let lam = &state.lambda;
        let (l1, e1) = eulerian_rates(lam, &current);
        let lam2 = axpy(lam, half, &l1);
        let (l2, e2) = eulerian_rates(&lam2, &mid);
        let lam3 = axpy(lam, half, &l2);
        let (l3, e3) = eulerian_rates(&lam3, &mid);
        let lam4 = axpy(lam, dt, &l3);
        let (l4, e4) = eulerian_rates(&lam4, &end);
        let combine =
            |base: &ScalarField<T>, a: &ScalarField<T>, b: &ScalarField<T>, c: &ScalarField<T>, d: &ScalarField<T>| {
                let two = T::lit(2.0);
                let v = (0..grid.len())
                    .map(|i| {
                        base.values()[i]
                            + sixth * (a.values()[i] + two * b.values()[i] + two * c.values()[i] + d.values()[i])
                    })
                    .collect();
                ScalarField::new(grid, v).expect("node count")
            };
        let lambda = combine(&state.lambda, &l1, &l2, &l3, &l4);
        let lee_integral = combine(&state.lee_integral, &e1, &e2, &e3, &e4);
        let aux = combine(
            &state.aux,
            &current.aux_rate,
            &mid.aux_rate,
            &mid.aux_rate,
            &end.aux_rate,
        );
        let scalar = state.scalar + sixth * (current.scalar_rate + T::lit(4.0) * mid.scalar_rate + end.scalar_rate);

        let mut min_det = T::infinity();
        for (i, (x, j, l)) in results.into_iter().enumerate() {
            state.positions[i] = x;
            state.jacobians[i] = j;
            state.log_factor[i] = l;
            min_det = min_det.min(det(&j, n));
        }
        let t_next = T::from_usize_lossy(step + 1) * dt;
        if !(min_det > T::zero()) {
            return Err(Error::IsotopyDiverged {
                t: t_next.to_f64_lossy(),
                reason: format!("Jacobian determinant reached {:e}", min_det.to_f64_lossy()),
            });
        }
        state.min_det_jacobian = state.min_det_jacobian.min(min_det);
        state.lambda = lambda;
        state.lee_integral = lee_integral;
        state.aux = aux;
        state.scalar = scalar;
        state.time = t_next;
        state.step = step + 1;
        current = end;
        if opts.checkpoints.contains(&(step + 1)) {
            observer(&state, &current)?;
        }
    }
    Ok(state)
}

/// Determinant of the leading `n x n` block.
pub fn jacobian_det<T: Real>(m: &Mat4<T>, n: usize) -> T {
    det(m, n)
}
