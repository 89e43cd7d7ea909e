//! Randomized sweep of the twisted operator identities on `T^n`.

use lcs_core::exterior::l2_inner;
use lcs_core::lichnerowicz::{d_theta, d_theta_star, hodge_decompose, solve_primitive, LeeForm};
use lcs_core::random::{random_field, random_form, random_lee};
use lcs_core::{GridSpec, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{IdentitiesConfig, IdentityTolerances};
use crate::report::Verdict;

/// Largest relative residual of each identity over the sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub samples: usize,
    /// `|d_theta d_theta a| / |a|`.
    pub d_theta_squared: f64,
    /// `|f d_theta a - d_{theta + d ln f}(f a)| / |f a|`.
    pub chain_map: f64,
    /// `|<d_theta a, b> - <a, d_theta^* b>| / (|a| |b|)`.
    pub adjointness: f64,
    /// Largest pairwise inner product of the Hodge parts over `|a|^2`.
    pub hodge_orthogonality: f64,
    /// `|harmonic + exact + coexact + unresolved - a| / |a|`.
    pub hodge_reconstruction: f64,
    /// `|d_theta alpha - target| / |target|` for `target = d_theta beta`.
    pub primitive_round_trip: f64,
}

impl IdentityResiduals {
    pub fn verdicts(&self, tol: &IdentityTolerances) -> Vec<Verdict> {
        vec![
            Verdict::bounded("d_theta_squared", self.d_theta_squared, tol.d_theta_squared),
            Verdict::bounded("chain_map", self.chain_map, tol.chain_map),
            Verdict::bounded("adjointness", self.adjointness, tol.adjointness),
            Verdict::bounded("hodge_orthogonality", self.hodge_orthogonality, tol.hodge_orthogonality),
            Verdict::bounded(
                "hodge_reconstruction",
                self.hodge_reconstruction,
                tol.hodge_reconstruction,
            ),
            Verdict::bounded(
                "primitive_round_trip",
                self.primitive_round_trip,
                tol.primitive_round_trip,
            ),
        ]
    }
}

/// Sample `i` uses degree `i mod n`, a Lee form with random constant part
/// and a band-limited exact part, and a conformal factor `e^u` with
/// `max |u| = log_amplitude`. The Hodge and primitive checks need a constant
/// Lee form and use its constant part, switched off on even samples so that
/// both the twisted and the classical complex are covered.
pub fn identity_sweep(
    grid: GridSpec,
    samples: usize,
    bandwidth: usize,
    log_amplitude: f64,
    seed: u64,
) -> Result<IdentityResiduals> {
    let n = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = IdentityResiduals {
        samples,
        ..Default::default()
    };
    for i in 0..samples {
        let k = i % n;
        let lee: LeeForm<f64> = random_lee(grid, bandwidth, &mut rng);
        let a = random_form(grid, k, bandwidth, &mut rng);
        let b = random_form(grid, k + 1, bandwidth, &mut rng);
        let u = random_field::<f64, _>(grid, bandwidth, &mut rng);
        let u = u.scale(log_amplitude / u.max_abs());

        let da = d_theta(&a, &lee)?;
        if k + 2 <= n {
            out.d_theta_squared = out.d_theta_squared.max(d_theta(&da, &lee)?.norm() / a.norm());
        }

        let f = u.map(f64::exp);
        let fa = a.mul_function(&f)?;
        let shifted = LeeForm::from_parts(lee.harmonic(), lee.potential().add(&u)?)?;
        let defect = da.mul_function(&f)?.sub(&d_theta(&fa, &shifted)?)?;
        out.chain_map = out.chain_map.max(defect.norm() / fa.norm());

        let lhs = l2_inner(&da, &b)?;
        let rhs = l2_inner(&a, &d_theta_star(&b, &lee)?)?;
        out.adjointness = out.adjointness.max((lhs - rhs).abs() / (a.norm() * b.norm()));

        let constant = if i % 2 == 0 {
            LeeForm::zero(grid)
        } else {
            LeeForm::constant(grid, lee.harmonic())
        };
        let h = hodge_decompose(&a, &constant)?;
        let parts = [&h.harmonic, &h.exact, &h.coexact];
        let scale = a.norm() * a.norm();
        for p in 0..3 {
            for q in p + 1..3 {
                let ip = l2_inner(parts[p], parts[q])?.abs() / scale;
                out.hodge_orthogonality = out.hodge_orthogonality.max(ip);
            }
        }
        let sum = h.harmonic.add(&h.exact)?.add(&h.coexact)?.add(&h.unresolved)?;
        out.hodge_reconstruction = out.hodge_reconstruction.max(sum.sub(&a)?.norm() / a.norm());

        let target = d_theta(&a, &constant)?;
        if target.norm() > 1e-6 * a.norm() {
            let sol = solve_primitive(&target, &constant)?;
            let back = d_theta(&sol.primitive, &constant)?;
            out.primitive_round_trip = out.primitive_round_trip.max(back.sub(&target)?.norm() / target.norm());
        }
    }
    Ok(out)
}

pub fn run(cfg: &IdentitiesConfig, seed: u64) -> Result<IdentityResiduals> {
    identity_sweep(cfg.grid.spec()?, cfg.samples, cfg.bandwidth, cfg.log_amplitude, seed)
}
