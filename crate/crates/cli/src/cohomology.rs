//! Cohomology scenarios: flat tori, simplicial complexes and mapping tori.

use lcs_core::lichnerowicz::torus_twisted_betti;
use lcs_core::twisted::exact::{is_zero_matrix, mat_mul};
use lcs_core::twisted::local::random_potential;
use lcs_core::twisted::{
    coboundary, euler_check, example_inequality_check, fixtures, mapping_torus_betti, random_local_system,
    twisted_betti, ComplexInput, EdgeWeight, ExampleVerdict, LocalSystem, SimplicialComplex, TwistedBettiResult,
    TwistedError, TwistedResult,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{MappingTorusConfig, SimplicialConfig, TorusConfig};
use crate::report::Verdict;

fn dims_verdict(expected: &Option<Vec<usize>>, dims: &[usize]) -> Option<Verdict> {
    expected.as_ref().map(|e| {
        Verdict::check(
            "expected_dims",
            e.as_slice() == dims,
            format!("expected {e:?}, found {dims:?}"),
        )
    })
}

fn euler_verdict(result: &TwistedBettiResult) -> Verdict {
    let e = euler_check(result);
    Verdict::check(
        "euler_identity",
        e.holds,
        format!(
            "alternating sum {} vs Euler characteristic {}",
            e.alternating_sum, e.chi
        ),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusOutcome {
    pub betti: TwistedBettiResult,
}

pub fn run_torus(cfg: &TorusConfig) -> lcs_core::Result<(TorusOutcome, Vec<Verdict>)> {
    let grid = cfg.grid.spec()?;
    let dims = torus_twisted_betti(&cfg.harmonic, &grid);
    let betti = TwistedBettiResult::new(dims, 0);
    let mut verdicts = vec![euler_verdict(&betti)];
    verdicts.extend(dims_verdict(&cfg.expected_dims, &betti.dims));
    Ok((TorusOutcome { betti }, verdicts))
}

/// Counts of random local systems that broke each exact identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepCounts {
    pub systems: usize,
    pub d_squared_failures: usize,
    pub euler_failures: usize,
    pub gauge_failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplicialOutcome {
    pub f_vector: Vec<usize>,
    pub euler_characteristic: i64,
    pub betti: TwistedBettiResult,
    pub d_squared_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepCounts>,
}

/// `d_{k+1} d_k = 0` in every degree, exactly.
pub fn d_squared_vanishes(complex: &SimplicialComplex, system: &LocalSystem) -> bool {
    (0..complex.dim()).all(|k| {
        let dk = coboundary(complex, system, k);
        let dk1 = coboundary(complex, system, k + 1);
        dk.is_empty() || dk1.is_empty() || is_zero_matrix(&mat_mul(&dk1, &dk))
    })
}

/// Random rational local systems on `complex`: `d^2 = 0`, the Euler
/// identity and invariance of the Betti numbers under a random gauge.
pub fn random_system_sweep(complex: &SimplicialComplex, systems: usize, seed: u64) -> SweepCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = SweepCounts {
        systems,
        ..Default::default()
    };
    for _ in 0..systems {
        let system = random_local_system(complex, &mut rng);
        if !d_squared_vanishes(complex, &system) {
            counts.d_squared_failures += 1;
        }
        let betti = twisted_betti(complex, &system);
        if !euler_check(&betti).holds {
            counts.euler_failures += 1;
        }
        let gauged = system
            .gauge(&random_potential(complex.vertex_count(), &mut rng))
            .expect("positive potential");
        if twisted_betti(complex, &gauged).dims != betti.dims {
            counts.gauge_failures += 1;
        }
    }
    counts
}

fn load_complex(cfg: &SimplicialConfig) -> TwistedResult<(SimplicialComplex, LocalSystem)> {
    match (&cfg.fixture, &cfg.top_simplices) {
        (Some(name), _) => {
            let complex = fixtures::by_name(name).ok_or(TwistedError::EmptyComplex)?;
            let weights = cfg
                .weights
                .iter()
                .map(|w| Ok(EdgeWeight::new(w.edge[0], w.edge[1], w.w.value()?)))
                .collect::<TwistedResult<Vec<_>>>()?;
            let system = lcs_core::twisted::local_system(&complex, &weights)?;
            Ok((complex, system))
        }
        (None, Some(top)) => ComplexInput {
            top_simplices: top.clone(),
            weights: cfg.weights.clone(),
        }
        .build(),
        (None, None) => Err(TwistedError::EmptyComplex),
    }
}

pub fn run_simplicial(cfg: &SimplicialConfig, seed: u64) -> TwistedResult<(SimplicialOutcome, Vec<Verdict>)> {
    let (complex, system) = load_complex(cfg)?;
    let betti = twisted_betti(&complex, &system);
    let d_squared_zero = d_squared_vanishes(&complex, &system);
    let sweep = (cfg.random_systems > 0).then(|| random_system_sweep(&complex, cfg.random_systems, seed));
    let mut verdicts = vec![
        Verdict::check("d_squared_zero", d_squared_zero, "exact rational product"),
        euler_verdict(&betti),
    ];
    verdicts.extend(dims_verdict(&cfg.expected_dims, &betti.dims));
    if let Some(s) = &sweep {
        let detail = |bad: usize| format!("{bad} of {} random systems", s.systems);
        verdicts.push(Verdict::check(
            "sweep_d_squared_zero",
            s.d_squared_failures == 0,
            detail(s.d_squared_failures),
        ));
        verdicts.push(Verdict::check(
            "sweep_euler_identity",
            s.euler_failures == 0,
            detail(s.euler_failures),
        ));
        verdicts.push(Verdict::check(
            "sweep_gauge_invariance",
            s.gauge_failures == 0,
            detail(s.gauge_failures),
        ));
    }
    let outcome = SimplicialOutcome {
        f_vector: complex.f_vector(),
        euler_characteristic: complex.euler_characteristic(),
        betti,
        d_squared_zero,
        sweep,
    };
    Ok((outcome, verdicts))
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingTorusOutcome {
    pub betti: TwistedBettiResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleVerdict>,
}

pub fn run_mapping_torus(cfg: &MappingTorusConfig) -> TwistedResult<(MappingTorusOutcome, Vec<Verdict>)> {
    let betti = mapping_torus_betti(&cfg.matrix, &cfg.t0.value()?)?;
    let mut verdicts = vec![euler_verdict(&betti)];
    let example = if betti.dims.len() == 5 {
        let v = example_inequality_check(&betti)?;
        verdicts.push(Verdict::check("example_identity", v.passed(), v.statement.clone()));
        Some(v)
    } else {
        None
    };
    verdicts.extend(dims_verdict(&cfg.expected_dims, &betti.dims));
    Ok((MappingTorusOutcome { betti, example }, verdicts))
}
