//! Built-in ready-to-run configs.

use std::f64::consts::FRAC_PI_4;

use lcs_core::twisted::exact::rational;
use lcs_core::twisted::io::{RationalInput, TwistInput, WeightInput};
use lcs_core::twisted::mapping_torus::{cubic_companion, cubic_real_root};
use lcs_core::twisted::{fixtures, SimplicialComplex};
use serde_json::json;

use crate::config::{
    GeneratorKind, GridConfig, MappingTorusConfig, MoserConfig, Scenario, ScenarioConfig, SimplicialConfig,
};
use crate::error::{CliError, CliResult};

pub const FIXTURES: [&str; 5] = [
    "contact_circle",
    "area_t2",
    "gcs_rescale",
    "anosov_mapping_torus",
    "torus_simplicial",
];

fn moser(kind: GeneratorKind, params: serde_json::Value, grid: GridConfig, steps: usize) -> Scenario {
    let mut m = MoserConfig::new(kind);
    m.params = params;
    m.grid = Some(grid);
    m.steps = steps;
    Scenario::Moser(m)
}

fn torus_top_simplices(complex: &SimplicialComplex) -> Vec<Vec<usize>> {
    complex.simplices(2).to_vec()
}

/// The named fixture, with defaults filled in.
pub fn fixture(name: &str) -> CliResult<ScenarioConfig> {
    let config = match name {
        "contact_circle" => ScenarioConfig::new(moser(
            GeneratorKind::ContactCircle,
            json!({"c": 1.0, "speed": FRAC_PI_4, "eps": 0.01, "twist": 0.25}),
            GridConfig::new(4, 16),
            200,
        ))
        .with_comment(
            "Rotating contact form times a circle on T^4 with Lee form c dx4 + t b d(sin 2 pi x2), \
             N = 16, 200 RK4 steps. Expected verdict: pass, conformal consistency and factor \
             error <= 1e-3, eq1 residual <= 1e-6 at all 11 checkpoints.",
        ),
        "area_t2" => ScenarioConfig::new(moser(
            GeneratorKind::AreaInterpolation,
            json!({"eps": 0.1, "sigma": 0.5}),
            GridConfig::new(2, 32),
            200,
        ))
        .with_comment(
            "Area forms (1 + t r) dx1 ^ dx2 on T^2 whose total area grows from 1 to 1.5. Expected verdict: \
             pass after absorbing the scale into e^{c(t)}; absorbed scale 2/3, factor 1 up to round-off.",
        ),
        "gcs_rescale" => ScenarioConfig::new(moser(
            GeneratorKind::GcsRescale,
            json!({"a": 0.3, "eps": 0.05}),
            GridConfig::new(4, 16),
            40,
        ))
        .with_comment(
            "Globally conformally symplectic family e^{a t sin 2 pi x2} times a perturbed standard form \
             on T^4, 40 RK4 steps. Expected verdict: pass with trivial Lee class.",
        ),
        "anosov_mapping_torus" => ScenarioConfig::new(Scenario::CohomologyMappingTorus(MappingTorusConfig {
            matrix: cubic_companion(),
            t0: TwistInput::Number(1.0 / cubic_real_root()),
            expected_dims: Some(vec![0, 1, 1, 0, 0]),
        }))
        .with_comment(
            "Mapping torus of the Anosov map of T^3 with characteristic polynomial x^3 - x - 1, twisted \
                 by the inverse of its expanding eigenvalue. Expected verdict: pass, dims (0,1,1,0,0), \
                 alternating sum 0, b2 = b1 + b3 - b0 - b4; b3 = 0 so no bound on b2 is claimed.",
        ),
        "torus_simplicial" => {
            let complex = fixtures::torus();
            let system = fixtures::torus_holonomy(&complex, &rational(2, 1), &rational(1, 1))
                .expect("grid torus admits any holonomy");
            let weights = system
                .edge_weights()
                .into_iter()
                .map(|w| WeightInput {
                    edge: w.edge,
                    w: RationalInput::Text(w.w.to_string()),
                })
                .collect();
            ScenarioConfig::new(Scenario::CohomologySimplicial(SimplicialConfig {
                fixture: None,
                top_simplices: Some(torus_top_simplices(&complex)),
                weights,
                random_systems: 10,
                expected_dims: Some(vec![0, 0, 0]),
            }))
            .with_comment(
                "16-vertex torus with holonomy 2 around the first circle and 1 around the second, plus 10 \
                 random rational local systems. Expected verdict: pass, dims (0,0,0), exact d^2 = 0, Euler \
                 identity and gauge invariance on every system.",
            )
        }
        _ => {
            return Err(CliError::UnknownFixture {
                name: name.into(),
                available: FIXTURES.join(", "),
            })
        }
    };
    // Round-trip through the parser so that every default is present.
    ScenarioConfig::from_json(config.to_json())
}

/// Pretty-printed JSON of the named fixture.
pub fn emit_fixture(name: &str) -> CliResult<String> {
    let config = fixture(name)?;
    Ok(serde_json::to_string_pretty(&config.to_json()).expect("config serializes") + "\n")
}
