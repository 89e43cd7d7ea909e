//! Scenario configuration files.
//!
//! A config is one JSON object. The keys `comment`, `expect`, `seed` and
//! `output` are shared by every scenario; the remaining keys are selected by
//! `"scenario"`. Unknown keys are rejected everywhere and every default is
//! written back into the echoed config.

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use lcs_core::literal::FormLiteral;
use lcs_core::twisted::fixtures;
use lcs_core::twisted::io::{TwistInput, WeightInput};
use lcs_core::GridSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

const COMMON_KEYS: [&str; 4] = ["comment", "expect", "seed", "output"];

/// Verdict a config documents for itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    #[default]
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_report")]
    pub report: String,
    #[serde(default = "default_csv")]
    pub csv: String,
}

fn default_dir() -> PathBuf {
    PathBuf::from("lcs-out")
}

fn default_report() -> String {
    "report.json".into()
}

fn default_csv() -> String {
    "checkpoints.csv".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            report: default_report(),
            csv: default_csv(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Common {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
    #[serde(default)]
    expect: Expectation,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: OutputConfig,
}

/// Torus dimension `n` and samples per axis `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
}

impl GridConfig {
    pub const fn new(n: usize, size: usize) -> Self {
        Self { n, size }
    }

    pub fn spec(&self) -> lcs_core::Result<GridSpec> {
        GridSpec::new(self.n, self.size)
    }
}

fn t4() -> GridConfig {
    GridConfig::new(4, 16)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityTolerances {
    #[serde(default = "tol_1e9")]
    pub d_theta_squared: f64,
    #[serde(default = "tol_1e9")]
    pub chain_map: f64,
    #[serde(default = "tol_1e10")]
    pub adjointness: f64,
    #[serde(default = "tol_1e9")]
    pub hodge_orthogonality: f64,
    #[serde(default = "tol_1e10")]
    pub hodge_reconstruction: f64,
    #[serde(default = "tol_1e9")]
    pub primitive_round_trip: f64,
}

fn tol_1e9() -> f64 {
    1e-9
}

fn tol_1e10() -> f64 {
    1e-10
}

impl Default for IdentityTolerances {
    fn default() -> Self {
        Self {
            d_theta_squared: 1e-9,
            chain_map: 1e-9,
            adjointness: 1e-10,
            hodge_orthogonality: 1e-9,
            hodge_reconstruction: 1e-10,
            primitive_round_trip: 1e-9,
        }
    }
}

/// Randomized sweep of the twisted operator identities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default = "t4")]
    pub grid: GridConfig,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Largest Fourier index of the random forms and Lee potentials.
    #[serde(default = "one")]
    pub bandwidth: usize,
    /// Sup norm of the log of the conformal factor in the chain-map check.
    #[serde(default = "default_log_amplitude")]
    pub log_amplitude: f64,
    #[serde(default)]
    pub tolerances: IdentityTolerances,
}

fn default_samples() -> usize {
    100
}

fn one() -> usize {
    1
}

fn default_log_amplitude() -> f64 {
    0.1
}

/// Lichnerowicz cohomology of `T^n` for a constant Lee form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusConfig {
    #[serde(default = "t4")]
    pub grid: GridConfig,
    /// Constant Lee coefficients; missing entries are zero.
    #[serde(default)]
    pub harmonic: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_dims: Option<Vec<usize>>,
}

/// Twisted cohomology of a simplicial complex, named or explicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_simplices: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub weights: Vec<WeightInput>,
    /// Number of random rational local systems checked for `d^2 = 0`, the
    /// Euler identity and gauge invariance.
    #[serde(default)]
    pub random_systems: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_dims: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingTorusConfig {
    pub matrix: Vec<Vec<i64>>,
    pub t0: TwistInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_dims: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    ContactCircle,
    AreaInterpolation,
    GcsRescale,
    Tabulated,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathChoice {
    #[default]
    Theorem,
    ExactFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactCircleParams {
    #[serde(default = "unit")]
    pub c: f64,
    #[serde(default = "quarter_pi")]
    pub speed: f64,
    #[serde(default)]
    pub c_rate: f64,
    #[serde(default)]
    pub eps: f64,
    #[serde(default)]
    pub twist: f64,
}

fn unit() -> f64 {
    1.0
}

fn quarter_pi() -> f64 {
    FRAC_PI_4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaParams {
    #[serde(default = "area_eps")]
    pub eps: f64,
    #[serde(default = "area_sigma")]
    pub sigma: f64,
}

fn area_eps() -> f64 {
    0.1
}

fn area_sigma() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GcsParams {
    #[serde(default = "gcs_a")]
    pub a: f64,
    #[serde(default = "gcs_eps")]
    pub eps: f64,
}

fn gcs_a() -> f64 {
    0.3
}

fn gcs_eps() -> f64 {
    0.05
}

/// Form literals sampled uniformly over `[0, 1]`, endpoints included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedParams {
    pub samples: Vec<FormLiteral>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorParams {
    ContactCircle(ContactCircleParams),
    Area(AreaParams),
    Gcs(GcsParams),
    Tabulated(TabulatedParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoserTolerances {
    /// Conformal consistency and factor error.
    #[serde(default = "tol_1e3")]
    pub tol: f64,
    #[serde(default = "tol_1e6")]
    pub eq1: f64,
    #[serde(default = "tol_1e8")]
    pub exactness: f64,
    #[serde(default = "tol_1e8")]
    pub lee_drift: f64,
    #[serde(default = "tol_1e8")]
    pub precondition: f64,
    #[serde(default = "tol_1e8")]
    pub corollary: f64,
    #[serde(default = "tol_1e8")]
    pub nondeg_threshold: f64,
    #[serde(default = "tol_1e8")]
    pub lcs: f64,
}

fn tol_1e3() -> f64 {
    1e-3
}

fn tol_1e6() -> f64 {
    1e-6
}

fn tol_1e8() -> f64 {
    1e-8
}

impl Default for MoserTolerances {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            eq1: 1e-6,
            exactness: 1e-8,
            lee_drift: 1e-8,
            precondition: 1e-8,
            corollary: 1e-8,
            nondeg_threshold: 1e-8,
            lcs: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoserConfig {
    pub generator: GeneratorKind,
    #[serde(default = "empty_object")]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    #[serde(default)]
    pub path: PathChoice,
    #[serde(default)]
    pub tolerances: MoserTolerances,
    /// Absorb harmonic obstructions proportional to the class of the form.
    #[serde(default = "yes")]
    pub absorb: bool,
    #[serde(default = "unit")]
    pub cfl_safety: f64,
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

fn default_steps() -> usize {
    200
}

fn default_checkpoints() -> usize {
    11
}

fn yes() -> bool {
    true
}

impl MoserConfig {
    pub fn new(generator: GeneratorKind) -> Self {
        Self {
            generator,
            params: empty_object(),
            grid: None,
            steps: default_steps(),
            checkpoints: default_checkpoints(),
            path: PathChoice::Theorem,
            tolerances: MoserTolerances::default(),
            absorb: true,
            cfl_safety: 1.0,
        }
    }

    pub fn typed_params(&self) -> CliResult<GeneratorParams> {
        let p = self.params.clone();
        Ok(match self.generator {
            GeneratorKind::ContactCircle => GeneratorParams::ContactCircle(from_value(p, "params")?),
            GeneratorKind::AreaInterpolation => GeneratorParams::Area(from_value(p, "params")?),
            GeneratorKind::GcsRescale => GeneratorParams::Gcs(from_value(p, "params")?),
            GeneratorKind::Tabulated => GeneratorParams::Tabulated(from_value(p, "params")?),
        })
    }

    /// Grid from the config, or the generator's natural one.
    pub fn grid_or_default(&self) -> GridConfig {
        self.grid.unwrap_or(match self.generator {
            GeneratorKind::AreaInterpolation => GridConfig::new(2, 32),
            _ => t4(),
        })
    }

    fn normalize(&mut self) -> CliResult<()> {
        self.params = match self.typed_params()? {
            GeneratorParams::ContactCircle(p) => to_value(&p),
            GeneratorParams::Area(p) => to_value(&p),
            GeneratorParams::Gcs(p) => to_value(&p),
            GeneratorParams::Tabulated(p) => to_value(&p),
        };
        self.grid = Some(self.grid_or_default());
        let t = &self.tolerances;
        positive(
            "tolerances",
            &[
                t.tol,
                t.eq1,
                t.exactness,
                t.lee_drift,
                t.precondition,
                t.corollary,
                t.nondeg_threshold,
                t.lcs,
            ],
        )?;
        positive("cfl_safety", &[self.cfl_safety])?;
        if self.steps == 0 || self.checkpoints == 0 {
            return Err(CliError::ConfigParse("steps and checkpoints must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum Scenario {
    Identities(IdentitiesConfig),
    CohomologyTorus(TorusConfig),
    CohomologySimplicial(SimplicialConfig),
    CohomologyMappingTorus(MappingTorusConfig),
    Moser(MoserConfig),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identities(_) => "identities",
            Self::CohomologyTorus(_) => "cohomology_torus",
            Self::CohomologySimplicial(_) => "cohomology_simplicial",
            Self::CohomologyMappingTorus(_) => "cohomology_mapping_torus",
            Self::Moser(_) => "moser",
        }
    }

    fn normalize(&mut self) -> CliResult<()> {
        match self {
            Self::Identities(c) => {
                let t = &c.tolerances;
                positive(
                    "tolerances",
                    &[
                        t.d_theta_squared,
                        t.chain_map,
                        t.adjointness,
                        t.hodge_orthogonality,
                        t.hodge_reconstruction,
                        t.primitive_round_trip,
                    ],
                )?;
                positive("log_amplitude", &[c.log_amplitude])?;
                if c.samples == 0 {
                    return Err(CliError::ConfigParse("samples must be positive".into()));
                }
            }
            Self::CohomologyTorus(c) => {
                if c.harmonic.len() > c.grid.n {
                    return Err(CliError::ConfigParse(format!(
                        "{} harmonic coefficients on a {}-torus",
                        c.harmonic.len(),
                        c.grid.n
                    )));
                }
                c.harmonic.resize(c.grid.n, 0.0);
            }
            Self::CohomologySimplicial(c) => {
                if c.fixture.is_some() == c.top_simplices.is_some() {
                    return Err(CliError::ConfigParse(
                        "give exactly one of \"fixture\" and \"top_simplices\"".into(),
                    ));
                }
                if let Some(name) = &c.fixture {
                    if fixtures::by_name(name).is_none() {
                        let names: Vec<_> = fixtures::all().into_iter().map(|(n, _)| n).collect();
                        return Err(CliError::ConfigParse(format!(
                            "unknown complex {name:?} (available: {})",
                            names.join(", ")
                        )));
                    }
                }
            }
            Self::CohomologyMappingTorus(_) => {}
            Self::Moser(c) => c.normalize()?,
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub comment: Option<String>,
    pub expect: Expectation,
    pub seed: u64,
    pub output: OutputConfig,
    pub scenario: Scenario,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            comment: None,
            expect: Expectation::Pass,
            seed: 0,
            output: OutputConfig::default(),
            scenario,
        }
    }

    pub fn with_comment(mut self, comment: &str) -> Self {
        self.comment = Some(comment.into());
        self
    }

    /// Parses and validates a config, filling in defaults.
    pub fn parse(text: &str) -> CliResult<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))?;
        Self::from_json(value)
    }

    pub fn from_json(value: Value) -> CliResult<Self> {
        let Value::Object(mut obj) = value else {
            return Err(CliError::ConfigParse("config must be a JSON object".into()));
        };
        let mut common = Map::new();
        for key in COMMON_KEYS {
            if let Some(v) = obj.remove(key) {
                common.insert(key.into(), v);
            }
        }
        let common: Common = from_value(Value::Object(common), "config")?;
        let mut scenario: Scenario = from_value(Value::Object(obj), "scenario")?;
        scenario.normalize()?;
        Ok(Self {
            comment: common.comment,
            expect: common.expect,
            seed: common.seed,
            output: common.output,
            scenario,
        })
    }

    /// The full config with defaults, as echoed in reports.
    pub fn to_json(&self) -> Value {
        let common = Common {
            comment: self.comment.clone(),
            expect: self.expect,
            seed: self.seed,
            output: self.output.clone(),
        };
        let mut out = match to_value(&common) {
            Value::Object(m) => m,
            _ => unreachable!("struct serializes to an object"),
        };
        if let Value::Object(m) = to_value(&self.scenario) {
            out.extend(m);
        }
        Value::Object(out)
    }

    /// Applies `--steps` and `--grid` style overrides.
    pub fn apply_overrides(&mut self, steps: Option<usize>, grid: Option<usize>) -> CliResult<()> {
        if let Some(size) = grid {
            match &mut self.scenario {
                Scenario::Identities(c) => c.grid.size = size,
                Scenario::CohomologyTorus(c) => c.grid.size = size,
                Scenario::Moser(c) => {
                    let mut g = c.grid_or_default();
                    g.size = size;
                    c.grid = Some(g);
                }
                _ => {}
            }
        }
        if let (Some(n), Scenario::Moser(c)) = (steps, &mut self.scenario) {
            c.steps = n;
        }
        self.scenario.normalize()
    }
}

fn positive(what: &str, values: &[f64]) -> CliResult<()> {
    if values.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(CliError::ConfigParse(format!("{what} must be positive")))
    }
}

fn from_value<T: DeserializeOwned>(v: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::ConfigParse(format!("{what}: {e}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("config types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled_and_echoed() {
        let c = ScenarioConfig::parse(r#"{"scenario": "identities"}"#).unwrap();
        let Scenario::Identities(id) = &c.scenario else {
            panic!()
        };
        assert_eq!(id.samples, 100);
        assert_eq!(id.grid, GridConfig::new(4, 16));
        let echo = c.to_json();
        assert_eq!(echo["tolerances"]["adjointness"], 1e-10);
        assert_eq!(echo["grid"]["N"], 16);
        assert_eq!(ScenarioConfig::from_json(echo).unwrap(), c);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        for text in [
            r#"{"scenario": "identities", "sampels": 3}"#,
            r#"{"scenario": "identities", "tolerances": {"chain": 1e-9}}"#,
            r#"{"scenario": "moser", "generator": "contact_circle", "params": {"cc": 1}}"#,
            r#"{"scenario": "moser", "generator": "warp"}"#,
            r#"{"scenario": "nope"}"#,
            r#"{"scenario": "identities", "output": {"folder": "x"}}"#,
            r#"{"scenario": "identities", "tolerances": {"chain_map": -1}}"#,
            r#"{"scenario": "cohomology_simplicial"}"#,
            r#"[1, 2]"#,
        ] {
            assert!(
                matches!(ScenarioConfig::parse(text), Err(CliError::ConfigParse(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn moser_params_and_grid_default_by_generator() {
        let c = ScenarioConfig::parse(r#"{"scenario": "moser", "generator": "area_interpolation"}"#).unwrap();
        let Scenario::Moser(m) = &c.scenario else { panic!() };
        assert_eq!(m.grid, Some(GridConfig::new(2, 32)));
        assert_eq!(m.params["sigma"], 0.5);
        let mut c =
            ScenarioConfig::parse(r#"{"scenario": "moser", "generator": "contact_circle", "params": {"c": 2}}"#)
                .unwrap();
        c.apply_overrides(Some(20), Some(8)).unwrap();
        let Scenario::Moser(m) = &c.scenario else { panic!() };
        assert_eq!((m.steps, m.grid), (20, Some(GridConfig::new(4, 8))));
        assert_eq!(m.params["c"], 2.0);
        assert_eq!(m.params["speed"], FRAC_PI_4);
    }

    #[test]
    fn torus_harmonic_padded() {
        let c = ScenarioConfig::parse(r#"{"scenario": "cohomology_torus", "harmonic": [0.5]}"#).unwrap();
        let Scenario::CohomologyTorus(t) = &c.scenario else {
            panic!()
        };
        assert_eq!(t.harmonic, vec![0.5, 0.0, 0.0, 0.0]);
        assert!(ScenarioConfig::parse(r#"{"scenario": "cohomology_torus", "harmonic": [1,1,1,1,1]}"#).is_err());
    }
}
