//! Scenario runner for `lcs-core`.
//!
//! A run reads a JSON config, dispatches to one of the scenario types,
//! writes a JSON report (and a per-checkpoint CSV for Moser runs) and
//! returns the exit code: 0 when every verdict passes, 1 when a check fails
//! or the scenario stops on an error, 2 when the config cannot be used.

pub mod cohomology;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod identities;
pub mod moser;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

pub use config::{Scenario, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use fixtures::{emit_fixture, fixture, FIXTURES};
pub use report::{RunReport, Verdict};

use report::Failure;

fn to_results<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("results serialize")
}

fn record<T: Serialize, E: std::fmt::Debug + std::fmt::Display>(
    report: &mut RunReport,
    outcome: Result<(T, Vec<Verdict>), E>,
) {
    match outcome {
        Ok((results, verdicts)) => {
            report.results = to_results(&results);
            report.verdicts = verdicts;
        }
        Err(e) => {
            report
                .verdicts
                .push(Verdict::check("precondition", false, Failure::from_error(&e).kind));
            report.failure = Some(Failure::from_error(&e));
        }
    }
}

/// Runs a parsed config in memory.
pub fn execute(config: &ScenarioConfig) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::new(config.scenario.name(), config.to_json());
    match &config.scenario {
        Scenario::Identities(c) => {
            let out = identities::run(c, config.seed).map(|r| {
                let v = r.verdicts(&c.tolerances);
                (r, v)
            });
            record(&mut report, out);
        }
        Scenario::CohomologyTorus(c) => record(&mut report, cohomology::run_torus(c)),
        Scenario::CohomologySimplicial(c) => record(&mut report, cohomology::run_simplicial(c, config.seed)),
        Scenario::CohomologyMappingTorus(c) => record(&mut report, cohomology::run_mapping_torus(c)),
        Scenario::Moser(c) => {
            let out = moser::run(c).map(|r| {
                let v = moser::verdicts(c, &r);
                (r, v)
            });
            if let Ok((r, _)) = &out {
                report.checkpoints = r.checkpoints.clone();
            }
            record(&mut report, out);
        }
    }
    report.timings.total_seconds = start.elapsed().as_secs_f64();
    report.finish();
    report
}

/// Command-line conveniences layered over the config.
#[derive(Clone, Debug, Default)]
pub struct RunFlags {
    pub out: Option<PathBuf>,
    pub steps: Option<usize>,
    pub grid: Option<usize>,
    pub quiet: bool,
}

/// Files written by [`run`].
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub report_path: PathBuf,
    pub csv_path: Option<PathBuf>,
}

pub fn load_config(path: &Path) -> CliResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioConfig::parse(&text)
}

/// Loads, overrides, executes and writes the report files.
pub fn run(config_path: &Path, flags: &RunFlags) -> CliResult<RunOutput> {
    let mut config = load_config(config_path)?;
    config.apply_overrides(flags.steps, flags.grid)?;
    if let Some(dir) = &flags.out {
        config.output.dir = dir.clone();
    }
    let dir = config.output.dir.clone();
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let report = execute(&config);
    let report_path = dir.join(&config.output.report);
    report.write_json(&report_path)?;
    let csv = dir.join(&config.output.csv);
    let csv_path = report.write_csv(&csv)?.then_some(csv);
    if !flags.quiet {
        print!("{}", report.summary());
        println!("report: {}", report_path.display());
        if let Some(p) = &csv_path {
            println!("checkpoints: {}", p.display());
        }
    }
    Ok(RunOutput {
        report,
        report_path,
        csv_path,
    })
}
