//! Moser isotopy scenario.

use std::sync::Arc;

use lcs_core::lichnerowicz::LcsOptions;
use lcs_core::moser::{
    run_exact_family, run_theorem_pipeline, AreaInterpolation, ContactCircle, FamilyGenerator, FormFamily, GcsRescale,
    MoserOptions, MoserReport, Tabulated,
};
use lcs_core::Result;

use crate::config::{GeneratorParams, MoserConfig, PathChoice};
use crate::report::Verdict;

pub fn options(cfg: &MoserConfig) -> MoserOptions {
    let t = &cfg.tolerances;
    MoserOptions {
        steps: cfg.steps,
        checkpoints: cfg.checkpoints,
        tol: t.tol,
        eq1_tol: t.eq1,
        exactness_tol: t.exactness,
        lee_drift_tol: t.lee_drift,
        precondition_tol: t.precondition,
        corollary_tol: t.corollary,
        absorb: cfg.absorb,
        cfl_safety: cfg.cfl_safety,
    }
}

/// The family described by a (normalized) config.
pub fn family(cfg: &MoserConfig) -> Result<FormFamily<f64>> {
    let grid = cfg.grid_or_default().spec()?;
    let params = cfg
        .typed_params()
        .map_err(|e| lcs_core::Error::InvalidFamily(e.to_string()))?;
    let generator: Arc<dyn FamilyGenerator<f64>> = match params {
        GeneratorParams::ContactCircle(p) => Arc::new(
            ContactCircle::new(grid, p.c, p.speed)?
                .with_c_rate(p.c_rate)
                .with_eps(p.eps)
                .with_twist(p.twist),
        ),
        GeneratorParams::Area(p) => Arc::new(AreaInterpolation::new(grid, p.eps, p.sigma)?),
        GeneratorParams::Gcs(p) => Arc::new(GcsRescale::new(grid, p.a, p.eps)?),
        GeneratorParams::Tabulated(p) => {
            let samples = p
                .samples
                .iter()
                .map(|s| s.to_form(grid, 2))
                .collect::<Result<Vec<_>>>()?;
            Arc::new(Tabulated::new(samples)?)
        }
    };
    let lcs = LcsOptions {
        nondeg_threshold: cfg.tolerances.nondeg_threshold,
        lcs_tolerance: cfg.tolerances.lcs,
    };
    Ok(FormFamily::new(generator, lcs))
}

pub fn run(cfg: &MoserConfig) -> Result<MoserReport> {
    let fam = family(cfg)?;
    let opts = options(cfg);
    match cfg.path {
        PathChoice::Theorem => run_theorem_pipeline(&fam, &opts),
        PathChoice::ExactFamily => run_exact_family(&fam, &opts),
    }
}

pub fn verdicts(cfg: &MoserConfig, report: &MoserReport) -> Vec<Verdict> {
    let t = &cfg.tolerances;
    let s = &report.summary;
    let mut v = vec![
        Verdict::bounded("conformal_consistency_error", s.max_conformal_consistency_error, t.tol),
        Verdict::bounded("factor_error", s.max_factor_error, t.tol),
        Verdict::check(
            "factor_positive",
            report.checkpoints.iter().all(|c| c.factor_positive),
            format!("min factor {:.6e}", s.min_factor),
        ),
        Verdict::check(
            "jacobian_positive",
            s.min_det_jacobian > 0.0,
            format!("min det {:.6e}", s.min_det_jacobian),
        ),
        Verdict::bounded("eq1_residual", s.max_eq1_residual, t.eq1),
        Verdict::bounded("necessity_residual", s.max_necessity_residual, t.eq1),
        Verdict::bounded("exactness_residual", s.max_exactness_residual, t.exactness),
    ];
    if let Some(c) = s.max_corollary_residual {
        v.push(Verdict::bounded("corollary_residual", c, t.corollary));
    }
    v
}
